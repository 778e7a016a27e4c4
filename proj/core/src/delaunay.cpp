#include "curvedray/delaunay.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "curvedray/error.hpp"
#include "curvedray/predicates.hpp"

namespace curvedray {

namespace {

constexpr int kInfinite = -1;

struct Tet {
    std::array<int, 4> v;
    std::array<int, 4> n;
    bool alive = true;

    bool infinite() const { return v[0] == kInfinite || v[1] == kInfinite || v[2] == kInfinite || v[3] == kInfinite; }
    int slot_of(int vertex) const {
        for (int i = 0; i < 4; ++i)
            if (v[i] == vertex) return i;
        return -1;
    }
    int slot_of_neighbor(int t) const {
        for (int i = 0; i < 4; ++i)
            if (n[i] == t) return i;
        return -1;
    }
};

std::uint64_t spread_bits(std::uint64_t x) {
    x &= 0x1fffff;
    x = (x | x << 32) & 0x1f00000000ffffULL;
    x = (x | x << 16) & 0x1f0000ff0000ffULL;
    x = (x | x << 8) & 0x100f00f00f00f00fULL;
    x = (x | x << 4) & 0x10c30c30c30c30c3ULL;
    x = (x | x << 2) & 0x1249249249249249ULL;
    return x;
}


class Builder {
public:
    explicit Builder(const std::vector<Vec3>& pts) : pts_(pts) {}

    Tetrahedralization run() {
        if (pts_.size() < 4) throw GeometryError("tetrahedralize: need at least 4 points");
        std::vector<int> order = morton_order(pts_);
        std::array<int, 4> seed = find_seed(order);
        build_seed(seed);
        for (int id : order) {
            if (id == seed[0] || id == seed[1] || id == seed[2] || id == seed[3]) continue;
            insert(id);
        }
        return finalize();
    }

private:
    const std::vector<Vec3>& pts_;
    std::vector<Tet> tets_;
    std::vector<int> free_;
    std::vector<std::uint32_t> stamp_;
    std::vector<std::uint32_t> tested_;
    std::uint32_t epoch_ = 0;
    int hint_ = 0;
    std::uint64_t rng_ = 0x9e3779b97f4a7c15ULL;
    std::vector<int> duplicates_;

    unsigned next_random() {
        rng_ ^= rng_ << 13;
        rng_ ^= rng_ >> 7;
        rng_ ^= rng_ << 17;
        return static_cast<unsigned>(rng_);
    }

    std::array<int, 4> find_seed(const std::vector<int>& order) {
        const int a = order[0];
        int b = -1;
        for (int id : order)
            if (!(pts_[id] == pts_[a])) { b = id; break; }
        if (b < 0) throw GeometryError("tetrahedralize: all points coincide");
        for (int c : order) {
            if (c == a || c == b) continue;
            if (norm2(cross(pts_[b] - pts_[a], pts_[c] - pts_[a])) == 0.0) continue;
            for (int d : order) {
                if (d == a || d == b || d == c) continue;
                const int o = predicates::orient3d(pts_[a], pts_[b], pts_[c], pts_[d]);
                if (o > 0) return {a, b, c, d};
                if (o < 0) return {a, c, b, d};
            }
        }
        throw GeometryError("tetrahedralize: all points are coplanar");
    }

    int new_tet(const std::array<int, 4>& v) {
        int id;
        if (!free_.empty()) {
            id = free_.back();
            free_.pop_back();
            tets_[id] = Tet{v, {-2, -2, -2, -2}, true};
        } else {
            id = static_cast<int>(tets_.size());
            tets_.push_back(Tet{v, {-2, -2, -2, -2}, true});
            stamp_.push_back(0);
            tested_.push_back(0);
        }
        return id;
    }

    void build_seed(const std::array<int, 4>& s) {
        const int t0 = new_tet(s);
        std::array<int, 4> inf{};
        for (int i = 0; i < 4; ++i) {
            std::array<int, 4> v = s;
            v[i] = kInfinite;
            const int j = (i + 1) % 4, k = (i + 2) % 4;
            std::swap(v[j], v[k]);
            inf[i] = new_tet(v);
            tets_[t0].n[i] = inf[i];
            tets_[inf[i]].n[i] = t0;
        }
        // Face of inf[a] opposite its finite vertex u is shared with the
        // infinite tet whose finite face excludes u, i.e. inf[slot of u in s].
        for (int a = 0; a < 4; ++a) {
            Tet& ta = tets_[inf[a]];
            for (int sa = 0; sa < 4; ++sa) {
                if (ta.v[sa] == kInfinite) continue;
                int u_slot = -1;
                for (int q = 0; q < 4; ++q)
                    if (s[q] == ta.v[sa]) u_slot = q;
                ta.n[sa] = inf[u_slot];
            }
        }
        hint_ = t0;
    }

    bool conflict(int t, const Vec3& p) {
        const Tet& T = tets_[t];
        const int si = T.slot_of(kInfinite);
        if (si < 0) {
            return predicates::insphere(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]], pts_[T.v[3]], p) > 0;
        }
        Vec3 q[4];
        for (int i = 0; i < 4; ++i) q[i] = i == si ? p : pts_[T.v[i]];
        const int o = predicates::orient3d(q[0], q[1], q[2], q[3]);
        if (o != 0) return o > 0;
        const Tet& F = tets_[T.n[si]];
        return predicates::insphere(pts_[F.v[0]], pts_[F.v[1]], pts_[F.v[2]], pts_[F.v[3]], p) > 0;
    }

    // Visibility walk; returns a finite tet containing p or an infinite tet
    // whose hull face sees p.
    int locate(const Vec3& p) {
        int t = hint_;
        if (!tets_[t].alive || tets_[t].infinite()) {
            t = -1;
            for (int i = static_cast<int>(tets_.size()) - 1; i >= 0; --i)
                if (tets_[i].alive && !tets_[i].infinite()) { t = i; break; }
        }
        for (std::size_t steps = 0; steps < 4 * tets_.size() + 16; ++steps) {
            const Tet& T = tets_[t];
            const unsigned start = next_random() & 3u;
            int next = -1;
            for (unsigned r = 0; r < 4; ++r) {
                const int i = static_cast<int>((start + r) & 3u);
                Vec3 q[4];
                for (int k = 0; k < 4; ++k) q[k] = k == i ? p : pts_[T.v[k]];
                if (predicates::orient3d(q[0], q[1], q[2], q[3]) < 0) { next = T.n[i]; break; }
            }
            if (next < 0) return t;
            if (tets_[next].infinite()) return next;
            t = next;
        }
        // Walk failed to settle; scan.
        for (std::size_t i = 0; i < tets_.size(); ++i) {
            if (!tets_[i].alive) continue;
            if (conflict(static_cast<int>(i), p)) return static_cast<int>(i);
        }
        throw GeometryError("tetrahedralize: point location failed");
    }

    struct Face {
        std::array<int, 4> v;
        int slot;
        int nb;
        int nb_slot;
    };

    void insert(int pi) {
        const Vec3& p = pts_[pi];
        const int start = locate(p);
        const Tet& S = tets_[start];
        for (int i = 0; i < 4; ++i)
            if (S.v[i] != kInfinite && pts_[S.v[i]] == p) { duplicates_.push_back(pi); return; }

        ++epoch_;
        std::vector<int> cavity{start};
        stamp_[start] = epoch_;
        std::vector<Face> boundary;
        for (std::size_t c = 0; c < cavity.size(); ++c) {
            const int t = cavity[c];
            for (int i = 0; i < 4; ++i) {
                const int nb = tets_[t].n[i];
                if (stamp_[nb] == epoch_) continue;
                bool in_conflict = false;
                if (tested_[nb] != epoch_) {
                    tested_[nb] = epoch_;
                    in_conflict = conflict(nb, p);
                }
                if (in_conflict) {
                    stamp_[nb] = epoch_;
                    cavity.push_back(nb);
                } else {
                    boundary.push_back({tets_[t].v, i, nb, tets_[nb].slot_of_neighbor(t)});
                }
            }
        }
        // A neighbour tested once as non-conflicting may have been reached from
        // several cavity tets; each such face is a separate boundary record.
        for (int t : cavity) {
            tets_[t].alive = false;
            free_.push_back(t);
        }

        struct Edge {
            int a, b, tet, slot;
        };
        std::vector<Edge> open;
        open.reserve(boundary.size() * 3);
        for (const Face& f : boundary) {
            std::array<int, 4> v = f.v;
            v[f.slot] = pi;
            const int nt = new_tet(v);
            tets_[nt].n[f.slot] = f.nb;
            tets_[f.nb].n[f.nb_slot] = nt;
            if (!tets_[nt].infinite()) hint_ = nt;
            for (int j = 0; j < 4; ++j) {
                if (j == f.slot) continue;
                int a = -3, b = -3;
                for (int k = 0; k < 4; ++k) {
                    if (k == j || k == f.slot) continue;
                    if (a == -3) a = v[k]; else b = v[k];
                }
                if (a > b) std::swap(a, b);
                bool matched = false;
                for (std::size_t e = 0; e < open.size(); ++e) {
                    if (open[e].a == a && open[e].b == b) {
                        tets_[nt].n[j] = open[e].tet;
                        tets_[open[e].tet].n[open[e].slot] = nt;
                        open[e] = open.back();
                        open.pop_back();
                        matched = true;
                        break;
                    }
                }
                if (!matched) open.push_back({a, b, nt, j});
            }
        }
        if (!open.empty()) throw GeometryError("tetrahedralize: cavity is not closed");
    }

    Tetrahedralization finalize() {
        std::vector<int> remap(tets_.size(), -1);
        Tetrahedralization out;
        for (std::size_t i = 0; i < tets_.size(); ++i) {
            if (!tets_[i].alive || tets_[i].infinite()) continue;
            remap[i] = static_cast<int>(out.tets.size());
            out.tets.push_back(tets_[i].v);
        }
        out.neighbors.resize(out.tets.size());
        for (std::size_t i = 0; i < tets_.size(); ++i) {
            if (remap[i] < 0) continue;
            for (int k = 0; k < 4; ++k) out.neighbors[remap[i]][k] = remap[tets_[i].n[k]];
        }
        out.duplicates = duplicates_;
        std::sort(out.duplicates.begin(), out.duplicates.end());
        return out;
    }
};

}  // namespace

std::vector<int> morton_order(const std::vector<Vec3>& pts) {
    if (pts.empty()) return {};
    Vec3 lo = pts[0], hi = pts[0];
    for (const Vec3& p : pts) {
        lo = component_min(lo, p);
        hi = component_max(hi, p);
    }
    const Vec3 ext = hi - lo;
    const double scale = (1 << 21) - 1;
    std::vector<std::uint64_t> code(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::uint64_t c = 0;
        for (int a = 0; a < 3; ++a) {
            const double u = ext[a] > 0.0 ? (pts[i][a] - lo[a]) / ext[a] : 0.0;
            c |= spread_bits(static_cast<std::uint64_t>(u * scale)) << a;
        }
        code[i] = c;
    }
    std::vector<int> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return code[a] < code[b]; });
    return order;
}

Tetrahedralization delaunay_tetrahedralize(const std::vector<Vec3>& points) {
    return Builder(points).run();
}

}  // namespace curvedray
