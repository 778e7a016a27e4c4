#include "curvedray/resample.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "curvedray/error.hpp"

namespace curvedray {

namespace {

double min_spacing(const MediaGrid& g) { return std::min({g.spacing.x, g.spacing.y, g.spacing.z}); }

// Hash of accepted samples on cells of size `cell` for proximity queries.
class SpatialHash {
public:
    SpatialHash(const Vec3& origin, double cell) : origin_(origin), cell_(cell) {}

    void insert(const Vec3& p, int id) { buckets_[key(cell_of(p))].push_back(id); }

    bool any_within(const Vec3& p, double radius, const std::vector<SamplePoint>& pts) const {
        const auto c = cell_of(p);
        const int reach = static_cast<int>(std::ceil(radius / cell_));
        const double r2 = radius * radius;
        for (int dz = -reach; dz <= reach; ++dz)
            for (int dy = -reach; dy <= reach; ++dy)
                for (int dx = -reach; dx <= reach; ++dx) {
                    auto it = buckets_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
                    if (it == buckets_.end()) continue;
                    for (int id : it->second)
                        if (norm2(pts[id].position - p) < r2) return true;
                }
        return false;
    }

private:
    Vec3 origin_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<int>> buckets_;

    std::array<int, 3> cell_of(const Vec3& p) const {
        return {static_cast<int>(std::floor((p.x - origin_.x) / cell_)),
                static_cast<int>(std::floor((p.y - origin_.y) / cell_)),
                static_cast<int>(std::floor((p.z - origin_.z) / cell_))};
    }
    static std::uint64_t key(const std::array<int, 3>& c) {
        auto u = [](int v) { return static_cast<std::uint64_t>(static_cast<std::uint32_t>(v + (1 << 20))) & 0x1fffffu; };
        return u(c[0]) | (u(c[1]) << 21) | (u(c[2]) << 42);
    }
};

}  // namespace

double effective_d_min(const MediaGrid& grid, const ResampleParams& p) {
    return p.d_min > 0.0 ? p.d_min : min_spacing(grid);
}

double effective_d_max(const MediaGrid& grid, const ResampleParams& p) {
    return p.d_max > 0.0 ? p.d_max : 0.25 * grid.bounds().diagonal();
}

std::vector<double> compute_spacing_field(const MediaGrid& grid, const ResampleParams& p) {
    grid.validate();
    if (!(p.sigma > 0.0)) throw DomainError("resample: sigma must be positive");
    const double d_min = effective_d_min(grid, p);
    const double d_max = effective_d_max(grid, p);
    if (!(d_min > 0.0) || d_max < d_min) throw DomainError("resample: need 0 < d_min <= d_max");

    std::vector<double> k(grid.size());
    for (std::size_t i = 0; i < k.size(); ++i)
        k[i] = convert_quantity(grid.values[i], grid.quantity, Quantity::index, grid.reference_speed);

    std::vector<double> d(grid.size());
    const auto& n = grid.dims;
    for (int kz = 0; kz < n[2]; ++kz)
        for (int jy = 0; jy < n[1]; ++jy)
            for (int ix = 0; ix < n[0]; ++ix) {
                const int idx[3] = {ix, jy, kz};
                Vec3 g;
                for (int a = 0; a < 3; ++a) {
                    int lo[3] = {ix, jy, kz}, hi[3] = {ix, jy, kz};
                    lo[a] = std::max(idx[a] - 1, 0);
                    hi[a] = std::min(idx[a] + 1, n[a] - 1);
                    g[a] = (k[grid.linear_index(hi[0], hi[1], hi[2])] - k[grid.linear_index(lo[0], lo[1], lo[2])]) /
                           ((hi[a] - lo[a]) * grid.spacing[a]);
                }
                const double gn = norm(g);
                const double raw = gn > 0.0 ? std::sqrt(4.0 * p.sigma / gn) : d_max;
                d[grid.linear_index(ix, jy, kz)] = std::clamp(raw, d_min, d_max);
            }
    return d;
}

std::vector<SamplePoint> resample_fcc(const MediaGrid& grid, const std::vector<double>& spacing,
                                      const ResampleParams&, Quantity quantity, ResampleStats* stats) {
    grid.validate();
    if (spacing.size() != grid.size()) throw DomainError("resample: spacing field does not match grid");
    const Box3 box = grid.bounds();
    const double h = min_spacing(grid);
    const auto& n = grid.dims;

    std::vector<char> covered(grid.size(), 0);
    std::vector<SamplePoint> out;
    SpatialHash hash(box.lo, std::max(h, 1e-12));
    ResampleStats st;

    auto nearest = [&](const Vec3& x, int a) {
        return std::clamp(static_cast<int>(std::lround((x[a] - grid.origin[a]) / grid.spacing[a])), 0, n[a] - 1);
    };
    auto value_at = [&](const Vec3& x) {
        return convert_quantity(grid.sample(x), grid.quantity, quantity, grid.reference_speed);
    };

    // Visit grid points inside the open ball B(x, r) plus the nearest one.
    auto for_ball = [&](const Vec3& x, double r, auto&& fn) {
        int lo[3], hi[3];
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::max(0, static_cast<int>(std::ceil((x[a] - r - grid.origin[a]) / grid.spacing[a])));
            hi[a] = std::min(n[a] - 1, static_cast<int>(std::floor((x[a] + r - grid.origin[a]) / grid.spacing[a])));
        }
        const double r2 = r * r;
        for (int k = lo[2]; k <= hi[2]; ++k)
            for (int j = lo[1]; j <= hi[1]; ++j)
                for (int i = lo[0]; i <= hi[0]; ++i)
                    if (norm2(grid.position(i, j, k) - x) < r2)
                        if (!fn(grid.linear_index(i, j, k))) return false;
        return fn(grid.linear_index(nearest(x, 0), nearest(x, 1), nearest(x, 2)));
    };

    static const Vec3 kFcc[12] = {{1, 1, 0}, {1, -1, 0}, {-1, 1, 0}, {-1, -1, 0},
                                  {1, 0, 1}, {1, 0, -1}, {-1, 0, 1}, {-1, 0, -1},
                                  {0, 1, 1}, {0, 1, -1}, {0, -1, 1}, {0, -1, -1}};

    std::deque<Vec3> queue;
    auto try_site = [&](Vec3 x, bool gap_seed) {
        for (int a = 0; a < 3; ++a) x[a] = std::clamp(x[a], box.lo[a], box.hi[a]);
        const std::size_t gi = grid.linear_index(nearest(x, 0), nearest(x, 1), nearest(x, 2));
        if (covered[gi]) { ++st.rejected; return; }
        const double d = spacing[gi];
        const bool free = gap_seed || for_ball(x, 0.5 * d, [&](std::size_t idx) { return covered[idx] == 0; });
        if (!free || hash.any_within(x, (1.0 - 1e-9) * std::min(d, h), out)) { ++st.rejected; return; }
        for_ball(x, 0.5 * d, [&](std::size_t idx) { covered[idx] = 1; return true; });
        hash.insert(x, static_cast<int>(out.size()));
        out.push_back({x, value_at(x), d});
        ++st.accepted;
        const double step = d / std::sqrt(2.0);
        for (const Vec3& e : kFcc) queue.push_back(x + e * step);
    };

    queue.push_back(box.center());
    std::size_t scan = 0;
    while (true) {
        while (!queue.empty()) {
            const Vec3 x = queue.front();
            queue.pop_front();
            try_site(x, false);
        }
        while (scan < covered.size() && covered[scan]) ++scan;
        if (scan == covered.size()) break;
        const int i = static_cast<int>(scan % n[0]);
        const int j = static_cast<int>((scan / n[0]) % n[1]);
        const int k = static_cast<int>(scan / (static_cast<std::size_t>(n[0]) * n[1]));
        ++st.gap_seeds;
        const std::size_t before = out.size();
        try_site(grid.position(i, j, k), true);
        // A seed blocked only by the proximity guard still counts as covered.
        if (out.size() == before) covered[scan] = 1;
    }

    st.accepted = out.size();
    if (stats) *stats = st;
    return out;
}

void add_box_corners(const MediaGrid& grid, const std::vector<double>& spacing, Quantity quantity,
                     std::vector<SamplePoint>& samples) {
    const Box3 box = grid.bounds();
    const double snap = 0.25 * min_spacing(grid);
    for (int c = 0; c < 8; ++c) {
        const Vec3 corner{(c & 1) ? box.hi.x : box.lo.x, (c & 2) ? box.hi.y : box.lo.y,
                          (c & 4) ? box.hi.z : box.lo.z};
        samples.erase(std::remove_if(samples.begin(), samples.end(),
                                     [&](const SamplePoint& s) { return distance(s.position, corner) < snap; }),
                      samples.end());
        const int i = (c & 1) ? grid.dims[0] - 1 : 0;
        const int j = (c & 2) ? grid.dims[1] - 1 : 0;
        const int k = (c & 4) ? grid.dims[2] - 1 : 0;
        const double v = convert_quantity(grid.at(i, j, k), grid.quantity, quantity, grid.reference_speed);
        samples.push_back({corner, v, spacing[grid.linear_index(i, j, k)]});
    }
}

}  // namespace curvedray
