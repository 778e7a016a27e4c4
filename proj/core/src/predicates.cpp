#include "curvedray/predicates.hpp"

#include <atomic>
#include <cmath>
#include <vector>

namespace curvedray::predicates {
namespace {

// Expansion arithmetic after Shewchuk, "Adaptive Precision Floating-Point
// Arithmetic and Fast Robust Geometric Predicates" (1997). An expansion is a
// sum of non-overlapping doubles stored in increasing magnitude.

constexpr double kEpsilon = 0x1p-53;
constexpr double kSplitter = 134217729.0;  // 2^27 + 1

std::atomic<long long> g_exact_calls{0};

inline void two_sum(double a, double b, double& x, double& y) {
    x = a + b;
    const double bv = x - a;
    const double av = x - bv;
    y = (a - av) + (b - bv);
}

inline void fast_two_sum(double a, double b, double& x, double& y) {
    x = a + b;
    y = b - (x - a);
}

inline void two_diff(double a, double b, double& x, double& y) {
    x = a - b;
    const double bv = a - x;
    const double av = x + bv;
    y = (a - av) + (bv - b);
}

inline void split(double a, double& hi, double& lo) {
    const double c = kSplitter * a;
    const double abig = c - a;
    hi = c - abig;
    lo = a - hi;
}

inline void two_product(double a, double b, double& x, double& y) {
    x = a * b;
    double ahi, alo, bhi, blo;
    split(a, ahi, alo);
    split(b, bhi, blo);
    const double err1 = x - (ahi * bhi);
    const double err2 = err1 - (alo * bhi);
    const double err3 = err2 - (ahi * blo);
    y = (alo * blo) - err3;
}

using Expansion = std::vector<double>;

Expansion sum(const Expansion& e, const Expansion& f) {
    // fast_expansion_sum_zeroelim
    Expansion h;
    h.reserve(e.size() + f.size());
    std::size_t ei = 0, fi = 0;
    double q, qnew, hh;
    auto take = [&](std::size_t& idx, const Expansion& src) { return src[idx++]; };
    auto e_first = [&]() {
        if (ei >= e.size()) return false;
        if (fi >= f.size()) return true;
        const double en = e[ei], fn = f[fi];
        return (fn > en) == (fn > -en);
    };
    if (e.empty()) return f;
    if (f.empty()) return e;
    q = e_first() ? take(ei, e) : take(fi, f);
    if (ei < e.size() && fi < f.size()) {
        const double now = e_first() ? take(ei, e) : take(fi, f);
        fast_two_sum(now, q, qnew, hh);
        q = qnew;
        if (hh != 0.0) h.push_back(hh);
        while (ei < e.size() && fi < f.size()) {
            const double n2 = e_first() ? take(ei, e) : take(fi, f);
            two_sum(q, n2, qnew, hh);
            q = qnew;
            if (hh != 0.0) h.push_back(hh);
        }
    }
    while (ei < e.size()) {
        two_sum(q, e[ei++], qnew, hh);
        q = qnew;
        if (hh != 0.0) h.push_back(hh);
    }
    while (fi < f.size()) {
        two_sum(q, f[fi++], qnew, hh);
        q = qnew;
        if (hh != 0.0) h.push_back(hh);
    }
    if (q != 0.0 || h.empty()) h.push_back(q);
    return h;
}

Expansion scale(const Expansion& e, double b) {
    // scale_expansion_zeroelim
    Expansion h;
    h.reserve(2 * e.size());
    double q, hh, p1, p0, s;
    two_product(e[0], b, q, hh);
    if (hh != 0.0) h.push_back(hh);
    for (std::size_t i = 1; i < e.size(); ++i) {
        two_product(e[i], b, p1, p0);
        two_sum(q, p0, s, hh);
        if (hh != 0.0) h.push_back(hh);
        fast_two_sum(p1, s, q, hh);
        if (hh != 0.0) h.push_back(hh);
    }
    if (q != 0.0 || h.empty()) h.push_back(q);
    return h;
}

Expansion product(const Expansion& a, const Expansion& b) {
    Expansion acc{0.0};
    for (double bj : b) {
        if (bj != 0.0) acc = sum(acc, scale(a, bj));
    }
    return acc;
}

Expansion negate(Expansion e) {
    for (double& v : e) v = -v;
    return e;
}

Expansion difference(double a, double b) {
    double x, y;
    two_diff(a, b, x, y);
    if (y == 0.0) return {x};
    return {y, x};
}

int sign_of(const Expansion& e) {
    for (auto it = e.rbegin(); it != e.rend(); ++it) {
        if (*it > 0.0) return 1;
        if (*it < 0.0) return -1;
    }
    return 0;
}

struct ExactPoint {
    Expansion x, y, z;
};

ExactPoint exact_diff(const Vec3& a, const Vec3& b) {
    return {difference(a.x, b.x), difference(a.y, b.y), difference(a.z, b.z)};
}

// det of rows (p, q, r)
Expansion det3(const ExactPoint& p, const ExactPoint& q, const ExactPoint& r) {
    const Expansion m1 = sum(product(q.y, r.z), negate(product(q.z, r.y)));
    const Expansion m2 = sum(product(q.z, r.x), negate(product(q.x, r.z)));
    const Expansion m3 = sum(product(q.x, r.y), negate(product(q.y, r.x)));
    return sum(sum(product(p.x, m1), product(p.y, m2)), product(p.z, m3));
}

int orient3d_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    g_exact_calls.fetch_add(1, std::memory_order_relaxed);
    return sign_of(det3(exact_diff(b, a), exact_diff(c, a), exact_diff(d, a)));
}

int insphere_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
    g_exact_calls.fetch_add(1, std::memory_order_relaxed);
    const ExactPoint pa = exact_diff(a, e);
    const ExactPoint pb = exact_diff(b, e);
    const ExactPoint pc = exact_diff(c, e);
    const ExactPoint pd = exact_diff(d, e);
    auto lift = [](const ExactPoint& p) {
        return sum(sum(product(p.x, p.x), product(p.y, p.y)), product(p.z, p.z));
    };
    // Cofactor expansion of det[[p - e, |p - e|^2]] along the lift column.
    const Expansion la = lift(pa), lb = lift(pb), lc = lift(pc), ld = lift(pd);
    const Expansion ma = det3(pb, pc, pd);
    const Expansion mb = det3(pa, pc, pd);
    const Expansion mc = det3(pa, pb, pd);
    const Expansion md = det3(pa, pb, pc);
    // det4 = -la*ma + lb*mb - lc*mc + ld*md
    const Expansion det = sum(sum(negate(product(la, ma)), product(lb, mb)),
                              sum(negate(product(lc, mc)), product(ld, md)));
    // det4 < 0 inside for a positively oriented tetrahedron.
    return -sign_of(det);
}

}  // namespace

double orient3d_value(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return dot(b - a, cross(c - a, d - a));
}

int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    const double bax = b.x - a.x, bay = b.y - a.y, baz = b.z - a.z;
    const double cax = c.x - a.x, cay = c.y - a.y, caz = c.z - a.z;
    const double dax = d.x - a.x, day = d.y - a.y, daz = d.z - a.z;
    const double m1a = cay * daz, m1b = caz * day;
    const double m2a = caz * dax, m2b = cax * daz;
    const double m3a = cax * day, m3b = cay * dax;
    const double det = bax * (m1a - m1b) + bay * (m2a - m2b) + baz * (m3a - m3b);
    const double permanent = std::fabs(bax) * (std::fabs(m1a) + std::fabs(m1b)) +
                             std::fabs(bay) * (std::fabs(m2a) + std::fabs(m2b)) +
                             std::fabs(baz) * (std::fabs(m3a) + std::fabs(m3b));
    const double bound = 16.0 * kEpsilon * permanent;
    if (det > bound) return 1;
    if (-det > bound) return -1;
    return orient3d_exact(a, b, c, d);
}

int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
    const Vec3 pa = a - e, pb = b - e, pc = c - e, pd = d - e;
    auto minor = [](const Vec3& p, const Vec3& q, const Vec3& r, double& perm) {
        const double m1a = q.y * r.z, m1b = q.z * r.y;
        const double m2a = q.z * r.x, m2b = q.x * r.z;
        const double m3a = q.x * r.y, m3b = q.y * r.x;
        perm = std::fabs(p.x) * (std::fabs(m1a) + std::fabs(m1b)) +
               std::fabs(p.y) * (std::fabs(m2a) + std::fabs(m2b)) +
               std::fabs(p.z) * (std::fabs(m3a) + std::fabs(m3b));
        return p.x * (m1a - m1b) + p.y * (m2a - m2b) + p.z * (m3a - m3b);
    };
    double pma, pmb, pmc, pmd;
    const double ma = minor(pb, pc, pd, pma);
    const double mb = minor(pa, pc, pd, pmb);
    const double mc = minor(pa, pb, pd, pmc);
    const double md = minor(pa, pb, pc, pmd);
    const double la = norm2(pa), lb = norm2(pb), lc = norm2(pc), ld = norm2(pd);
    const double det = (lb * mb - la * ma) + (ld * md - lc * mc);
    const double permanent = la * pma + lb * pmb + lc * pmc + ld * pmd;
    const double bound = 32.0 * kEpsilon * permanent;
    if (det > bound) return -1;
    if (-det > bound) return 1;
    return insphere_exact(a, b, c, d, e);
}

long long exact_fallback_count() { return g_exact_calls.load(std::memory_order_relaxed); }

}  // namespace curvedray::predicates
