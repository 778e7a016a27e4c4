#include "oracles.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Dense>

namespace curvedray::oracle {

Vec3 Rng::unit_vector() {
    while (true) {
        const Vec3 v{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
        const double n2 = norm2(v);
        if (n2 > 1e-6 && n2 <= 1.0) return v / std::sqrt(n2);
    }
}

double bisect(const std::function<double(double)>& f, double a, double b, int iterations) {
    double fa = f(a);
    for (int i = 0; i < iterations; ++i) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fa < 0.0) == (fm < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

std::optional<double> first_root(const std::function<double(double)>& f, double lo, double hi, int samples) {
    double x0 = lo, f0 = f(lo);
    for (int i = 1; i <= samples; ++i) {
        const double x1 = lo + (hi - lo) * i / samples;
        const double f1 = f(x1);
        if (f1 == 0.0) return x1;
        if ((f0 < 0.0) != (f1 < 0.0)) return bisect(f, x0, x1);
        x0 = x1;
        f0 = f1;
    }
    return std::nullopt;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 50);
}

std::size_t circumsphere_violations(const std::vector<Vec3>& points, const std::vector<std::array<int, 4>>& tets,
                                    double rel_margin) {
    std::size_t bad = 0;
    for (const auto& t : tets) {
        const Vec3& a = points[t[0]];
        Eigen::Matrix3d m;
        Eigen::Vector3d rhs;
        for (int i = 1; i < 4; ++i) {
            const Vec3 d = points[t[i]] - a;
            m.row(i - 1) << d.x, d.y, d.z;
            rhs(i - 1) = 0.5 * norm2(d);
        }
        const Eigen::Vector3d c = m.fullPivLu().solve(rhs);
        const Vec3 center = a + Vec3{c(0), c(1), c(2)};
        const double r2 = norm2(center - a);
        for (std::size_t p = 0; p < points.size(); ++p) {
            const int pi = static_cast<int>(p);
            if (pi == t[0] || pi == t[1] || pi == t[2] || pi == t[3]) continue;
            if (norm2(points[p] - center) < r2 * (1.0 - rel_margin)) ++bad;
        }
    }
    return bad;
}

double brute_force_hull_volume(const std::vector<Vec3>& points) {
    const std::size_t n = points.size();
    Vec3 inner;
    for (const auto& p : points) inner += p;
    inner = inner / static_cast<double>(n);
    double scale = 0.0;
    for (const auto& p : points) scale = std::max(scale, norm(p - inner));
    const double tol = 1e-12 * scale * scale * scale;
    double volume = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                const Vec3 nrm = cross(points[j] - points[i], points[k] - points[i]);
                bool pos = false, neg = false;
                for (std::size_t q = 0; q < n && !(pos && neg); ++q) {
                    if (q == i || q == j || q == k) continue;
                    const double s = dot(nrm, points[q] - points[i]);
                    if (s > tol) pos = true;
                    if (s < -tol) neg = true;
                }
                if (pos && neg) continue;
                volume += std::fabs(dot(nrm, points[i] - inner)) / 6.0;
            }
    return volume;
}

Vec3 weighted_lsq_gradient(const std::vector<Vec3>& dx, const std::vector<double>& dm, const std::vector<double>& w) {
    const Eigen::Index n = static_cast<Eigen::Index>(dx.size());
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double sw = std::sqrt(w[k]);
        a.row(k) << sw * dx[k].x, sw * dx[k].y, sw * dx[k].z;
        b(k) = sw * dm[k];
    }
    const Eigen::Vector3d g = a.colPivHouseholderQr().solve(b);
    return {g(0), g(1), g(2)};
}

double log_log_slope(const std::vector<double>& h, const std::vector<double>& err) {
    const std::size_t n = h.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(h[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RayState integrate_ray(const std::function<double(const Vec3&)>& n, const std::function<Vec3(const Vec3&)>& grad_n,
                       RayState s, double length, int steps) {
    const double h = length / steps;
    auto f = [&](const RayState& y) { return RayState{y.p / n(y.x), grad_n(y.x)}; };
    for (int i = 0; i < steps; ++i) {
        const RayState k1 = f(s);
        const RayState k2 = f({s.x + k1.x * (0.5 * h), s.p + k1.p * (0.5 * h)});
        const RayState k3 = f({s.x + k2.x * (0.5 * h), s.p + k2.p * (0.5 * h)});
        const RayState k4 = f({s.x + k3.x * h, s.p + k3.p * h});
        s.x += (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x) * (h / 6.0);
        s.p += (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p) * (h / 6.0);
    }
    return s;
}

}  // namespace curvedray::oracle
