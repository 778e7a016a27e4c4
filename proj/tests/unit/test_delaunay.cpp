#include <cmath>

#include <gtest/gtest.h>

#include "curvedray/delaunay.hpp"
#include "curvedray/error.hpp"
#include "curvedray/predicates.hpp"
#include "oracles.hpp"

namespace cr = curvedray;

namespace {

double tet_volume(const std::vector<cr::Vec3>& p, const std::array<int, 4>& t) {
    return cr::predicates::orient3d_value(p[t[0]], p[t[1]], p[t[2]], p[t[3]]) / 6.0;
}

double total_volume(const std::vector<cr::Vec3>& p, const cr::Tetrahedralization& tz) {
    double v = 0.0;
    for (const auto& t : tz.tets) v += tet_volume(p, t);
    return v;
}

void expect_neighbor_symmetry(const cr::Tetrahedralization& tz) {
    for (std::size_t t = 0; t < tz.tets.size(); ++t)
        for (int f = 0; f < 4; ++f) {
            const int n = tz.neighbors[t][f];
            if (n < 0) continue;
            int back = 0;
            for (int g = 0; g < 4; ++g) back += tz.neighbors[n][g] == static_cast<int>(t);
            EXPECT_EQ(back, 1);
        }
}

}  // namespace

TEST(Delaunay, RegularTetrahedronWithCentroid) {
    std::vector<cr::Vec3> p{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}, {0, 0, 0}};
    const auto tz = cr::delaunay_tetrahedralize(p);
    EXPECT_EQ(tz.tets.size(), 4u);
    EXPECT_NEAR(total_volume(p, tz), 8.0 / 3.0, 1e-12);
}

TEST(Delaunay, CubeCorners) {
    std::vector<cr::Vec3> p;
    for (int i = 0; i < 8; ++i) p.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
    const auto tz = cr::delaunay_tetrahedralize(p);
    EXPECT_TRUE(tz.tets.size() == 5 || tz.tets.size() == 6);
    EXPECT_NEAR(total_volume(p, tz), 1.0, 1e-9);
    for (const auto& t : tz.tets) EXPECT_GT(tet_volume(p, t), 0.0);
}

TEST(Delaunay, RandomPointsAreDelaunayAndFillTheHull) {
    cr::oracle::Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = rng.integer(20, 120);
        std::vector<cr::Vec3> p;
        for (int i = 0; i < n; ++i) p.push_back(rng.in_box({0, 0, 0}, {10, 7, 5}));
        const auto tz = cr::delaunay_tetrahedralize(p);
        EXPECT_EQ(cr::oracle::circumsphere_violations(p, tz.tets), 0u);
        const double hull = cr::oracle::brute_force_hull_volume(p);
        EXPECT_NEAR(total_volume(p, tz), hull, 1e-9 * hull);
        expect_neighbor_symmetry(tz);
    }
}

TEST(Delaunay, LatticeInputWithCosphericalPoints) {
    std::vector<cr::Vec3> p;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) p.push_back({double(i), double(j), double(k)});
    const auto tz = cr::delaunay_tetrahedralize(p);
    EXPECT_EQ(cr::oracle::circumsphere_violations(p, tz.tets), 0u);
    EXPECT_NEAR(total_volume(p, tz), 27.0, 1e-9);
}

TEST(Delaunay, DuplicatesAreReported) {
    std::vector<cr::Vec3> p{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 0}, {1, 1, 1}};
    const auto tz = cr::delaunay_tetrahedralize(p);
    ASSERT_EQ(tz.duplicates.size(), 1u);
    EXPECT_EQ(tz.duplicates[0], 4);
    for (const auto& t : tz.tets)
        for (int v : t) EXPECT_NE(v, 4);
}

TEST(Delaunay, CoplanarInputIsRejected) {
    std::vector<cr::Vec3> p{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.2, 0}};
    EXPECT_THROW(cr::delaunay_tetrahedralize(p), cr::GeometryError);
    EXPECT_THROW(cr::delaunay_tetrahedralize({{0, 0, 0}, {1, 0, 0}}), cr::GeometryError);
}
