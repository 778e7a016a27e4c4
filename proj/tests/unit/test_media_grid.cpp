#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "curvedray/error.hpp"
#include "curvedray/media_grid.hpp"
#include "curvedray/scenarios.hpp"
#include "oracles.hpp"

namespace cr = curvedray;

namespace {

cr::MediaGrid small_alu(cr::Quantity q) {
    cr::StratifiedProfile p({-1.0, 340.0, 1.0});
    return cr::bake_grid(p, {5, 6, 7}, {0, 0, 0}, {1.0, 1.5, 2.0}, q);
}

}  // namespace

TEST(MediaGrid, ConstantProfileGivesEqualValues) {
    cr::ConstantProfile p(1.0, 340.0);
    const auto g = cr::bake_grid(p, {4, 4, 4}, {}, {1, 1, 1}, cr::Quantity::speed);
    ASSERT_EQ(g.values.size(), 64u);
    for (double v : g.values) EXPECT_EQ(v, 340.0);
}

TEST(MediaGrid, UpwardRefractingIndexIncreasesWithHeight) {
    const auto n = small_alu(cr::Quantity::index);
    const auto c = small_alu(cr::Quantity::speed);
    for (int k = 1; k < n.dims[2]; ++k)
        for (int j = 0; j < n.dims[1]; ++j)
            for (int i = 0; i < n.dims[0]; ++i) {
                EXPECT_GT(n.at(i, j, k), n.at(i, j, k - 1));
                EXPECT_LT(c.at(i, j, k), c.at(i, j, k - 1));
            }
}

TEST(MediaGrid, ConvertedMatchesDirectBake) {
    const auto c = small_alu(cr::Quantity::speed);
    const auto n2 = small_alu(cr::Quantity::index_squared);
    const auto conv = c.converted(cr::Quantity::index_squared);
    for (std::size_t i = 0; i < n2.values.size(); ++i) EXPECT_NEAR(conv.values[i], n2.values[i], 1e-12 * n2.values[i]);
}

TEST(MediaGrid, TrilinearExactForLinearField) {
    cr::LinearSpeedProfile p(340.0, {0.3, -0.2, 0.5});
    const auto g = cr::bake_grid(p, {4, 5, 6}, {-1, 2, 0}, {1.0, 0.5, 2.0}, cr::Quantity::speed);
    cr::oracle::Rng rng(3);
    const auto box = g.bounds();
    for (int i = 0; i < 200; ++i) {
        const cr::Vec3 x = rng.in_box(box.lo, box.hi);
        EXPECT_NEAR(g.sample(x), p.speed(x), 1e-10);
    }
    // Clamped outside the box.
    EXPECT_NEAR(g.sample(box.hi + cr::Vec3{5, 5, 5}), p.speed(box.hi), 1e-10);
}

TEST(MediaGrid, BakeRejectsDegenerateDims) {
    cr::ConstantProfile p;
    EXPECT_THROW(cr::bake_grid(p, {1, 4, 4}, {}, {1, 1, 1}, cr::Quantity::speed), cr::DomainError);
}

TEST(MediaGrid, BinaryAndTextRoundTrip) {
    const auto g = small_alu(cr::Quantity::index);
    for (auto enc : {cr::GridEncoding::binary, cr::GridEncoding::text}) {
        std::stringstream ss;
        cr::write_grid(g, ss, enc);
        const auto r = cr::read_grid(ss);
        EXPECT_EQ(r.dims, g.dims);
        EXPECT_EQ(r.origin, g.origin);
        EXPECT_EQ(r.spacing, g.spacing);
        EXPECT_EQ(r.quantity, g.quantity);
        ASSERT_EQ(r.values.size(), g.values.size());
        for (std::size_t i = 0; i < g.values.size(); ++i) EXPECT_EQ(r.values[i], g.values[i]);
    }
}

TEST(MediaGrid, ReaderRejectsBadInput) {
    {
        std::stringstream ss("not-a-grid 1\n");
        EXPECT_THROW(cr::read_grid(ss), cr::FormatError);
    }
    {
        std::stringstream ss;
        cr::write_grid(small_alu(cr::Quantity::speed), ss, cr::GridEncoding::text);
        std::string text = ss.str();
        text.replace(text.find(" 1"), 2, " 9");
        std::stringstream bad(text);
        EXPECT_THROW(cr::read_grid(bad), cr::VersionError);
    }
    {
        std::stringstream ss;
        cr::write_grid(small_alu(cr::Quantity::speed), ss, cr::GridEncoding::binary);
        std::string text = ss.str();
        std::stringstream truncated(text.substr(0, text.size() - 20));
        EXPECT_THROW(cr::read_grid(truncated), cr::FormatError);
    }
    EXPECT_THROW(cr::read_grid(std::filesystem::path("/nonexistent/dir/g.grid")), cr::IoError);
}

TEST(MediaGrid, ValidateCatchesNonPositiveValues) {
    auto g = small_alu(cr::Quantity::speed);
    g.values[3] = -1.0;
    EXPECT_THROW(g.validate(), cr::FormatError);
}

TEST(DeskScene, SourceAndGroundPlacement) {
    cr::DeskConfig cfg;
    cfg.dims = 9;
    cfg.spacing = 2.0;
    const auto prof = cr::desk_profile(cfg);
    const auto g = cr::desk_grid(prof, cfg);
    EXPECT_EQ(g.dims[0], 9);
    const auto src = cr::desk_source(g, 3.0);
    EXPECT_DOUBLE_EQ(src.x, 8.0);
    EXPECT_DOUBLE_EQ(src.z, 3.0);
    const auto ground = cr::desk_ground(g);
    ASSERT_EQ(ground.triangles.size(), 2u);
    EXPECT_GT(ground.triangles[0].normal().z, 0.99);
}
