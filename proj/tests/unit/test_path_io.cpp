#include <sstream>

#include <gtest/gtest.h>

#include "curvedray/error.hpp"
#include "curvedray/gradient.hpp"
#include "curvedray/path_io.hpp"
#include "curvedray/scenarios.hpp"

namespace cr = curvedray;

namespace {

cr::PathSet sample_set() {
    cr::StratifiedProfile prof({1.0, 340.0, 1.0});
    const auto g = cr::bake_grid(prof, {9, 9, 9}, {}, {2, 2, 2}, cr::Quantity::speed);
    const auto mesh = cr::build_mesh(g, cr::desk_ground(g), 0.001, cr::GradientMethod::regression);
    const auto paths = cr::trace_fan(mesh, {8, 8, 3}, cr::elevation_fan({-0.6, 0.0, 0.4}, 0.2), {});
    return cr::make_path_set(paths, "curved", 3);
}

void expect_same(const cr::PathSet& a, const cr::PathSet& b) {
    EXPECT_EQ(a.source, b.source);
    ASSERT_EQ(a.rays.size(), b.rays.size());
    for (std::size_t i = 0; i < a.rays.size(); ++i) {
        const auto& x = a.rays[i];
        const auto& y = b.rays[i];
        EXPECT_EQ(x.origin, y.origin);
        EXPECT_EQ(x.direction, y.direction);
        EXPECT_EQ(x.end_point, y.end_point);
        EXPECT_EQ(x.end_direction, y.end_direction);
        EXPECT_EQ(x.termination, y.termination);
        EXPECT_EQ(x.total_travel, y.total_travel);
        EXPECT_EQ(x.points, y.points);
        ASSERT_EQ(x.events.size(), y.events.size());
        for (std::size_t k = 0; k < x.events.size(); ++k) {
            EXPECT_EQ(x.events[k].position, y.events[k].position);
            EXPECT_EQ(x.events[k].reflected, y.events[k].reflected);
            EXPECT_EQ(x.events[k].surface_id, y.events[k].surface_id);
            EXPECT_EQ(x.events[k].travel, y.events[k].travel);
        }
    }
}

}  // namespace

TEST(PathIo, RecordsSampleEverySegment) {
    const auto set = sample_set();
    ASSERT_EQ(set.rays.size(), 3u);
    EXPECT_FALSE(set.rays[0].events.empty());
    for (const auto& r : set.rays) {
        ASSERT_GE(r.points.size(), 2u);
        EXPECT_EQ(r.points.front()[3], 0.0);
        EXPECT_NEAR(r.points.back()[3], r.total_travel, 1e-9 * r.total_travel);
        for (std::size_t k = 1; k < r.points.size(); ++k) EXPECT_GE(r.points[k][3], r.points[k - 1][3]);
    }
}

TEST(PathIo, CsvJsonBinaryRoundTrip) {
    const auto set = sample_set();
    {
        std::stringstream ss;
        cr::write_paths_csv(set, ss);
        expect_same(set, cr::read_paths_csv(ss));
    }
    {
        std::stringstream ss;
        cr::write_paths_json(set, ss);
        EXPECT_NE(ss.str().find("\"segment_media_value\""), std::string::npos);
        expect_same(set, cr::read_paths_json(ss));
    }
    {
        std::stringstream ss;
        cr::write_paths_binary(set, ss);
        expect_same(set, cr::read_paths_binary(ss));
    }
}

TEST(PathIo, CsvHeaderIsStable) {
    std::stringstream ss;
    cr::write_paths_csv(sample_set(), ss);
    std::string header;
    std::getline(ss, header);
    EXPECT_EQ(header, "ray,record,index,x,y,z,s,dx,dy,dz,termination,source,surface_id");
}

TEST(PathIo, SummaryPathsKeepEndpoints) {
    const auto set = sample_set();
    const auto paths = cr::summary_paths(set);
    ASSERT_EQ(paths.size(), set.rays.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        EXPECT_EQ(paths[i].end_point, set.rays[i].end_point);
        EXPECT_EQ(paths[i].total_travel, set.rays[i].total_travel);
        EXPECT_TRUE(paths[i].segments.empty());
    }
}

TEST(PathIo, FormatSelection) {
    EXPECT_EQ(cr::path_format_for("a/b.csv"), cr::PathFormat::csv);
    EXPECT_EQ(cr::path_format_for("b.json"), cr::PathFormat::json);
    EXPECT_EQ(cr::path_format_for("b.crpath"), cr::PathFormat::binary);
    EXPECT_EQ(cr::parse_path_format("json"), cr::PathFormat::json);
    EXPECT_THROW(cr::parse_path_format("xml"), cr::FormatError);
}

TEST(PathIo, RejectsBadInput) {
    std::stringstream ss;
    cr::write_paths_binary(sample_set(), ss);
    std::string bytes = ss.str();
    bytes[8] = 7;
    std::stringstream bad(bytes);
    EXPECT_THROW(cr::read_paths_binary(bad), cr::VersionError);
    std::stringstream json(R"({"format": "curvedray-paths", "version": 2, "rays": []})");
    EXPECT_THROW(cr::read_paths_json(json), cr::VersionError);
    std::stringstream csv("not,a,path,file\n");
    EXPECT_THROW(cr::read_paths_csv(csv), cr::FormatError);
    EXPECT_THROW(cr::read_paths("/nonexistent/paths.csv"), cr::IoError);
}
