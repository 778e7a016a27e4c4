#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "../../tools/cli.hpp"
#include "curvedray/path_io.hpp"

namespace fs = std::filesystem;
namespace cli = curvedray::cli;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("curvedray_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(std::vector<std::string> args) {
        out_.str({});
        err_.str({});
        return cli::run(args, out_, err_);
    }

    static std::string slurp(const std::string& p) {
        std::ifstream is(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(is), {}};
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, PipelineProducesPathCsv) {
    ASSERT_EQ(run({"bake-profile", "--kind", "a-lu", "--dims", "64", "--out", path("g.grid")}),
              cli::kOk)
        << err_.str();
    ASSERT_EQ(run({"build-mesh", "--grid", path("g.grid"), "--sigma", "0.001", "--out", path("m.crmesh")}), cli::kOk)
        << err_.str();
    ASSERT_EQ(run({"trace", "--mesh", path("m.crmesh"), "--fan", "90", "--depth", "3", "--out", path("p.csv")}),
              cli::kOk)
        << err_.str();
    const auto set = curvedray::read_paths(path("p.csv"));
    EXPECT_EQ(set.rays.size(), 90u);
    ASSERT_EQ(run({"step-trace", "--grid", path("g.grid"), "--kind", "a-lu", "--fan", "5", "--ds", "0.5", "--out",
                   path("s.json")}),
              cli::kOk)
        << err_.str();
    EXPECT_EQ(curvedray::read_paths(path("s.json")).rays.size(), 5u);
    ASSERT_EQ(run({"analyze", "--ray-error", "--paths", path("p.csv"), "--truth", path("p.csv"), "--dump-json"}),
              cli::kOk)
        << err_.str();
    EXPECT_NE(out_.str().find("ray_count"), std::string::npos);
}

TEST_F(CliTest, SameSeedGivesIdenticalGrids) {
    for (const char* name : {"a.grid", "b.grid"})
        ASSERT_EQ(run({"bake-profile", "--kind", "a-lu+f", "--seed", "7", "--dims", "9", "--out", path(name)}), cli::kOk);
    ASSERT_EQ(run({"bake-profile", "--kind", "a-lu+f", "--seed", "8", "--dims", "9", "--out", path("c.grid")}), cli::kOk);
    EXPECT_EQ(slurp(path("a.grid")), slurp(path("b.grid")));
    EXPECT_NE(slurp(path("a.grid")), slurp(path("c.grid")));
}

TEST_F(CliTest, InterpolationSweepIsMonotone) {
    ASSERT_EQ(run({"bake-profile", "--kind", "a-lu+f", "--dims", "64", "--out", path("g.grid")}), cli::kOk);
    ASSERT_EQ(run({"analyze", "--interp-error", "--grid", path("g.grid"), "--sigmas", "0.004,0.002,0.001,0.0005",
                   "--out-csv", path("t.csv")}),
              cli::kOk)
        << err_.str();
    std::istringstream table(slurp(path("t.csv")));
    std::string line;
    std::getline(table, line);
    EXPECT_EQ(line, "sigma,samples,grid_points,reduction,e_rel,max_abs,outside");
    std::vector<double> e_rel, samples;
    while (std::getline(table, line)) {
        std::vector<std::string> cols;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
        ASSERT_EQ(cols.size(), 7u);
        samples.push_back(std::stod(cols[1]));
        e_rel.push_back(std::stod(cols[4]));
    }
    ASSERT_EQ(e_rel.size(), 4u);
    for (std::size_t i = 1; i < e_rel.size(); ++i) {
        EXPECT_LT(samples[i - 1], samples[i]);
        EXPECT_LT(e_rel[i], e_rel[i - 1]);
    }
}

TEST_F(CliTest, ConfigFileSuppliesFlags) {
    std::ofstream(path("bake.ini")) << "[bake-profile]\nkind = \"a-ld\"\ndims = 5\nout = \"" << path("cfg.grid")
                                    << "\"\n";
    ASSERT_EQ(run({"--config", path("bake.ini"), "bake-profile"}), cli::kOk) << err_.str();
    EXPECT_TRUE(fs::exists(path("cfg.grid")));
    // The command line wins over the file.
    ASSERT_EQ(run({"--config", path("bake.ini"), "bake-profile", "--out", path("cli.grid")}), cli::kOk);
    EXPECT_TRUE(fs::exists(path("cli.grid")));
}

TEST_F(CliTest, DistinctExitCodes) {
    EXPECT_EQ(run({}), cli::kUsage);
    EXPECT_EQ(run({"trace", "--bogus"}), cli::kUsage);
    EXPECT_EQ(run({"trace", "--mesh", path("missing.crmesh")}), cli::kMissingFile);
    std::ofstream(path("junk.grid")) << "garbage\n";
    EXPECT_EQ(run({"build-mesh", "--grid", path("junk.grid"), "--out", path("m.crmesh")}), cli::kFormat);
    std::ofstream(path("future.grid")) << "curvedray-grid 99\n";
    EXPECT_EQ(run({"build-mesh", "--grid", path("future.grid"), "--out", path("m.crmesh")}), cli::kVersion);
    EXPECT_EQ(run({"bake-profile", "--kind", "nonsense", "--out", path("x.grid")}), cli::kModule);
    EXPECT_FALSE(err_.str().empty());
}

TEST_F(CliTest, DumpJsonOnBake) {
    ASSERT_EQ(run({"bake-profile", "--kind", "constant", "--dims", "3", "--out", path("g.grid"), "--dump-json"}),
              cli::kOk);
    EXPECT_EQ(out_.str().front(), '{');
}
