#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "glbe/cli.hpp"
#include "test_support.hpp"

using glbe::Quantity;
using glbe::cli::Command;
using glbe::test::expect_rel;

namespace {

struct Invocation {
    int status = 0;
    std::string out;
    std::string err;
};

glbe::cli::ParseOutcome parse_args(std::vector<std::string> args, std::string* err_text = nullptr) {
    args.insert(args.begin(), "glbe");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    auto outcome = glbe::cli::parse(static_cast<int>(argv.size()), argv.data(), out, err);
    if (err_text) *err_text = err.str();
    return outcome;
}

Invocation invoke(std::vector<std::string> args) {
    Invocation result;
    const auto parsed = parse_args(std::move(args), &result.err);
    if (!parsed.spec) {
        result.status = parsed.exit_code;
        return result;
    }
    std::ostringstream out, err;
    result.status = glbe::cli::execute(*parsed.spec, out, err);
    result.out = out.str();
    result.err += err.str();
    return result;
}

// Table rows (header first) with comment lines removed, split on commas.
std::vector<std::vector<std::string>> table_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    EXPECT_NE(it, header.end()) << "missing column " << name;
    return static_cast<std::size_t>(it - header.begin());
}

std::filesystem::path scratch_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("glbe_cli_test_" + name);
}

}  // namespace

TEST(CliParse, GammaProblem) {
    const auto parsed = parse_args({"profile", "--model", "gamma:k=2", "--d", "3", "--c", "0.75"});
    ASSERT_TRUE(parsed.spec);
    const glbe::TransportProblem p = parsed.spec->problem();
    EXPECT_EQ(p.model().family(), glbe::Family::gamma);
    EXPECT_EQ(p.model().parameter(), 2.0);
    EXPECT_EQ(p.d(), 3.0);
    EXPECT_EQ(p.c(), 0.75);
    EXPECT_EQ(parsed.spec->command, Command::profile);
}

TEST(CliParse, RejectsBadProblems) {
    std::string err;
    EXPECT_EQ(parse_args({"profile", "--c", "1.0"}, &err).exit_code, 2);
    EXPECT_NE(err.find("non-multiplying medium"), std::string::npos) << err;
    EXPECT_EQ(parse_args({"profile", "--model", "betaprime:k=2"}, &err).exit_code, 2);
    EXPECT_NE(err.find("k must exceed 2"), std::string::npos) << err;
    EXPECT_EQ(parse_args({"profile", "--model", "lognormal"}).exit_code, 2);
    EXPECT_EQ(parse_args({"bogus"}).exit_code, 2);
    EXPECT_EQ(parse_args({}).exit_code, 2);
    EXPECT_EQ(parse_args({"audit", "--m", "3"}).exit_code, 2);
    EXPECT_EQ(parse_args({"profile", "--r", "0.5,-1"}).exit_code, 2);
    EXPECT_EQ(parse_args({"profile", "--order", "0"}).exit_code, 2);
    EXPECT_EQ(parse_args({"profile", "--flavors", "p2"}).exit_code, 2);
    EXPECT_EQ(parse_args({"profile", "--mc", "--d", "2.5"}).exit_code, 2);
    EXPECT_EQ(parse_args({"profile", "--unknown-flag"}).exit_code, 2);
    EXPECT_EQ(parse_args({"--help"}).exit_code, 0);
}

TEST(CliParse, GridsListsAndFlavors) {
    const auto grid = parse_args({"profile", "--r-min", "1", "--r-max", "3", "--points", "5"});
    ASSERT_TRUE(grid.spec);
    EXPECT_EQ(grid.spec->r_grid, (std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0}));

    const auto lists = parse_args({"audit", "--r", "0.5,2", "--m", "0,2,6", "--flavors", "p1,rigorous", "--quantity",
                                   "flux", "--order", "3"});
    ASSERT_TRUE(lists.spec);
    EXPECT_EQ(lists.spec->r_grid, (std::vector<double>{0.5, 2.0}));
    EXPECT_EQ(lists.spec->moments, (std::vector<int>{0, 2, 6}));
    EXPECT_TRUE(lists.spec->wants(glbe::Flavor::p1));
    EXPECT_FALSE(lists.spec->wants(glbe::Flavor::grosjean));
    EXPECT_EQ(lists.spec->quantity, Quantity::flux);
    EXPECT_EQ(lists.spec->order, 3);
}

TEST(CliParse, ConfigFileWithFlagOverrides) {
    const auto path = scratch_file("run.cfg");
    {
        std::ofstream f(path);
        f << "command = spectrum\nmodel = \"gamma:k=2\"\nd = 2\nc = 0.6\nseed = 77\n";
    }
    const auto from_file = parse_args({"--config", path.string()});
    ASSERT_TRUE(from_file.spec);
    EXPECT_EQ(from_file.spec->command, Command::spectrum);
    EXPECT_EQ(from_file.spec->model, "gamma:k=2");
    EXPECT_EQ(from_file.spec->d, 2.0);
    EXPECT_EQ(from_file.spec->c, 0.6);
    EXPECT_EQ(from_file.spec->seed, 77u);

    const auto overridden = parse_args({"audit", "--config", path.string(), "--c", "0.9"});
    ASSERT_TRUE(overridden.spec);
    EXPECT_EQ(overridden.spec->command, Command::audit);
    EXPECT_EQ(overridden.spec->c, 0.9);
    EXPECT_EQ(overridden.spec->d, 2.0);

    {
        std::ofstream f(path);
        f << "command = profile\nalbedo = 0.5\n";
    }
    EXPECT_EQ(parse_args({"--config", path.string()}).exit_code, 2);
    std::filesystem::remove(path);
}

TEST(CliParse, WorkerCountFromEnvironment) {
    ::setenv("GLBE_WORKERS", "3", 1);
    const auto from_env = parse_args({"mc"});
    const auto from_flag = parse_args({"mc", "--workers", "2"});
    ::unsetenv("GLBE_WORKERS");
    ASSERT_TRUE(from_env.spec && from_flag.spec);
    EXPECT_EQ(from_env.spec->workers, 3u);
    EXPECT_EQ(from_flag.spec->workers, 2u);
}

TEST(CliExecute, ExponentialSpectrum) {
    const Invocation run = invoke({"spectrum", "--model", "exp", "--d", "3", "--c", "0.9"});
    ASSERT_EQ(run.status, 0) << run.err;
    const auto rows = table_rows(run.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"index", "nu0", "chi", "residual", "weight_collision", "weight_flux",
                                                 "breakdown"}));
    EXPECT_NEAR(std::stod(rows[1][column(rows[0], "chi")]), 0.525429, 1e-5);
    EXPECT_EQ(rows[1][column(rows[0], "breakdown")], "0");
}

TEST(CliExecute, FourDimensionalBreakdownRow) {
    const Invocation run = invoke({"spectrum", "--model", "exp", "--d", "4", "--c", "0.5"});
    ASSERT_EQ(run.status, 0) << run.err;
    const auto rows = table_rows(run.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NEAR(std::stod(rows[1][column(rows[0], "nu0")]), 1.0, 1e-12);
    EXPECT_NEAR(std::stod(rows[1][column(rows[0], "weight_collision")]), 0.0, 1e-12);
    EXPECT_EQ(rows[1][column(rows[0], "breakdown")], "1");

    EXPECT_EQ(invoke({"spectrum", "--model", "exp", "--d", "4", "--c", "0.5", "--require-rigorous"}).status, 5);
    const Invocation profile =
        invoke({"profile", "--model", "exp", "--d", "4", "--c", "0.5", "--r", "1", "--require-rigorous"});
    EXPECT_EQ(profile.status, 5);
    EXPECT_NE(profile.err.find("broke down"), std::string::npos);
    const auto prows = table_rows(profile.out);
    ASSERT_EQ(prows.size(), 2u);
    EXPECT_EQ(prows[1][column(prows[0], "rigorous")], "NA");
}

TEST(CliExecute, PearsonFluxAudit) {
    const Invocation run = invoke({"audit", "--model", "pearson", "--d", "3", "--c", "0.5", "--m", "2", "--quantity", "flux"});
    ASSERT_EQ(run.status, 0) << run.err;
    const auto rows = table_rows(run.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"m", "exact", "approx_p1", "approx_grosjean", "mc", "mc_err"}));
    expect_rel(std::stod(rows[1][column(rows[0], "exact")]), 8.0 / 3.0, 1e-10);
    EXPECT_EQ(rows[1][column(rows[0], "mc")], "NA");
}

TEST(CliExecute, ProfileColumnsAndSentinels) {
    const Invocation run = invoke({"profile", "--model", "exp", "--d", "3", "--c", "0.5", "--r", "0.5,1,2", "--flavors",
                                   "p1,grosjean", "--mc", "--histories", "4000", "--seed", "5"});
    ASSERT_EQ(run.status, 0) << run.err;
    EXPECT_EQ(run.out.rfind("# glbe ", 0), 0u);
    EXPECT_NE(run.out.find("# model: exp\n"), std::string::npos);
    EXPECT_NE(run.out.find("seed=5"), std::string::npos);
    const auto rows = table_rows(run.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"r", "exact", "p1", "grosjean", "rigorous", "mc", "mc_err",
                                                 "rel_err_p1", "rel_err_grosjean", "rel_err_rigorous"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_EQ(rows[i].size(), rows[0].size());
        EXPECT_EQ(rows[i][column(rows[0], "rigorous")], "NA");
        for (const auto& cell : rows[i]) {
            EXPECT_FALSE(cell.empty());
            if (cell != "NA") { EXPECT_TRUE(std::isfinite(std::stod(cell))) << cell; }
        }
        const double exact = std::stod(rows[i][1]);
        const double mc = std::stod(rows[i][column(rows[0], "mc")]);
        const double err = std::stod(rows[i][column(rows[0], "mc_err")]);
        EXPECT_LT(std::abs(mc - exact), 5.0 * err + 0.02 * exact);
        const double p1 = std::stod(rows[i][2]);
        expect_rel(std::stod(rows[i][column(rows[0], "rel_err_p1")]), (p1 - exact) / exact, 1e-9);
    }
}

TEST(CliExecute, ExactOnlyAndNumericFallback) {
    const std::vector<std::string> args = {"profile", "--model", "chi:k=2", "--d", "2", "--c", "0.5", "--r", "1"};
    const Invocation fallback = invoke(args);
    EXPECT_EQ(fallback.status, 0) << fallback.err;
    auto strict = args;
    strict.push_back("--exact-only");
    const Invocation refused = invoke(strict);
    EXPECT_EQ(refused.status, 3);
    EXPECT_TRUE(refused.out.empty());
    EXPECT_NE(refused.err.find("closed form"), std::string::npos);
}

TEST(CliExecute, MomentsAndInvertAgreeWithClosedForms) {
    const Invocation moments = invoke({"moments", "--model", "exp", "--d", "3", "--c", "0.5", "--m", "0,2"});
    ASSERT_EQ(moments.status, 0) << moments.err;
    auto rows = table_rows(moments.out);
    ASSERT_EQ(rows.size(), 3u);
    expect_rel(std::stod(rows[1][1]), 2.0, 1e-12);
    expect_rel(std::stod(rows[2][1]), 8.0, 1e-12);
    expect_rel(std::stod(rows[2][2]), 8.0, 1e-8);

    const Invocation invert = invoke({"invert", "--model", "exp", "--d", "3", "--c", "0.5", "--r", "1"});
    const Invocation profile = invoke({"profile", "--model", "exp", "--d", "3", "--c", "0.5", "--r", "1"});
    ASSERT_EQ(invert.status, 0) << invert.err;
    expect_rel(std::stod(table_rows(invert.out)[1][1]), std::stod(table_rows(profile.out)[1][1]), 1e-9);
}

TEST(CliExecute, ByteIdenticalAcrossRunsAndWorkers) {
    const std::vector<std::string> args = {"audit", "--model", "gamma:k=2", "--d", "2", "--c", "0.6", "--m",
                                           "0,2,4", "--mc", "--histories", "5000", "--seed", "11"};
    auto with_workers = [&](const char* w) {
        auto a = args;
        a.insert(a.end(), {"--workers", w});
        return invoke(a).out;
    };
    const std::string first = with_workers("1");
    EXPECT_FALSE(first.empty());
    EXPECT_EQ(first, with_workers("1"));
    EXPECT_EQ(first, with_workers("3"));
}

TEST(CliExecute, TallyFileRoundTrip) {
    const auto path = scratch_file("tallies.txt");
    const Invocation run = invoke({"mc", "--model", "exp", "--d", "3", "--c", "0.5", "--histories", "3000", "--r", "4",
                                   "--shells", "8", "--out", path.string()});
    ASSERT_EQ(run.status, 0) << run.err;
    EXPECT_TRUE(run.out.empty());
    std::ifstream in(path);
    const glbe::TallySet t = glbe::read_tallies(in);
    EXPECT_EQ(t.histories_run(), 3000u);
    EXPECT_EQ(t.shells(), 8);
    EXPECT_DOUBLE_EQ(t.shell_edges().back(), 4.0);
    std::filesystem::remove(path);
}
