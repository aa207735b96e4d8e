#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stiffpme_cli/commands.hpp"
#include "stiffpme_cli/config.hpp"
#include "stiffpme_cli/output.hpp"
#include "stiffpme_cli/verify.hpp"

using namespace stiffpme;
using namespace stiffpme::cli;
namespace fs = std::filesystem;

namespace {

constexpr const char* kMinimalPatch = R"(
[grid]
cells = 32

[source]
f = 1.0

[initial]
disks = [{ center = [0.0, 0.0], radius = 0.3 }]
)";

std::vector<std::string> violations_of(std::string_view text, Command c) {
    try {
        parse_config_text(text, c);
    } catch (const ConfigError& e) {
        return e.violations();
    }
    return {};
}

bool mentions(const std::vector<std::string>& v, std::string_view needle) {
    for (const auto& s : v) {
        if (s.find(needle) != std::string::npos) return true;
    }
    return false;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = fs::temp_directory_path() / ("stiffpme_test_" + tag + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
        fs::remove_all(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

}  // namespace

TEST(Config, MinimalPatchTakesDefaults) {
    const RunConfig c = parse_config_text(kMinimalPatch, Command::kSimulatePme);
    EXPECT_EQ(c.grid.cells, 32);
    EXPECT_EQ(c.grid.dim, 2);
    EXPECT_EQ(c.grid.lower, -1.0);
    EXPECT_EQ(c.preset, "constant");
    EXPECT_EQ(c.m, 40.0);
    EXPECT_EQ(c.t_end, 1.0);
    ASSERT_EQ(c.initial.disks.size(), 1u);
    EXPECT_EQ(c.initial.disks.front().radius, 0.3);
    EXPECT_EQ(c.drift.source, 1.0);
    EXPECT_EQ((std::vector<double>{5.0, 10.0, 20.0, 40.0, 80.0}), c.m_list);
}

TEST(Config, ExteriorDensityOfOneIsRejected) {
    const auto v = violations_of(R"(
[grid]
cells = 32
[initial]
bumps = [{ center = [0.0, 0.0], radius = 0.3, amplitude = 1.0 }]
)",
                                 Command::kSimulatePme);
    ASSERT_FALSE(v.empty());
    EXPECT_TRUE(mentions(v, "regular data"));
}

TEST(Config, NonPositiveCompressionRateIsRejectedForTheLimitSolver) {
    const auto v = violations_of(R"(
[grid]
cells = 32
[source]
f = -0.5
[initial]
disks = [{ center = [0.0, 0.0], radius = 0.3 }]
)",
                                 Command::kSimulateHs);
    ASSERT_FALSE(v.empty());
    EXPECT_TRUE(mentions(v, "F"));
}

TEST(Config, EveryViolationIsCollected) {
    const auto v = violations_of(R"(
[grid]
cells = 2
colour = "red"
[run]
t_end = -1.0
[pme]
m = 0.5
)",
                                 Command::kSimulatePme);
    EXPECT_GE(v.size(), 4u);
    EXPECT_TRUE(mentions(v, "grid.colour"));
    EXPECT_TRUE(mentions(v, "run.t_end"));
    EXPECT_TRUE(mentions(v, "pme.m"));
}

TEST(Config, UnknownTableAndWrongTypeAreRejected) {
    EXPECT_TRUE(mentions(violations_of("[plot]\nwidth = 3\n", Command::kVerify), "plot"));
    EXPECT_TRUE(mentions(violations_of("[grid]\ncells = \"many\"\n", Command::kVerify), "grid.cells"));
}

TEST(Config, MissingFileIsAConfigError) {
    EXPECT_THROW(parse_config("/nonexistent/stiffpme.toml", Command::kVerify), ConfigError);
}

TEST(Config, TierNames) {
    EXPECT_EQ(parse_tier("smoke"), Tier::kSmoke);
    EXPECT_EQ(parse_tier("desk"), Tier::kDesk);
    EXPECT_EQ(tier_name(Tier::kDesk), "desk");
    EXPECT_THROW(parse_tier("huge"), ConfigError);
}

TEST(Config, SmokeTierCoarsensOnlyTheGrid) {
    RunConfig c = parse_config_text(kMinimalPatch, Command::kSimulatePme);
    c.grid.cells = 200;
    const double t_end = c.t_end;
    apply_tier(c, Tier::kSmoke);
    EXPECT_EQ(c.grid.cells, kSmokeCells);
    EXPECT_EQ(c.grid.lower, -1.0);
    EXPECT_EQ(c.t_end, t_end);
    apply_tier(c, Tier::kDesk);
    EXPECT_EQ(c.grid.cells, kSmokeCells);
    EXPECT_EQ(c.tier, Tier::kDesk);
    c.grid.cells = 32;
    apply_tier(c, Tier::kSmoke);
    EXPECT_EQ(c.grid.cells, 32);
}

TEST(Config, EchoIsFullyDefaulted) {
    const nlohmann::json j = config_echo(parse_config_text(kMinimalPatch, Command::kSimulatePme));
    EXPECT_EQ(j.at("grid").at("cells"), 32);
    EXPECT_TRUE(j.contains("pme"));
    EXPECT_TRUE(j.contains("hs"));
}

TEST(Output, Fnv1aReferenceVectors) {
    EXPECT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
    EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
    EXPECT_EQ(hex64(fnv1a64("foobar")), "85944171f73967e8");
}

TEST(Output, ShortestRoundTripNumbers) {
    EXPECT_EQ(fmt(0.1), "0.1");
    EXPECT_EQ(fmt(1.0), "1");
    EXPECT_EQ(std::stod(fmt(1.0 / 3.0)), 1.0 / 3.0);
    EXPECT_EQ(frame_name("rho", 3, "spf1"), "rho_003.spf1");
}

TEST(Output, CsvHeaders) {
    EXPECT_EQ(events_csv({}).substr(0, events_csv({}).find('\n')), "time,cells,x,y,new_component");
    const std::string conv = convergence_csv({{5.0, 0.5, 0.1, 0.2, 0.3, 0.4}});
    EXPECT_EQ(conv.substr(0, conv.find('\n')), "m,t,l1_error,sup_error,pressure_error,pressure_max");
    EXPECT_NE(conv.find("5,0.5,0.1,0.2,0.3,0.4"), std::string::npos);
    const std::string order = order_csv({});
    EXPECT_EQ(order.substr(0, order.find('\n')), "m_from,m_to,t,l1_from,l1_to,ratio,observed_order,zone_gap");
    Polyline tri{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, true};
    const std::string poly = polylines_csv({tri});
    EXPECT_EQ(poly.substr(0, poly.find('\n')), "polyline,closed,x,y");
    EXPECT_EQ(std::count(poly.begin(), poly.end(), '\n'), 4);
}

TEST(Output, ManifestListsChecksums) {
    TempDir tmp("manifest");
    RunDirectory dir(tmp.path());
    dir.write_text("b.txt", "hello");
    dir.write_text("a.txt", "");
    dir.write_manifest({{"command", "test"}});
    const nlohmann::json m = nlohmann::json::parse(slurp(tmp.path() / "manifest.json"));
    ASSERT_EQ(m.at("outputs").size(), 2u);
    EXPECT_EQ(m.at("outputs")[0].at("file"), "a.txt");
    EXPECT_EQ(m.at("outputs")[0].at("fnv1a64"), "cbf29ce484222325");
    EXPECT_EQ(m.at("outputs")[1].at("bytes"), 5);
}

TEST(Commands, SimulatePmeIsDeterministic) {
    RunConfig c = parse_config_text(kMinimalPatch, Command::kSimulatePme);
    c.m = 5.0;
    c.t_end = 0.05;
    c.output_times = {0.025};
    TempDir a("det_a"), b("det_b");
    std::ostringstream log;
    ASSERT_EQ(simulate_pme_command(c, a.path(), log), kExitPass);
    ASSERT_EQ(simulate_pme_command(c, b.path(), log), kExitPass);
    EXPECT_EQ(slurp(a.path() / "manifest.json"), slurp(b.path() / "manifest.json"));
    EXPECT_TRUE(fs::exists(a.path() / "rho_000.spf1"));
    EXPECT_TRUE(fs::exists(a.path() / "p_002.spf1"));
}

TEST(Commands, SimulateHsWritesFramesAndEvents) {
    RunConfig c = parse_config_text(kMinimalPatch, Command::kSimulateHs);
    c.t_end = 0.1;
    TempDir out("hs");
    std::ostringstream log;
    ASSERT_EQ(simulate_hs_command(c, out.path(), log), kExitPass);
    EXPECT_TRUE(fs::exists(out.path() / "events.csv"));
    EXPECT_TRUE(fs::exists(out.path() / "phi_001.spf1"));
    const nlohmann::json m = nlohmann::json::parse(slurp(out.path() / "manifest.json"));
    EXPECT_EQ(m.at("command"), "simulate-hs");
    EXPECT_TRUE(m.contains("max_pressure_residual"));
}

TEST(Commands, GuardedMapsExceptionsToExitCodes) {
    std::ostringstream err;
    EXPECT_EQ(guarded(err, [] { return 0; }), kExitPass);
    EXPECT_EQ(guarded(err, [] { return 1; }), kExitTestFailure);
    EXPECT_EQ(guarded(err, []() -> int { throw ConfigError({"grid.cells: too small"}); }), kExitConfigError);
    EXPECT_EQ(guarded(err, []() -> int { throw InvalidInput("bad"); }), kExitConfigError);
    EXPECT_EQ(guarded(err, []() -> int { throw NumericalAbort("boundary"); }), kExitNumericalAbort);
    EXPECT_EQ(guarded(err, []() -> int { throw SolverError("stalled", 1e-3); }), kExitNumericalAbort);
    EXPECT_EQ(guarded(err, []() -> int { throw OutOfDomain("outside"); }), kExitNumericalAbort);
    EXPECT_NE(err.str().find("grid.cells"), std::string::npos);
}

TEST(Verify, SuiteNamesAndUnknownSuite) {
    const auto names = suite_names();
    EXPECT_EQ(names.size(), 7u);
    EXPECT_EQ(names.front(), "core_grid");
    EXPECT_THROW(run_suite("plumbing", {}), ConfigError);
}

TEST(Verify, GridSuitePassesWithTheRealStencil) {
    const auto results = run_suite("core_grid", {});
    ASSERT_FALSE(results.empty());
    EXPECT_TRUE(all_passed(results));
}

TEST(Verify, BrokenStencilFailsTheLaplacianChecks) {
    VerifyOptions opts;
    opts.laplacian = [](const ScalarField& u) { return 0.9 * laplacian(u); };
    const auto results = run_suite("core_grid", opts);
    EXPECT_FALSE(all_passed(results));
    int failing_laplacian = 0;
    for (const auto& r : results) {
        if (r.test.find("laplacian") != std::string::npos) {
            failing_laplacian += r.passed ? 0 : 1;
        } else {
            EXPECT_TRUE(r.passed) << r.test;
        }
    }
    EXPECT_GE(failing_laplacian, 2);
    const std::string csv = verify_csv(results);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "suite,test,status,worst,tolerance,detail");
    EXPECT_NE(csv.find("FAIL"), std::string::npos);
}
