#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stiffpme/flow.hpp"
#include "stiffpme/grid.hpp"
#include "stiffpme/hele_shaw.hpp"
#include "stiffpme/initial_data.hpp"
#include "stiffpme/pme.hpp"

namespace stiffpme::cli {

enum class Command { kSimulatePme, kSimulateHs, kTransport, kConverge, kVerify };

std::string command_name(Command c);

/// Every violation found while reading or validating a config, each prefixed by its key path.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

enum class Tier { kSmoke, kDesk };

Tier parse_tier(const std::string& s);
std::string tier_name(Tier t);

struct GridConfig {
    int dim = 2;
    int cells = 128;  ///< per axis
    double lower = -1.0;
    double upper = 1.0;

    GridSpec spec() const { return GridSpec::box(dim, cells, lower, upper); }
};

struct RunConfig {
    GridConfig grid;
    std::string preset = "constant";
    PresetParams drift;  ///< source entries included
    RegularData initial;

    double m = 40.0;
    PmeOptions pme;
    HsOptions hs;

    double t_end = 1.0;
    std::vector<double> output_times;
    std::uint64_t seed = 1;

    std::vector<double> m_list{5.0, 10.0, 20.0, 40.0, 80.0};
    int uniform_margin = 2;
    bool run_hs = true;

    std::vector<Vec2> anchors;  ///< streamline anchors for the transport command
    double flow_step = 0.0;     ///< 0 selects default_flow_step

    Tier tier = Tier::kSmoke;
    std::vector<std::string> suites;  ///< empty means all

    DriftModel model() const;
};

/// Largest per-axis cell count a smoke-tier simulation runs at.
inline constexpr int kSmokeCells = 64;

/// Records `tier` and, for smoke, coarsens the grid to at most kSmokeCells per axis.
/// The physical box and every time parameter are left alone.
void apply_tier(RunConfig& config, Tier tier);

/// Strict parse: unknown keys, wrong types and every constraint of `command` are collected and
/// thrown together as ConfigError. Missing keys take the defaults above.
RunConfig parse_config_text(std::string_view text, Command command);
/// Throws ConfigError if the file cannot be read.
RunConfig parse_config(const std::filesystem::path& path, Command command);

/// Constraint check of a parsed config for one command; empty when valid.
std::vector<std::string> validate(const RunConfig& config, Command command);

/// Fully defaulted config as JSON, for manifests.
nlohmann::json config_echo(const RunConfig& config);

}  // namespace stiffpme::cli
