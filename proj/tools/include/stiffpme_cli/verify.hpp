#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stiffpme/grid.hpp"
#include "stiffpme_cli/config.hpp"

namespace stiffpme::cli {

/// One row of the verify table. A test passes when worst <= tolerance and worst is finite.
struct VerifyResult {
    std::string suite;
    std::string test;
    bool passed = false;
    double worst = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

using LaplacianFn = std::function<ScalarField(const ScalarField&)>;

struct VerifyOptions {
    Tier tier = Tier::kSmoke;
    std::uint64_t seed = 1;
    std::vector<std::string> suites;  ///< empty runs every suite
    /// Stencil under test in the grid suite; replaced by test fixtures for negative controls.
    LaplacianFn laplacian;
};

/// core_grid, flow, pme, hele_shaw, barriers, geometry, convergence.
std::vector<std::string> suite_names();

/// Throws ConfigError for an unknown suite name.
std::vector<VerifyResult> run_suite(const std::string& name, const VerifyOptions& options);

/// Every requested suite in suite_names() order.
std::vector<VerifyResult> verify_all(const VerifyOptions& options);

/// Columns suite,test,status,worst,tolerance,detail.
std::string verify_csv(const std::vector<VerifyResult>& results);

bool all_passed(const std::vector<VerifyResult>& results);

}  // namespace stiffpme::cli
