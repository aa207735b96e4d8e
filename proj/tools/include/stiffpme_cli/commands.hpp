#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>

#include "stiffpme_cli/config.hpp"

namespace stiffpme::cli {

/// Process exit codes.
enum ExitCode : int {
    kExitPass = 0,
    kExitTestFailure = 1,
    kExitConfigError = 2,
    kExitNumericalAbort = 3,
};

/// SPF1 rho_NNN / p_NNN per output frame plus manifest.json.
int simulate_pme_command(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

/// SPF1 p, phi, rhoE, limit per frame, front_NNN.csv polylines, events.csv, manifest.json.
int simulate_hs_command(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

/// Exterior density by characteristics per frame (no congested set) and streamlines.csv.
int transport_command(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

/// m-family against the Hele-Shaw reference: convergence.csv, order.csv, events.csv, final fields.
int converge_command(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

/// Maps exceptions escaping `body` to exit codes: ConfigError and InvalidInput give 2,
/// NumericalAbort, SolverError, EscapeError and OutOfDomain give 3.
int guarded(std::ostream& err, const std::function<int()>& body);

}  // namespace stiffpme::cli
