#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stiffpme_cli/commands.hpp"
#include "stiffpme_cli/output.hpp"
#include "stiffpme_cli/verify.hpp"

namespace cli = stiffpme::cli;

namespace {

struct Args {
    std::string config;
    std::string out;
    std::string tier;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> suites;
};

void common_flags(CLI::App* sub, Args& a, bool config_required) {
    auto* c = sub->add_option("--config", a.config, "TOML run configuration");
    if (config_required) c->required();
    sub->add_option("--seed", a.seed, "override run.seed");
    sub->add_option("--tier", a.tier, "smoke or desk")->check(CLI::IsMember({"smoke", "desk"}));
}

int run_simulation(cli::Command command, const Args& a) {
    return cli::guarded(std::cerr, [&] {
        cli::RunConfig config = cli::parse_config(a.config, command);
        if (a.seed) config.seed = *a.seed;
        // Without --tier the config runs as written.
        if (!a.tier.empty()) cli::apply_tier(config, cli::parse_tier(a.tier));
        switch (command) {
            case cli::Command::kSimulatePme: return cli::simulate_pme_command(config, a.out, std::cout);
            case cli::Command::kSimulateHs: return cli::simulate_hs_command(config, a.out, std::cout);
            case cli::Command::kTransport: return cli::transport_command(config, a.out, std::cout);
            case cli::Command::kConverge: return cli::converge_command(config, a.out, std::cout);
            case cli::Command::kVerify: break;
        }
        return static_cast<int>(cli::kExitConfigError);
    });
}

int run_verify(const Args& a) {
    return cli::guarded(std::cerr, [&] {
        cli::VerifyOptions opts;
        if (!a.config.empty()) {
            const cli::RunConfig config = cli::parse_config(a.config, cli::Command::kVerify);
            opts.tier = config.tier;
            opts.seed = config.seed;
            opts.suites = config.suites;
        }
        if (!a.tier.empty()) opts.tier = cli::parse_tier(a.tier);
        if (a.seed) opts.seed = *a.seed;
        if (!a.suites.empty() && !(a.suites.size() == 1 && a.suites.front() == "all")) opts.suites = a.suites;

        const auto results = cli::verify_all(opts);
        const std::string csv = cli::verify_csv(results);
        if (a.out.empty()) {
            std::cout << csv;
        } else {
            cli::RunDirectory dir(a.out);
            dir.write_text("verify.csv", csv);
            nlohmann::json m;
            m["format"] = "stiffpme-manifest/1";
            m["command"] = "verify";
            m["tier"] = cli::tier_name(opts.tier);
            m["seed"] = opts.seed;
            m["suites"] = opts.suites;
            dir.write_manifest(m);
        }
        int failed = 0;
        for (const auto& r : results) {
            if (!r.passed) {
                ++failed;
                std::cerr << "FAIL " << r.suite << "/" << r.test << ": worst " << cli::fmt(r.worst) << " > "
                          << cli::fmt(r.tolerance) << " (" << r.detail << ")\n";
            }
        }
        std::cerr << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " checks passed ("
                  << cli::tier_name(opts.tier) << " tier)\n";
        return failed == 0 ? static_cast<int>(cli::kExitPass) : static_cast<int>(cli::kExitTestFailure);
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stiffpme: porous-medium family, Hele-Shaw limit and verification harness"};
    app.require_subcommand(1);
    Args a;

    struct Sim {
        const char* name;
        const char* help;
        cli::Command command;
    };
    const Sim sims[] = {
        {"simulate-pme", "run the drift porous-medium equation at one exponent", cli::Command::kSimulatePme},
        {"simulate-hs", "run the Hele-Shaw free-boundary problem", cli::Command::kSimulateHs},
        {"transport", "exterior density and streamlines by characteristics", cli::Command::kTransport},
        {"converge", "m-family against the Hele-Shaw reference", cli::Command::kConverge},
    };
    std::vector<std::pair<CLI::App*, cli::Command>> subs;
    for (const auto& s : sims) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        common_flags(sub, a, true);
        sub->add_option("--out", a.out, "output directory")->required();
        subs.emplace_back(sub, s.command);
    }
    CLI::App* verify = app.add_subcommand("verify", "run the property suites and emit a pass/fail table");
    common_flags(verify, a, false);
    verify->add_option("--out", a.out, "directory for verify.csv (stdout when omitted)");
    verify->add_option("--suite", a.suites, "suite name, repeatable; all by default");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(cli::kExitConfigError);
    }

    if (verify->parsed()) {
        if (!a.config.empty() && !std::filesystem::exists(a.config)) {
            std::cerr << "usage error: config file " << a.config << " does not exist\n";
            return cli::kExitConfigError;
        }
        return run_verify(a);
    }
    for (const auto& [sub, command] : subs) {
        if (sub->parsed()) return run_simulation(command, a);
    }
    return cli::kExitConfigError;
}
