#include "stiffpme_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <toml.hpp>

namespace stiffpme::cli {

namespace {

std::string join(const std::vector<std::string>& lines) {
    std::string out = "invalid configuration:";
    for (const auto& l : lines) out += "\n  " + l;
    return out;
}

std::string key_path(std::string_view table, std::string_view key) {
    return table.empty() ? std::string(key) : std::string(table) + "." + std::string(key);
}

/// Collects violations instead of stopping at the first one.
class Reader {
public:
    std::vector<std::string> errors;
    int dim = 2;

    void allow(const toml::table& t, std::string_view path, std::initializer_list<std::string_view> keys) {
        for (const auto& [k, v] : t) {
            const std::string_view name = k.str();
            if (std::find(keys.begin(), keys.end(), name) == keys.end()) {
                errors.push_back(key_path(path, name) + ": unknown key");
            }
        }
    }

    const toml::table* table(const toml::table& root, std::string_view key) {
        const toml::node* n = root.get(key);
        if (!n) return nullptr;
        if (!n->is_table()) {
            errors.push_back(std::string(key) + ": expected a table");
            return nullptr;
        }
        return n->as_table();
    }

    void number(const toml::table& t, std::string_view path, std::string_view key, double& out) {
        const toml::node* n = t.get(key);
        if (!n) return;
        if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) {
            out = *v;
        } else {
            errors.push_back(key_path(path, key) + ": expected a number");
        }
    }

    void integer(const toml::table& t, std::string_view path, std::string_view key, std::int64_t& out) {
        const toml::node* n = t.get(key);
        if (!n) return;
        if (n->is_integer()) {
            out = *n->value<std::int64_t>();
        } else {
            errors.push_back(key_path(path, key) + ": expected an integer");
        }
    }

    void integer(const toml::table& t, std::string_view path, std::string_view key, int& out) {
        std::int64_t v = out;
        integer(t, path, key, v);
        out = static_cast<int>(v);
    }

    void boolean(const toml::table& t, std::string_view path, std::string_view key, bool& out) {
        const toml::node* n = t.get(key);
        if (!n) return;
        if (n->is_boolean()) {
            out = *n->value<bool>();
        } else {
            errors.push_back(key_path(path, key) + ": expected a boolean");
        }
    }

    void string(const toml::table& t, std::string_view path, std::string_view key, std::string& out) {
        const toml::node* n = t.get(key);
        if (!n) return;
        if (n->is_string()) {
            out = *n->value<std::string>();
        } else {
            errors.push_back(key_path(path, key) + ": expected a string");
        }
    }

    bool point(const toml::node& n, const std::string& path, Vec2& out) {
        const toml::array* a = n.as_array();
        if (!a || static_cast<int>(a->size()) != dim) {
            errors.push_back(path + ": expected an array of " + std::to_string(dim) + " numbers");
            return false;
        }
        double c[2] = {0.0, 0.0};
        for (std::size_t k = 0; k < a->size(); ++k) {
            auto v = (*a)[k].value<double>();
            if (!v) {
                errors.push_back(path + ": expected numbers");
                return false;
            }
            c[k] = *v;
        }
        out = {c[0], c[1]};
        return true;
    }

    void point(const toml::table& t, std::string_view path, std::string_view key, Vec2& out) {
        if (const toml::node* n = t.get(key)) point(*n, key_path(path, key), out);
    }

    void numbers(const toml::table& t, std::string_view path, std::string_view key, std::vector<double>& out) {
        const toml::node* n = t.get(key);
        if (!n) return;
        const toml::array* a = n->as_array();
        if (!a) {
            errors.push_back(key_path(path, key) + ": expected an array of numbers");
            return;
        }
        out.clear();
        for (const auto& e : *a) {
            auto v = e.value<double>();
            if (!v) {
                errors.push_back(key_path(path, key) + ": expected an array of numbers");
                return;
            }
            out.push_back(*v);
        }
    }

    void strings(const toml::table& t, std::string_view path, std::string_view key, std::vector<std::string>& out) {
        const toml::node* n = t.get(key);
        if (!n) return;
        const toml::array* a = n->as_array();
        if (!a) {
            errors.push_back(key_path(path, key) + ": expected an array of strings");
            return;
        }
        out.clear();
        for (const auto& e : *a) {
            auto v = e.value<std::string>();
            if (!v) {
                errors.push_back(key_path(path, key) + ": expected an array of strings");
                return;
            }
            out.push_back(*v);
        }
    }

    /// Array of tables; calls fn(table, path) for each element.
    template <class Fn>
    void each_table(const toml::table& t, std::string_view path, std::string_view key, Fn&& fn) {
        const toml::node* n = t.get(key);
        if (!n) return;
        const toml::array* a = n->as_array();
        if (!a) {
            errors.push_back(key_path(path, key) + ": expected an array of tables");
            return;
        }
        for (std::size_t k = 0; k < a->size(); ++k) {
            const std::string p = key_path(path, key) + "[" + std::to_string(k) + "]";
            if (const toml::table* e = (*a)[k].as_table()) {
                fn(*e, p);
            } else {
                errors.push_back(p + ": expected a table");
            }
        }
    }
};

void read_document(const toml::table& root, RunConfig& c, Reader& r) {
    r.allow(root, "", {"grid", "drift", "source", "initial", "pme", "hs", "run", "family", "transport", "verify"});

    if (const auto* t = r.table(root, "grid")) {
        r.allow(*t, "grid", {"dim", "cells", "lower", "upper"});
        r.integer(*t, "grid", "dim", c.grid.dim);
        r.integer(*t, "grid", "cells", c.grid.cells);
        r.number(*t, "grid", "lower", c.grid.lower);
        r.number(*t, "grid", "upper", c.grid.upper);
    }
    r.dim = (c.grid.dim == 1) ? 1 : 2;

    if (const auto* t = r.table(root, "drift")) {
        r.allow(*t, "drift", {"preset", "velocity", "omega", "rate", "shear"});
        r.string(*t, "drift", "preset", c.preset);
        r.point(*t, "drift", "velocity", c.drift.velocity);
        r.number(*t, "drift", "omega", c.drift.omega);
        r.number(*t, "drift", "rate", c.drift.rate);
        r.number(*t, "drift", "shear", c.drift.shear);
    }

    if (const auto* t = r.table(root, "source")) {
        r.allow(*t, "source", {"f", "F"});
        if (t->contains("f") && t->contains("F")) r.errors.push_back("source: give either f or F, not both");
        if (t->contains("F")) {
            r.number(*t, "source", "F", c.drift.source);
            c.drift.source_is_F = true;
        } else {
            r.number(*t, "source", "f", c.drift.source);
        }
    }

    if (const auto* t = r.table(root, "initial")) {
        r.allow(*t, "initial", {"disks", "boxes", "bumps", "uniform_exterior"});
        r.each_table(*t, "initial", "disks", [&](const toml::table& e, const std::string& p) {
            r.allow(e, p, {"center", "radius"});
            DiskPatch d;
            r.point(e, p, "center", d.center);
            r.number(e, p, "radius", d.radius);
            if (!(d.radius > 0.0)) r.errors.push_back(p + ".radius: must be positive");
            c.initial.disks.push_back(d);
        });
        r.each_table(*t, "initial", "boxes", [&](const toml::table& e, const std::string& p) {
            r.allow(e, p, {"lo", "hi"});
            BoxPatch b;
            r.point(e, p, "lo", b.lo);
            r.point(e, p, "hi", b.hi);
            if (!(b.hi.x > b.lo.x) || (r.dim == 2 && !(b.hi.y > b.lo.y))) {
                r.errors.push_back(p + ": hi must exceed lo on every axis");
            }
            c.initial.boxes.push_back(b);
        });
        r.each_table(*t, "initial", "bumps", [&](const toml::table& e, const std::string& p) {
            r.allow(e, p, {"center", "radius", "amplitude"});
            Bump b;
            r.point(e, p, "center", b.center);
            r.number(e, p, "radius", b.radius);
            r.number(e, p, "amplitude", b.amplitude);
            if (!(b.radius > 0.0)) r.errors.push_back(p + ".radius: must be positive");
            if (b.amplitude < 0.0) r.errors.push_back(p + ".amplitude: must be nonnegative");
            c.initial.bumps.push_back(b);
        });
        r.number(*t, "initial", "uniform_exterior", c.initial.uniform_exterior);
    }

    if (const auto* t = r.table(root, "pme")) {
        r.allow(*t, "pme", {"m", "scheme", "dt_safety", "boundary_margin"});
        r.number(*t, "pme", "m", c.m);
        std::string scheme = c.pme.scheme == PmeScheme::kExplicit ? "explicit" : "semi-implicit";
        r.string(*t, "pme", "scheme", scheme);
        if (scheme == "explicit") {
            c.pme.scheme = PmeScheme::kExplicit;
        } else if (scheme == "semi-implicit") {
            c.pme.scheme = PmeScheme::kSemiImplicit;
        } else {
            r.errors.push_back("pme.scheme: expected \"explicit\" or \"semi-implicit\"");
        }
        r.number(*t, "pme", "dt_safety", c.pme.dt_safety);
        r.integer(*t, "pme", "boundary_margin", c.pme.boundary_margin);
    }

    if (const auto* t = r.table(root, "hs")) {
        r.allow(*t, "hs", {"cfl", "dt_max", "dt_min", "near_one", "reinit_every", "extension_band",
                           "boundary_margin", "tolerance"});
        r.number(*t, "hs", "cfl", c.hs.cfl);
        r.number(*t, "hs", "dt_max", c.hs.dt_max);
        r.number(*t, "hs", "dt_min", c.hs.dt_min);
        r.number(*t, "hs", "near_one", c.hs.near_one);
        r.integer(*t, "hs", "reinit_every", c.hs.reinit_every);
        r.integer(*t, "hs", "extension_band", c.hs.extension_band);
        r.integer(*t, "hs", "boundary_margin", c.hs.boundary_margin);
        r.number(*t, "hs", "tolerance", c.hs.pressure.tolerance);
    }

    if (const auto* t = r.table(root, "run")) {
        r.allow(*t, "run", {"t_end", "output_times", "seed"});
        r.number(*t, "run", "t_end", c.t_end);
        r.numbers(*t, "run", "output_times", c.output_times);
        std::int64_t seed = static_cast<std::int64_t>(c.seed);
        r.integer(*t, "run", "seed", seed);
        if (seed < 0) r.errors.push_back("run.seed: must be nonnegative");
        c.seed = static_cast<std::uint64_t>(seed);
    }

    if (const auto* t = r.table(root, "family")) {
        r.allow(*t, "family", {"m_list", "margin", "run_hs"});
        r.numbers(*t, "family", "m_list", c.m_list);
        r.integer(*t, "family", "margin", c.uniform_margin);
        r.boolean(*t, "family", "run_hs", c.run_hs);
    }

    if (const auto* t = r.table(root, "transport")) {
        r.allow(*t, "transport", {"anchors", "step"});
        if (const toml::node* n = t->get("anchors")) {
            if (const toml::array* a = n->as_array()) {
                for (std::size_t k = 0; k < a->size(); ++k) {
                    Vec2 p;
                    if (r.point((*a)[k], "transport.anchors[" + std::to_string(k) + "]", p)) c.anchors.push_back(p);
                }
            } else {
                r.errors.push_back("transport.anchors: expected an array of points");
            }
        }
        r.number(*t, "transport", "step", c.flow_step);
    }

    if (const auto* t = r.table(root, "verify")) {
        r.allow(*t, "verify", {"tier", "suites"});
        std::string tier = tier_name(c.tier);
        r.string(*t, "verify", "tier", tier);
        if (tier == "smoke" || tier == "desk") {
            c.tier = parse_tier(tier);
        } else {
            r.errors.push_back("verify.tier: expected \"smoke\" or \"desk\"");
        }
        r.strings(*t, "verify", "suites", c.suites);
    }
}

bool needs_hs(const RunConfig& c, Command command) {
    return command == Command::kSimulateHs || (command == Command::kConverge && c.run_hs);
}

}  // namespace

std::string command_name(Command c) {
    switch (c) {
        case Command::kSimulatePme: return "simulate-pme";
        case Command::kSimulateHs: return "simulate-hs";
        case Command::kTransport: return "transport";
        case Command::kConverge: return "converge";
        case Command::kVerify: return "verify";
    }
    return "unknown";
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

Tier parse_tier(const std::string& s) {
    if (s == "smoke") return Tier::kSmoke;
    if (s == "desk") return Tier::kDesk;
    throw ConfigError({"tier: expected smoke or desk, got \"" + s + "\""});
}

std::string tier_name(Tier t) { return t == Tier::kSmoke ? "smoke" : "desk"; }

void apply_tier(RunConfig& config, Tier tier) {
    config.tier = tier;
    if (tier == Tier::kSmoke) config.grid.cells = std::min(config.grid.cells, kSmokeCells);
}

DriftModel RunConfig::model() const { return make_drift(preset, grid.dim, drift); }

std::vector<std::string> validate(const RunConfig& c, Command command) {
    std::vector<std::string> v;
    const auto& g = c.grid;
    if (g.dim != 1 && g.dim != 2) v.push_back("grid.dim: must be 1 or 2");
    if (g.cells < 4) v.push_back("grid.cells: must be at least 4");
    if (!(g.upper > g.lower)) v.push_back("grid.upper: must exceed grid.lower");

    const auto presets = drift_preset_names();
    const bool preset_ok = std::find(presets.begin(), presets.end(), c.preset) != presets.end();
    if (!preset_ok) v.push_back("drift.preset: unknown preset \"" + c.preset + "\"");

    if (!(c.t_end > 0.0)) v.push_back("run.t_end: must be positive");
    for (std::size_t k = 0; k < c.output_times.size(); ++k) {
        const double t = c.output_times[k];
        if (!(t > 0.0 && t <= c.t_end)) {
            v.push_back("run.output_times[" + std::to_string(k) + "]: must lie in (0, t_end]");
        }
        if (k > 0 && !(t > c.output_times[k - 1])) {
            v.push_back("run.output_times: must be strictly increasing");
            break;
        }
    }

    double ext_max = c.initial.uniform_exterior;
    for (const auto& b : c.initial.bumps) ext_max = std::max(ext_max, b.amplitude + c.initial.uniform_exterior);
    if (c.initial.uniform_exterior < 0.0) v.push_back("initial.uniform_exterior: must be nonnegative");
    if (!(ext_max < 1.0)) {
        v.push_back("initial: regular data needs the exterior density strictly below 1 (max is " +
                    std::to_string(ext_max) + ")");
    }

    if (command == Command::kVerify) return v;

    if (command == Command::kSimulatePme || command == Command::kConverge) {
        const std::vector<double> ms = command == Command::kConverge ? c.m_list : std::vector<double>{c.m};
        if (ms.empty()) v.push_back("family.m_list: must not be empty");
        for (std::size_t k = 0; k < ms.size(); ++k) {
            if (!(ms[k] > 1.0)) v.push_back((command == Command::kConverge ? "family.m_list" : "pme.m") +
                                            std::string(": every exponent must exceed 1"));
            if (k > 0 && !(ms[k] > ms[k - 1])) v.push_back("family.m_list: must be strictly increasing");
        }
        if (!(c.pme.dt_safety > 0.0 && c.pme.dt_safety <= 1.0)) v.push_back("pme.dt_safety: must lie in (0, 1]");
        if (c.initial.uniform_exterior != 0.0) {
            v.push_back("initial.uniform_exterior: the m-problem needs compactly supported data");
        }
        if (!c.initial.has_patch() && c.initial.exterior_is_zero()) {
            v.push_back("initial: the density is identically zero");
        }
    }
    if (!v.empty()) return v;  // the checks below sample the grid and the model

    const GridSpec grid = g.spec();
    const DriftModel model = c.model();

    if (command == Command::kSimulatePme || command == Command::kConverge) {
        try {
            c.initial.sample(grid).validate(c.pme.boundary_margin);
        } catch (const InvalidInput& e) {
            v.push_back(std::string("initial: ") + e.what());
        }
    }
    if (command == Command::kConverge && c.uniform_margin < 2) v.push_back("family.margin: must be at least 2");

    if (needs_hs(c, command)) {
        const double min_F = min_F_on_grid(model, grid);
        if (!(min_F > 0.0)) {
            v.push_back("source: the Hele-Shaw mode needs F = f - div b > 0 on the grid (min F = " +
                        std::to_string(min_F) + ")");
        }
        if (!(c.hs.cfl > 0.0 && c.hs.cfl <= 1.0)) v.push_back("hs.cfl: must lie in (0, 1]");
        if (!(c.hs.dt_min > 0.0 && c.hs.dt_min <= c.hs.dt_max)) v.push_back("hs.dt_min: must lie in (0, dt_max]");
        if (c.hs.reinit_every < 1) v.push_back("hs.reinit_every: must be at least 1");
        if (c.hs.extension_band < 1) v.push_back("hs.extension_band: must be at least 1");
        if (c.initial.has_patch()) {
            const Mask omega = c.initial.sample(grid).omega0;
            for (std::size_t k = 0; k < grid.size(); ++k) {
                if (omega[k] && grid.cells_to_boundary(grid.i_of(k), grid.j_of(k)) < c.hs.boundary_margin) {
                    v.push_back("initial: congested set lies within hs.boundary_margin cells of the boundary");
                    break;
                }
            }
        }
    }

    if (command == Command::kTransport) {
        for (std::size_t k = 0; k < c.anchors.size(); ++k) {
            if (!grid.contains(c.anchors[k])) {
                v.push_back("transport.anchors[" + std::to_string(k) + "]: outside the grid");
            }
        }
        if (c.flow_step < 0.0) v.push_back("transport.step: must be nonnegative");
    }
    return v;
}

RunConfig parse_config_text(std::string_view text, Command command) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "document: " << e.description() << " (line " << e.source().begin.line << ")";
        throw ConfigError({os.str()});
    }
    RunConfig c;
    Reader r;
    read_document(root, c, r);
    auto more = validate(c, command);
    r.errors.insert(r.errors.end(), more.begin(), more.end());
    if (!r.errors.empty()) throw ConfigError(r.errors);
    return c;
}

RunConfig parse_config(const std::filesystem::path& path, Command command) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"config: cannot read " + path.string()});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), command);
}

nlohmann::json config_echo(const RunConfig& c) {
    using nlohmann::json;
    auto pt = [&](Vec2 p) { return c.grid.dim == 1 ? json::array({p.x}) : json::array({p.x, p.y}); };
    json j;
    j["grid"] = {{"dim", c.grid.dim}, {"cells", c.grid.cells}, {"lower", c.grid.lower}, {"upper", c.grid.upper}};
    j["drift"] = {{"preset", c.preset},
                  {"velocity", pt(c.drift.velocity)},
                  {"omega", c.drift.omega},
                  {"rate", c.drift.rate},
                  {"shear", c.drift.shear}};
    j["source"] = {{c.drift.source_is_F ? "F" : "f", c.drift.source}};
    json disks = json::array(), boxes = json::array(), bumps = json::array();
    for (const auto& d : c.initial.disks) disks.push_back({{"center", pt(d.center)}, {"radius", d.radius}});
    for (const auto& b : c.initial.boxes) boxes.push_back({{"lo", pt(b.lo)}, {"hi", pt(b.hi)}});
    for (const auto& b : c.initial.bumps) {
        bumps.push_back({{"center", pt(b.center)}, {"radius", b.radius}, {"amplitude", b.amplitude}});
    }
    j["initial"] = {{"disks", disks}, {"boxes", boxes}, {"bumps", bumps},
                    {"uniform_exterior", c.initial.uniform_exterior}};
    j["pme"] = {{"m", c.m},
                {"scheme", c.pme.scheme == PmeScheme::kExplicit ? "explicit" : "semi-implicit"},
                {"dt_safety", c.pme.dt_safety},
                {"boundary_margin", c.pme.boundary_margin}};
    j["hs"] = {{"cfl", c.hs.cfl},
               {"dt_max", c.hs.dt_max},
               {"dt_min", c.hs.dt_min},
               {"near_one", c.hs.near_one},
               {"reinit_every", c.hs.reinit_every},
               {"extension_band", c.hs.extension_band},
               {"boundary_margin", c.hs.boundary_margin},
               {"tolerance", c.hs.pressure.tolerance}};
    j["run"] = {{"t_end", c.t_end}, {"output_times", c.output_times}, {"seed", c.seed}};
    j["family"] = {{"m_list", c.m_list}, {"margin", c.uniform_margin}, {"run_hs", c.run_hs}};
    json anchors = json::array();
    for (const auto& a : c.anchors) anchors.push_back(pt(a));
    j["transport"] = {{"anchors", anchors}, {"step", c.flow_step}};
    j["verify"] = {{"tier", tier_name(c.tier)}, {"suites", c.suites}};
    return j;
}

}  // namespace stiffpme::cli
