#include "stiffpme_cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stiffpme/field_io.hpp"

namespace stiffpme::cli {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int prec = 6; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

RunDirectory::RunDirectory(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

void RunDirectory::write_text(const std::string& name, std::string_view content) {
    std::ofstream os(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("short write to " + (dir_ / name).string());
    files_[name] = {content.size(), fnv1a64(content)};
}

void RunDirectory::write_field(const std::string& name, const ScalarField& field) {
    std::ostringstream buf(std::ios::binary);
    write_spf1(buf, field);
    write_text(name, buf.str());
}

nlohmann::json RunDirectory::outputs() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [name, e] : files_) {
        out.push_back({{"file", name}, {"bytes", e.bytes}, {"fnv1a64", hex64(e.checksum)}});
    }
    return out;
}

void RunDirectory::write_manifest(nlohmann::json manifest) {
    manifest["outputs"] = outputs();
    const std::string text = manifest.dump(2) + "\n";
    std::ofstream os(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + (dir_ / "manifest.json").string());
    os << text;
}

std::string frame_name(std::string_view stem, std::size_t frame, std::string_view ext) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%03zu.", frame);
    return std::string(stem) + buf + std::string(ext);
}

std::string events_csv(const std::vector<NucleationEvent>& events) {
    std::string s = "time,cells,x,y,new_component\n";
    for (const auto& e : events) {
        s += fmt(e.time) + "," + std::to_string(e.cells) + "," + fmt(e.centroid.x) + "," + fmt(e.centroid.y) + "," +
             (e.new_component ? "1" : "0") + "\n";
    }
    return s;
}

std::string polylines_csv(const std::vector<Polyline>& lines) {
    std::string s = "polyline,closed,x,y\n";
    for (std::size_t k = 0; k < lines.size(); ++k) {
        for (const auto& p : lines[k].points) {
            s += std::to_string(k) + "," + (lines[k].closed ? "1" : "0") + "," + fmt(p.x) + "," + fmt(p.y) + "\n";
        }
    }
    return s;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
    std::string s = "m,t,l1_error,sup_error,pressure_error,pressure_max\n";
    for (const auto& r : rows) {
        s += fmt(r.m) + "," + fmt(r.t) + "," + fmt(r.l1_error) + "," + fmt(r.sup_error) + "," +
             fmt(r.pressure_error) + "," + fmt(r.pressure_max) + "\n";
    }
    return s;
}

std::string order_csv(const std::vector<OrderRow>& rows) {
    std::string s = "m_from,m_to,t,l1_from,l1_to,ratio,observed_order,zone_gap\n";
    for (const auto& r : rows) {
        s += fmt(r.m_from) + "," + fmt(r.m_to) + "," + fmt(r.t) + "," + fmt(r.l1_from) + "," + fmt(r.l1_to) + "," +
             fmt(r.ratio) + "," + fmt(r.observed_order) + "," + fmt(r.zone_gap) + "\n";
    }
    return s;
}

nlohmann::json dt_history_json(const std::vector<double>& dts) {
    nlohmann::json j;
    j["steps"] = dts.size();
    if (!dts.empty()) {
        double lo = dts.front(), hi = dts.front(), sum = 0.0;
        for (double d : dts) {
            lo = std::min(lo, d);
            hi = std::max(hi, d);
            sum += d;
        }
        j["min"] = lo;
        j["max"] = hi;
        j["total"] = sum;
    }
    j["dt"] = dts;
    return j;
}

nlohmann::json mass_ledger_json(const std::vector<MassRecord>& ledger) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : ledger) {
        out.push_back({{"time", r.time}, {"mass", r.mass}, {"source_integral", r.source_integral}});
    }
    return out;
}

nlohmann::json mass_ledger_json(const std::vector<HsMassRecord>& ledger) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : ledger) {
        out.push_back({{"time", r.time},
                       {"congested_area", r.congested_area},
                       {"exterior_mass", r.exterior_mass},
                       {"production", r.production}});
    }
    return out;
}

nlohmann::json events_json(const std::vector<NucleationEvent>& events) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : events) {
        out.push_back({{"time", e.time},
                       {"cells", e.cells},
                       {"centroid", {e.centroid.x, e.centroid.y}},
                       {"new_component", e.new_component}});
    }
    return out;
}

}  // namespace stiffpme::cli
