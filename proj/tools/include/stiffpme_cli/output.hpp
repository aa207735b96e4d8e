#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stiffpme/geometry.hpp"
#include "stiffpme/hele_shaw.hpp"
#include "stiffpme/pme.hpp"

namespace stiffpme::cli {

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Shortest round-trip decimal form, locale independent.
std::string fmt(double v);

/// Sole writer of one run directory. Every file written through it is checksummed for the manifest.
class RunDirectory {
public:
    /// Creates the directory (and parents). Throws std::filesystem::filesystem_error on failure.
    explicit RunDirectory(std::filesystem::path dir);

    void write_field(const std::string& name, const ScalarField& field);
    void write_text(const std::string& name, std::string_view content);

    /// {file, bytes, fnv1a64} per written file, sorted by name.
    nlohmann::json outputs() const;

    /// Adds "outputs" and writes manifest.json (which is not itself listed).
    void write_manifest(nlohmann::json manifest);

    const std::filesystem::path& path() const { return dir_; }

private:
    struct Entry {
        std::size_t bytes = 0;
        std::uint64_t checksum = 0;
    };
    std::filesystem::path dir_;
    std::map<std::string, Entry> files_;
};

/// "rho_003.spf1" style names; the index is the output frame.
std::string frame_name(std::string_view stem, std::size_t frame, std::string_view ext);

std::string events_csv(const std::vector<NucleationEvent>& events);
/// Columns polyline,closed,x,y; one row per vertex.
std::string polylines_csv(const std::vector<Polyline>& lines);

struct ConvergenceRow {
    double m = 0.0;
    double t = 0.0;
    double l1_error = 0.0;
    double sup_error = 0.0;       ///< away from the reference front
    double pressure_error = 0.0;  ///< on the reference set eroded by the same margin
    double pressure_max = 0.0;
};
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

/// Consecutive members at one time: the error ratio and the congested-zone gap.
struct OrderRow {
    double m_from = 0.0;
    double m_to = 0.0;
    double t = 0.0;
    double l1_from = 0.0;
    double l1_to = 0.0;
    double ratio = 0.0;          ///< l1_to / l1_from
    double observed_order = 0.0;  ///< log(l1_from / l1_to) / log(m_to / m_from)
    double zone_gap = 0.0;       ///< Hausdorff distance of {rho >= 0.5}, NaN if either is empty
};
std::string order_csv(const std::vector<OrderRow>& rows);

nlohmann::json dt_history_json(const std::vector<double>& dts);
nlohmann::json mass_ledger_json(const std::vector<MassRecord>& ledger);
nlohmann::json mass_ledger_json(const std::vector<HsMassRecord>& ledger);
nlohmann::json events_json(const std::vector<NucleationEvent>& events);

}  // namespace stiffpme::cli
