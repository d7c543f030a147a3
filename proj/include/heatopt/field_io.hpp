#pragma once

#include <cstdint>
#include <string>

#include "heatopt/continuation.hpp"
#include "heatopt/grid.hpp"
#include "heatopt/report.hpp"
#include "heatopt/scene.hpp"

#include <json.hpp>

namespace heatopt {

inline constexpr const char* kToolVersion = "0.1.0";

enum class FieldFormat { Csv, Bin, Pgm };

FieldFormat parse_field_format(const std::string& name);

// csv: header then one row per node in row-major node order, 17 significant
//      digits.
// bin: little-endian 64-bit floats, row-major, with a JSON sidecar
//      (path + ".json") recording dims, extents and count.
// pgm: 16-bit grayscale, values mapped affinely from [0, max u]; the map is
//      recorded in the sidecar.
void export_field(const ScalarField& u, FieldFormat format, const std::string& path);

// Rebuilds the grid from the sidecar; bit-exact inverse of the bin export.
ScalarField import_field_bin(const std::string& path);

std::uint64_t fnv1a64(const std::string& text);

// JSON representations (round-trip losslessly)
nlohmann::json to_json(const CheckRecord& r);
nlohmann::json to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StageRecord& r);
StageRecord stage_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SceneSpec& s);

// Self-describing record of one run: config hash + echo, per-stage
// summaries, diagnostics, wall clock.
struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string command;
    std::uint64_t config_hash = 0;
    nlohmann::json config_echo;
    std::vector<StageRecord> stages;
    std::vector<EpsSweepEntry> sweep;
    double epsilon_star = 0.0;
    bool qualified = false;
    Report diagnostics;
    double total_wall_ms = 0.0;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
    void save(const std::string& path) const;
};

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace heatopt
