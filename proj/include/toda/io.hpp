#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "toda/analysis.hpp"
#include "toda/core.hpp"
#include "toda/evolution.hpp"
#include "toda/flow.hpp"
#include "toda/hierarchy.hpp"
#include "toda/spectral.hpp"

namespace toda::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Every reader validates the document against its schema and throws
// SchemaError naming the offending field. Writers stamp "schema_version".

json to_json(const LatticeState& s);
LatticeState lattice_state_from_json(const json& j);

json to_json(const KvMState& s);
KvMState kvm_state_from_json(const json& j);

json to_json(const HierarchyCoeffs& c);
HierarchyCoeffs coeffs_from_json(const json& j);

json to_json(const ScatteringData& sd);
ScatteringData scattering_from_json(const json& j);

json to_json(const DispersionLaw& law, double residual);
DispersionLaw dispersion_from_json(const json& j);

json to_json(const DecayReport& rep);
json to_json(const WitnessResult& res);
json to_json(const GrowthReport& rep);

json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
/// Pretty-printed JSON with a trailing newline.
std::string dump(const json& j);

/// Shortest decimal representation that round-trips, locale independent.
std::string format_double(double v);

std::string sha256_hex(std::string_view data);

}  // namespace toda::io
