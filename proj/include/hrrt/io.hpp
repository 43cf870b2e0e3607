#pragma once

#include <string>

#include "hrrt/planner.hpp"

namespace hrrt {

/// Shortest round-trip decimal form, 17 significant digits.
std::string format_double(double v);

/// Writes via a temp file in the same directory plus rename, so readers never
/// observe a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

std::string sha256_hex(const std::string& data);

/// Tree serialization: metadata plus one record per node, edges implicit via
/// the parent field. All floats carry 17 significant digits.
std::string tree_to_json(const Tree& tree, const ScenarioModel& model, const PlannerParams& params,
                         const std::string& scenario_hash);

/// Root-to-goal trajectory CSV: t, u..., z..., phi, W, f_ctrl... with t and
/// phi cumulative across edges.
std::string path_to_csv(const Tree& tree, const Path& path, const ScenarioModel& model);

struct ManifestEntry {
  std::string file;
  std::string sha256;
};

std::string manifest_to_json(const std::string& command, const std::string& config_file, std::uint64_t seed,
                             const json& overrides, double duration_seconds,
                             const std::vector<ManifestEntry>& outputs);

}  // namespace hrrt
