#pragma once

// Run manifests: one JSON file per command invocation holding the fully
// resolved argument list, so that replaying it reproduces the outputs.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pddrm/grid.hpp"

namespace pddrm {

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // starts with the command name; every default spelled out
  std::string output_flag;        // "--out" or "--out-dir"
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;
  std::vector<EvalRecord> records;

  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

/// The manifest's argv with the output location moved under `out_dir`:
/// --out-dir is replaced, --out keeps its file name.
std::vector<std::string> replay_args(const RunManifest& m,
                                     const std::optional<std::filesystem::path>& out_dir);

/// UTC wall-clock time as YYYY-MM-DDTHH:MM:SSZ. Recorded only, never used
/// for seeding.
std::string utc_timestamp();

/// Shortest decimal text that round-trips the double exactly.
std::string exact_double(double v);

}  // namespace pddrm
