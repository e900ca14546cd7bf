#include "pddrm/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "pddrm/io.hpp"

namespace pddrm {

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "pddrm-manifest";
  j["version"] = 1;
  j["command"] = command;
  j["argv"] = argv;
  j["output_flag"] = output_flag;
  j["config"] = config;
  j["seed"] = seed;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["outputs"] = outputs;
  auto recs = nlohmann::ordered_json::array();
  for (const EvalRecord& r : records) {
    nlohmann::ordered_json e;
    e["method"] = std::string(to_string(r.method));
    e["mae"] = r.mae;
    e["sample_count"] = r.sample_count;
    recs.push_back(std::move(e));
  }
  j["records"] = std::move(recs);
  return j;
}

namespace {
Method method_from_string(const std::string& s) {
  for (Method m : {Method::DryForward, Method::DryInverse, Method::DdrmForward, Method::DdrmInverse,
                   Method::FdForward, Method::FdInverse, Method::SpectralForward, Method::SpectralInverse})
    if (to_string(m) == s) return m;
  throw ConfigError("manifest: unknown method '" + s + "'");
}
}  // namespace

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "pddrm-manifest") throw ConfigError("not a pddrm manifest");
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.output_flag = j.at("output_flag").get<std::string>();
    m.config = j.at("config");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    m.outputs = j.value("outputs", std::vector<std::string>{});
    for (const auto& e : j.value("records", nlohmann::json::array()))
      m.records.push_back({method_from_string(e.at("method").get<std::string>()), e.at("mae").get<double>(),
                           e.at("sample_count").get<std::size_t>(), {}});
    if (m.argv.empty() || m.argv.front() != m.command) throw ConfigError("manifest argv does not start with its command");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  write_file(path, m.to_json().dump(2) + "\n");
}

RunManifest read_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("manifest not found: " + path.string());
  try {
    return RunManifest::from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
}

std::vector<std::string> replay_args(const RunManifest& m,
                                     const std::optional<std::filesystem::path>& out_dir) {
  std::vector<std::string> args = m.argv;
  if (!out_dir) return args;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] != m.output_flag) continue;
    if (m.output_flag == "--out-dir")
      args[i + 1] = out_dir->string();
    else
      args[i + 1] = (*out_dir / std::filesystem::path(args[i + 1]).filename()).string();
    return args;
  }
  throw ConfigError("manifest argv lacks its output flag " + m.output_flag);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string exact_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

}  // namespace pddrm
