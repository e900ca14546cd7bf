#include "pddrm/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "pddrm/external_denoiser.hpp"

namespace pddrm {

std::string encode_pdds(std::span<const PairSample> samples) {
  const std::size_t n = samples.empty() ? 0 : samples.front().u.n();
  if (!samples.empty() && n == 0) throw IoError("pdds: empty grid");
  if (samples.size() > 0xffffffffULL) throw IoError("pdds: too many samples");
  std::string out;
  out.reserve(kPddsHeaderBytes + samples.size() * 16 * n * n);
  out.append("PDDS", 4);
  wire::put_u32(out, kPddsVersion);
  wire::put_u32(out, static_cast<std::uint32_t>(n));
  wire::put_u32(out, static_cast<std::uint32_t>(samples.size()));
  for (const PairSample& s : samples) {
    if (s.u.n() != n) throw DimensionError("pdds: samples on different grids");
    for (double v : s.f.values()) wire::put_f64(out, v);
    for (double v : s.u.values()) wire::put_f64(out, v);
  }
  return out;
}

std::vector<PairSample> decode_pdds(std::string_view bytes, Provenance provenance) {
  if (bytes.size() < kPddsHeaderBytes || bytes.substr(0, 4) != "PDDS") throw IoError("pdds: bad magic");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (wire::get_u32(p + 4) != kPddsVersion) throw IoError("pdds: unsupported version");
  const std::size_t n = wire::get_u32(p + 8);
  const std::size_t count = wire::get_u32(p + 12);
  const std::size_t k = n * n;
  if (bytes.size() != kPddsHeaderBytes + count * 16 * k) throw IoError("pdds: file size does not match header");
  if (count > 0 && n < 2) throw IoError("pdds: grid too small");
  std::vector<PairSample> out;
  out.reserve(count);
  const unsigned char* at = p + kPddsHeaderBytes;
  for (std::size_t r = 0; r < count; ++r) {
    std::vector<double> f(k), u(k);
    for (std::size_t i = 0; i < k; ++i, at += 8) f[i] = wire::get_f64(at);
    for (std::size_t i = 0; i < k; ++i, at += 8) u[i] = wire::get_f64(at);
    const GridSpec grid(n);
    out.emplace_back(ScalarField(grid, std::move(f)), ScalarField(grid, std::move(u)), provenance);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_pdds(const std::filesystem::path& path, std::span<const PairSample> samples) {
  write_file(path, encode_pdds(samples));
}

std::vector<PairSample> read_pdds(const std::filesystem::path& path, Provenance provenance) {
  return decode_pdds(read_file(path), provenance);
}

std::string results_csv(std::string_view method, std::string_view problem,
                        std::span<const double> per_sample, double batch_mae) {
  std::ostringstream out;
  out.precision(17);
  out << "method,problem,sample_index,mae\n";
  for (std::size_t i = 0; i < per_sample.size(); ++i)
    out << method << ',' << problem << ',' << i << ',' << per_sample[i] << '\n';
  out << method << ',' << problem << ",batch," << batch_mae << '\n';
  return out.str();
}

std::string Render::sidecar_json() const {
  nlohmann::ordered_json j;
  j["min"] = meta.min;
  j["max"] = meta.max;
  j["N"] = meta.n;
  return j.dump(2) + "\n";
}

Render render_pgm(const ScalarField& field) {
  const auto v = field.values();
  Render r;
  r.meta.n = field.n();
  r.meta.min = *std::min_element(v.begin(), v.end());
  r.meta.max = *std::max_element(v.begin(), v.end());
  const double range = r.meta.max - r.meta.min;
  r.pgm = "P5\n" + std::to_string(field.n()) + " " + std::to_string(field.n()) + "\n65535\n";
  for (double x : v) {
    const double s = range > 0.0 ? std::round((x - r.meta.min) / range * 65535.0) : 0.0;
    const auto q = static_cast<std::uint16_t>(std::clamp(s, 0.0, 65535.0));
    r.pgm.push_back(static_cast<char>(q >> 8));
    r.pgm.push_back(static_cast<char>(q & 0xff));
  }
  return r;
}

ScalarField unrender_pgm(std::string_view pgm, const RenderMeta& meta) {
  const std::string header = "P5\n" + std::to_string(meta.n) + " " + std::to_string(meta.n) + "\n65535\n";
  if (pgm.substr(0, header.size()) != header) throw IoError("pgm: header does not match sidecar");
  const std::size_t k = meta.n * meta.n;
  if (pgm.size() != header.size() + 2 * k) throw IoError("pgm: truncated pixel data");
  const auto* p = reinterpret_cast<const unsigned char*>(pgm.data() + header.size());
  std::vector<double> out(k);
  const double range = meta.max - meta.min;
  for (std::size_t i = 0; i < k; ++i) {
    const unsigned q = (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1];
    out[i] = meta.min + range * static_cast<double>(q) / 65535.0;
  }
  return ScalarField(GridSpec(meta.n), std::move(out));
}

RenderMeta parse_render_meta(std::string_view json) {
  try {
    const auto j = nlohmann::json::parse(json);
    return {j.at("min").get<double>(), j.at("max").get<double>(), j.at("N").get<std::size_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("render sidecar: ") + e.what());
  }
}

}  // namespace pddrm
