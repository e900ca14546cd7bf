#pragma once

// File formats: PDDS datasets, CSV results and 16-bit PGM renders.

#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pddrm/grid.hpp"

namespace pddrm {

/// Raised for unreadable, unwritable or malformed files (exit code 1).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// PDDS: "PDDS", u32 version = 1, u32 N, u32 count, then per record N² f64 f
// followed by N² f64 u, little-endian. File size is 16 + count·2·N²·8.
inline constexpr std::uint32_t kPddsVersion = 1;
inline constexpr std::size_t kPddsHeaderBytes = 16;

std::string encode_pdds(std::span<const PairSample> samples);
std::vector<PairSample> decode_pdds(std::string_view bytes, Provenance provenance = Provenance::External);

void write_pdds(const std::filesystem::path& path, std::span<const PairSample> samples);
std::vector<PairSample> read_pdds(const std::filesystem::path& path,
                                  Provenance provenance = Provenance::External);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// "method,problem,sample_index,mae" header, one row per sample, then a
/// summary row with sample_index "batch". Values use 17 significant digits.
std::string results_csv(std::string_view method, std::string_view problem,
                        std::span<const double> per_sample, double batch_mae);

struct RenderMeta {
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

struct Render {
  std::string pgm;   // P5, maxval 65535, big-endian samples
  RenderMeta meta;
  std::string sidecar_json() const;
};

/// Linear min-max scaling to 0..65535; a constant field maps to all zeros.
/// Row i of the image is grid row i.
Render render_pgm(const ScalarField& field);

/// Inverse of render_pgm, exact up to (max − min)/2¹⁶ per point.
ScalarField unrender_pgm(std::string_view pgm, const RenderMeta& meta);
RenderMeta parse_render_meta(std::string_view json);

}  // namespace pddrm
