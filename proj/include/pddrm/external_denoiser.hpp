#pragma once

// Denoiser backed by a child process speaking a small binary protocol on
// stdin/stdout (little-endian throughout):
//
//   request:  "DNRQ", f64 sigma_t, u8 channel, u32 N, N² f64 noisy, N² f64 context
//   response: "DNRS", N² f64 prediction
//
// One child serves every call; calls are serialized.

#include <memory>
#include <mutex>
#include <string>

#include "pddrm/ddrm.hpp"

namespace pddrm {

class ExternalDenoiser final : public Denoiser {
 public:
  /// Starts `program` with no arguments. Throws std::runtime_error if the
  /// process cannot be started.
  explicit ExternalDenoiser(std::string program);
  ~ExternalDenoiser() override;

  ExternalDenoiser(const ExternalDenoiser&) = delete;
  ExternalDenoiser& operator=(const ExternalDenoiser&) = delete;

  std::string name() const override { return "external:" + program_; }

  /// Throws std::runtime_error on a protocol or I/O failure.
  ScalarField predict(const ScalarField& noisy, double sigma_t, Channel channel,
                      const ScalarField* context) const override;

 private:
  std::string program_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  mutable std::mutex mu_;
};

namespace wire {
// Little-endian encoders shared with the reference child.
void put_u8(std::string& out, unsigned char v);
void put_u32(std::string& out, std::uint32_t v);
void put_f64(std::string& out, double v);
std::uint32_t get_u32(const unsigned char* p);
double get_f64(const unsigned char* p);
}  // namespace wire

}  // namespace pddrm
