#include "pddrm/external_denoiser.hpp"

#include <bit>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <stdexcept>

#include <sys/wait.h>
#include <unistd.h>

namespace pddrm {

namespace wire {

void put_u8(std::string& out, unsigned char v) { out.push_back(static_cast<char>(v)); }

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace wire

namespace {

void write_all(int fd, const char* data, std::size_t len) {
  while (len > 0) {
    const ssize_t w = ::write(fd, data, len);
    if (w < 0 && errno == EINTR) continue;
    if (w <= 0) throw std::runtime_error("external denoiser: write failed: " + std::string(std::strerror(errno)));
    data += w;
    len -= static_cast<std::size_t>(w);
  }
}

void read_all(int fd, unsigned char* data, std::size_t len) {
  while (len > 0) {
    const ssize_t r = ::read(fd, data, len);
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) throw std::runtime_error("external denoiser: child closed its output");
    if (r < 0) throw std::runtime_error("external denoiser: read failed: " + std::string(std::strerror(errno)));
    data += r;
    len -= static_cast<std::size_t>(r);
  }
}

}  // namespace

ExternalDenoiser::ExternalDenoiser(std::string program) : program_(std::move(program)) {
  // A child that dies mid-request must surface as an exception, not SIGPIPE.
  std::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2], out_pipe[2];
  if (::pipe(in_pipe) != 0) throw std::runtime_error("external denoiser: pipe failed");
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw std::runtime_error("external denoiser: pipe failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw std::runtime_error("external denoiser: fork failed");
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl(program_.c_str(), program_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ExternalDenoiser::~ExternalDenoiser() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
}

ScalarField ExternalDenoiser::predict(const ScalarField& noisy, double sigma_t, Channel channel,
                                      const ScalarField* context) const {
  const GridSpec grid = noisy.grid();
  if (context && context->grid() != grid) throw DimensionError("external denoiser: context grid differs");
  const std::size_t k = grid.size();
  std::string req;
  req.reserve(4 + 8 + 1 + 4 + 16 * k);
  req.append("DNRQ", 4);
  wire::put_f64(req, sigma_t);
  wire::put_u8(req, static_cast<unsigned char>(channel));
  wire::put_u32(req, static_cast<std::uint32_t>(grid.n()));
  for (double v : noisy.values()) wire::put_f64(req, v);
  for (std::size_t i = 0; i < k; ++i) wire::put_f64(req, context ? context->values()[i] : 0.0);

  std::vector<unsigned char> resp(4 + 8 * k);
  {
    std::lock_guard lock(mu_);
    write_all(to_child_, req.data(), req.size());
    read_all(from_child_, resp.data(), resp.size());
  }
  if (std::memcmp(resp.data(), "DNRS", 4) != 0) throw std::runtime_error("external denoiser: bad response magic");
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = wire::get_f64(resp.data() + 4 + 8 * i);
  return ScalarField(grid, std::move(out));
}

}  // namespace pddrm
