// Minimal external denoiser: answers every request with the noisy field it
// was given. Useful as a protocol reference and for tests.

#include <cstdio>
#include <cstring>
#include <vector>

#include "pddrm/external_denoiser.hpp"

namespace {

bool read_exact(unsigned char* p, std::size_t n) { return std::fread(p, 1, n, stdin) == n; }

}  // namespace

int main() {
  using namespace pddrm;
  unsigned char head[4 + 8 + 1 + 4];
  while (read_exact(head, sizeof head)) {
    if (std::memcmp(head, "DNRQ", 4) != 0) return 1;
    const std::uint32_t n = wire::get_u32(head + 13);
    const std::size_t k = static_cast<std::size_t>(n) * n;
    std::vector<unsigned char> body(16 * k);
    if (!read_exact(body.data(), body.size())) return 1;
    std::fwrite("DNRS", 1, 4, stdout);
    std::fwrite(body.data(), 1, 8 * k, stdout);
    std::fflush(stdout);
  }
  return 0;
}
