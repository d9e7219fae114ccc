#pragma once

#include <array>
#include <cstdint>

namespace pcarisk {

// Philox4x64-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// Bijection of a 256-bit counter under a 128-bit key; output matches the
// Random123 reference and numpy.random.Philox.
struct Philox4x64 {
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;
  static Counter generate(Counter ctr, Key key);
};

// Reproducible stream keyed by (seed, stream index). Block b of the stream is
// Philox4x64(counter = {b, 0, 0, 0}, key = {seed, stream}); consumption is
// strictly sequential, so output depends only on (seed, stream).
class RngStream {
public:
  static constexpr const char* kAlgorithm = "philox4x64-10/box-muller";

  RngStream(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} {}

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream() const { return key_[1]; }

private:
  Philox4x64::Key key_;
  std::uint64_t block_ = 0;
  Philox4x64::Counter buffer_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pcarisk
