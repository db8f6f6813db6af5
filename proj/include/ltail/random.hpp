#pragma once

#include <cstdint>

namespace ltail {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Maps 64 random bits to the open interval (0, 1) on a 2^-52 grid. A finer
/// grid would let the top cell round to 1.0.
constexpr double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Uniform variates for one sampled risk. The k-th uniform is a pure
/// function of (seed, index, k): there is no sequential state shared between
/// risks, so any partition of the index range reproduces the same draws.
class VariateStream {
 public:
  VariateStream(std::uint64_t seed, std::uint64_t index)
      : base_(mix64(seed + (index + 1) * kGoldenGamma)) {}

  double next() {
    const std::uint64_t bits = count_ == 0 ? base_ : mix64(base_ + count_ * 0xD1B54A32D192ED03ULL);
    ++count_;
    return to_open_unit(bits);
  }

 private:
  std::uint64_t base_;
  std::uint64_t count_ = 0;
};

}  // namespace ltail
