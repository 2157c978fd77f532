#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace rml {

// Philox4x32-10 block function (Salmon et al., SC'11). Counter-based: the
// output is a pure function of (counter, key).
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t m0 = 0xD2511F53u;
  constexpr std::uint32_t m1 = 0xCD9E8D57u;
  constexpr std::uint32_t w0 = 0x9E3779B9u;
  constexpr std::uint32_t w1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += w0;
    key[1] += w1;
  }
  return ctr;
}

// Identifies one independent random stream inside a replication.
enum class Stream : std::uint32_t {
  u_latent = 0,
  v_noise = 1,
  censoring = 2,
  response_noise = 3,
  generic = 4,
  design = 16,  // design + j for coordinate j
};

// Sequential view over the Philox stream keyed by (master_seed) with counter
// words (position_lo, position_hi, stream, replication). Two instances with
// distinct (replication, stream) never overlap.
class CounterRng {
public:
  CounterRng(std::uint64_t master_seed, std::uint32_t replication, std::uint32_t stream)
      : key_{static_cast<std::uint32_t>(master_seed),
             static_cast<std::uint32_t>(master_seed >> 32)},
        stream_(stream),
        replication_(replication) {}

  CounterRng(std::uint64_t master_seed, std::uint32_t replication, Stream stream,
             std::uint32_t offset = 0)
      : CounterRng(master_seed, replication, static_cast<std::uint32_t>(stream) + offset) {}

  std::uint32_t next_u32() {
    if (used_ == 4) refill();
    return block_[used_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double exponential(double mean) { return -mean * std::log(uniform()); }

  bool bernoulli(double prob) { return uniform() < prob; }

  // Student t with integer degrees of freedom.
  double student_t(int dof) {
    const double z = normal();
    double chi2 = 0.0;
    for (int k = 0; k < dof; ++k) {
      const double g = normal();
      chi2 += g * g;
    }
    return z / std::sqrt(chi2 / dof);
  }

private:
  void refill() {
    block_ = philox4x32_10({static_cast<std::uint32_t>(position_),
                            static_cast<std::uint32_t>(position_ >> 32), stream_, replication_},
                           key_);
    ++position_;
    used_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_;
  std::uint32_t replication_;
  std::uint64_t position_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace rml
