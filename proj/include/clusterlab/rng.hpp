#pragma once

#include <array>
#include <cstdint>

#include "clusterlab/exact_prob.hpp"

namespace clusterlab {

/// Bernoulli(p) decision data: draw u64 < threshold, or always when p == 1.
struct BernoulliThreshold {
  std::uint64_t threshold = 0;
  bool always = false;
};

/// Counter-based stream (Philox4x32-10). The key is the 64-bit seed, the
/// upper half of the counter is the 64-bit stream id, so every (seed,
/// stream_id) pair is an independent, reproducible sequence.
class RngStream {
 public:
  static constexpr const char* kGeneratorName = "philox4x32-10/v1";

  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform integer in [0, bound); bound > 0. Rejection keeps it unbiased.
  std::uint64_t bounded(std::uint64_t bound);
  /// True with probability `t.threshold / 2^64`; see bernoulli_threshold().
  bool bernoulli(const BernoulliThreshold& t) { return t.always || next_u64() < t.threshold; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int available_ = 0;
};

/// floor(p * 2^64), computed exactly.
BernoulliThreshold bernoulli_threshold(const Rational& p);

}  // namespace clusterlab
