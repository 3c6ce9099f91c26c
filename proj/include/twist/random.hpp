#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace twist {

/// Seedable 64-bit generator with keyed substreams.
///
/// Rng(seed, {a, b, ...}) seeds a mt19937_64 from a seed_seq over the seed and
/// the key words, so every (seed, key) pair names an independent stream and a
/// consumer never depends on how many draws another stream made. Layer l of a
/// sampled tensor, replicate i of an experiment and restart k of K-means each
/// get their own key.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> key = {});

  static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Stream tags so independent consumers of one user seed never collide.
enum class Stream : std::uint64_t {
  kMembership = 0x6d656d62,
  kLayerLabels = 0x6c61626c,
  kLayerEdges = 0x65646765,
  kKmeans = 0x6b6d6e73,
  kReplicate = 0x7265706c,
  kTest = 0x74657374,
};

constexpr std::uint64_t key(Stream s) { return static_cast<std::uint64_t>(s); }

}  // namespace twist
