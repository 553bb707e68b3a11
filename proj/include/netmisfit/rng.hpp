#pragma once

#include <cstdint>
#include <limits>

namespace netmisfit {

/// (master, stream) pair identifying one reproducible random stream.
struct Seed {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;

  /// A seed for an independent lane of the same stream (e.g. scenario
  /// parameters vs. graph edges within one replication).
  Seed lane(std::uint64_t tag) const;

  friend bool operator==(const Seed&, const Seed&) = default;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based generator: the k-th output is a pure function of the key
/// derived from the Seed and of k, so a stream's values never depend on what
/// other streams or threads have drawn.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  explicit StreamRng(Seed seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in the open interval (0, 1).
  double uniform_open();
  /// Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace netmisfit
