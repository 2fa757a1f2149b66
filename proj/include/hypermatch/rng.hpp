#pragma once

#include <cstdint>

namespace hypermatch {

// What a random value is used for. Part of the stream key, so different
// consumers of the same (seed, batch, round) never share draws.
enum class RngPurpose : std::uint64_t {
  EdgePriority = 1,
  WorkloadGen = 2,
  InstanceGen = 3,
};

namespace detail {
// splitmix64 finalizer; full-period bijective mixer.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// Counter-based generator: the value at position `counter` of the stream
// identified by (seed, batch, round, purpose) is a pure function of those
// five words. There is no mutable state, so draws can be made from any
// thread in any order and always agree.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t batch, std::uint64_t round,
            RngPurpose purpose)
      : base_(derive(seed, batch, round, purpose)) {}

  std::uint64_t at(std::uint64_t counter) const {
    return detail::mix64(base_ ^ counter);
  }

  // Uniform value in [0, bound) via 128-bit multiply; bound must be > 0.
  std::uint64_t bounded(std::uint64_t counter, std::uint64_t bound) const {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(at(counter)) * bound) >> 64);
  }

 private:
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t batch,
                              std::uint64_t round, RngPurpose purpose) {
    std::uint64_t h = detail::mix64(seed);
    h = detail::mix64(h ^ batch);
    h = detail::mix64(h ^ round);
    h = detail::mix64(h ^ static_cast<std::uint64_t>(purpose));
    return h;
  }

  std::uint64_t base_;
};

// Tiny sequential generator for workload/instance generation, seeded through
// the same derivation so generated streams are reproducible per seed.
class SequentialRng {
 public:
  explicit SequentialRng(const SeededRng& stream) : stream_(stream) {}

  std::uint64_t next() { return stream_.at(counter_++); }

  std::uint64_t next_below(std::uint64_t bound) {
    return stream_.bounded(counter_++, bound);
  }

 private:
  SeededRng stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace hypermatch
