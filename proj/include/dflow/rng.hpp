#pragma once

#include <cstdint>

#include "dflow/linalg.hpp"

namespace dflow {

// Counter-based generator: every draw is a pure function of (seed, stream, counter), so a
// matrix entry keyed by its index comes out the same regardless of thread layout or of which
// other quantities were sampled first.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const;
  double uniform(std::uint64_t counter) const;  // [0, 1)
  double uniform(std::uint64_t counter, double lo, double hi) const;
  double normal(std::uint64_t counter) const;  // standard normal
  Complex complex_normal(std::uint64_t counter) const;  // E|z|^2 = 1

  CounterRng substream(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Stream salts, one per sampled quantity, so different families never share random numbers.
namespace stream {
inline constexpr std::uint64_t crossover = 0x1001;
inline constexpr std::uint64_t ordered_diagonal = 0x1002;
inline constexpr std::uint64_t disorder = 0x1003;
inline constexpr std::uint64_t ginibre = 0x1004;
inline constexpr std::uint64_t hamiltonian = 0x1005;
}  // namespace stream

}  // namespace dflow
