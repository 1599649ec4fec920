#include "dflow/rng.hpp"

#include <cmath>
#include <numbers>

namespace dflow {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  std::uint64_t k = splitmix64(seed_ ^ 0x6a09e667f3bcc909ULL);
  k = splitmix64(k ^ stream_);
  return splitmix64(k ^ splitmix64(counter));
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(std::uint64_t counter, double lo, double hi) const {
  return lo + (hi - lo) * uniform(counter);
}

double CounterRng::normal(std::uint64_t counter) const {
  // Box-Muller on two sub-draws; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex CounterRng::complex_normal(std::uint64_t counter) const {
  return Complex(normal(2 * counter), normal(2 * counter + 1)) / std::numbers::sqrt2;
}

CounterRng CounterRng::substream(std::uint64_t index) const {
  return CounterRng(seed_, splitmix64(stream_ ^ splitmix64(index + 0x243f6a8885a308d3ULL)));
}

}  // namespace dflow
