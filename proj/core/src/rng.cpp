#include "levelgauss/rng.hpp"

#include <cmath>
#include <numbers>

namespace levelgauss {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_key(std::uint64_t parent, std::uint64_t tag) noexcept {
  return mix64(mix64(parent) ^ (tag * 0xd1b54a32d192ed03ULL));
}

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t counter) const noexcept {
  // Three rounds of mixing so that adjacent counters and streams decorrelate.
  std::uint64_t h = mix64(key_ ^ 0x243f6a8885a308d3ULL);
  h = mix64(h ^ (stream * 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (counter * 0xc2b2ae3d27d4eb4fULL));
  return h;
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t counter) const noexcept {
  // 53 random mantissa bits, shifted by half an ulp to exclude 0.
  const std::uint64_t b = bits(stream, counter) >> 11;
  return (static_cast<double>(b) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t stream, std::uint64_t counter) const noexcept {
  const double u1 = uniform(stream, 2 * counter);
  const double u2 = uniform(stream, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace levelgauss
