#pragma once

#include <cstdint>

namespace levelgauss {

/// Stateless counter-based generator. Every draw is a pure function of
/// (key, stream, counter), so results do not depend on evaluation order or
/// on how work is split across threads.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key() const noexcept { return key_; }

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const noexcept;

  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t stream, std::uint64_t counter) const noexcept;

  /// Standard normal via Box-Muller on two independent uniforms.
  double normal(std::uint64_t stream, std::uint64_t counter) const noexcept;

 private:
  std::uint64_t key_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derive a child key, e.g. a per-seed key from an experiment key.
std::uint64_t derive_key(std::uint64_t parent, std::uint64_t tag) noexcept;

}  // namespace levelgauss
