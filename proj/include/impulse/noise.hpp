#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace impulse {

/// Brownian increments for one path. The stream is a pure function of
/// (master_seed, path_index): any consumption pattern (one at a time or in
/// blocks) yields the same sequence.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t master_seed, std::uint64_t path_index);

  /// Standard normal draw.
  double normal() {
    ++cursor_;
    return gauss_(engine_);
  }

  /// Increment B(t + dt) - B(t).
  double increment(double sqrt_dt) { return sqrt_dt * normal(); }

  void fill(std::span<double> out);

  std::uint64_t master_seed() const noexcept { return seed_; }
  std::uint64_t path_index() const noexcept { return index_; }
  /// Number of normals drawn so far.
  std::uint64_t cursor() const noexcept { return cursor_; }

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t cursor_ = 0;
  std::mt19937_64 engine_;
  std::normal_distribution<double> gauss_;
};

}  // namespace impulse
