#include "impulse/noise.hpp"

#include <algorithm>

namespace impulse {
namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x9e3779b9u};
  return std::mt19937_64(seq);
}

}  // namespace

NoiseStream::NoiseStream(std::uint64_t master_seed, std::uint64_t path_index)
    : seed_(master_seed), index_(path_index), engine_(make_engine(master_seed, path_index)) {}

void NoiseStream::fill(std::span<double> out) {
  std::generate(out.begin(), out.end(), [this] { return normal(); });
}

}  // namespace impulse
