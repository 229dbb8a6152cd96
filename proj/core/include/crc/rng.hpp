#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace crc {

using Rng = std::mt19937_64;

/// Derives an independent sub-seed for a named pipeline stage from the root
/// seed, so each stage is reproducible in isolation.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stage);

inline Rng make_rng(std::uint64_t root, std::string_view stage) {
  return Rng(derive_seed(root, stage));
}

}  // namespace crc
