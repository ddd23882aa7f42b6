#pragma once

#include <cstddef>
#include <cstdint>

namespace dgperf {

// Desk-scale limits. DGPERF_MAX_DIM and DGPERF_MAX_POINTS override the first two.
struct Caps {
  std::size_t max_dim = 16;
  std::size_t max_points = 12;
  std::uint32_t max_prime = 13;
  std::uint64_t max_enumeration = std::uint64_t{1} << 16;
  /// Dense scalars a single enumeration may hold.
  std::uint64_t max_cells = std::uint64_t{1} << 25;
};

/// Caps read once from the environment.
const Caps& caps();

}  // namespace dgperf
