#include "dgperf/caps.hpp"

#include <cstdlib>
#include <string>

namespace dgperf {
namespace {

std::size_t env_or(const char* name, std::size_t fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return fallback;
  try {
    return static_cast<std::size_t>(std::stoull(raw));
  } catch (...) {
    return fallback;
  }
}

}  // namespace

const Caps& caps() {
  static const Caps value = [] {
    Caps c;
    c.max_dim = env_or("DGPERF_MAX_DIM", c.max_dim);
    c.max_points = env_or("DGPERF_MAX_POINTS", c.max_points);
    if (c.max_points > 63) c.max_points = 63;
    return c;
  }();
  return value;
}

}  // namespace dgperf
