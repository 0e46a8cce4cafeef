#include "dyadic/config.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "dyadic/errors.hpp"

namespace dyadic {
namespace {

int initial_cap() {
  if (const char* env = std::getenv("DYADIC_RESOLUTION_CAP")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 0 && v <= 30) return static_cast<int>(v);
  }
  return kDefaultResolutionCap;
}

std::atomic<int>& cap_storage() {
  static std::atomic<int> cap{initial_cap()};
  return cap;
}

}  // namespace

int resolution_cap() { return cap_storage().load(std::memory_order_relaxed); }

void set_resolution_cap(int cap) {
  if (cap < 0 || cap > 30) throw InvalidInput("resolution cap must lie in [0, 30]");
  cap_storage().store(cap, std::memory_order_relaxed);
}

void check_resolution(int resolution) {
  if (resolution < 0) throw InvalidInput("negative resolution");
  if (resolution > resolution_cap()) {
    throw ResourceError("resolution " + std::to_string(resolution) + " exceeds cap " +
                        std::to_string(resolution_cap()));
  }
}

}  // namespace dyadic
