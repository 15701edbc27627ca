#include "stablemix/rng.hpp"

#include <cmath>

#include "stablemix/error.hpp"

namespace stablemix {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::degenerate_law: return "degenerate_law";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::data: return "data";
    case ErrorCode::identifiability: return "identifiability";
    case ErrorCode::non_convergence: return "non_convergence";
    case ErrorCode::capacity: return "capacity";
  }
  return "unknown";
}

double Rng::exponential() { return -std::log(uniform()); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

}  // namespace stablemix
