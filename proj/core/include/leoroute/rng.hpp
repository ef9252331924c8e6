#pragma once

#include <cstdint>
#include <random>

namespace leoroute {

using Rng = std::mt19937_64;

// Named sub-streams derived from one master seed. Keeping every consumer on
// its own stream makes runs reproducible regardless of evaluation order.
enum class Stream : std::uint64_t {
  kParamInit = 1,
  kTraffic = 2,
  kPolicy = 3,
  kReplay = 4,
  kEnv = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                 std::uint64_t index = 0) {
  std::uint64_t s = splitmix64(master ^ (0xa076'1d64'78bd'642fULL *
                                         static_cast<std::uint64_t>(stream)));
  return splitmix64(s ^ (0xe703'7ed1'a0b4'28dbULL * (index + 1)));
}

inline Rng make_rng(std::uint64_t master, Stream stream,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

}  // namespace leoroute
