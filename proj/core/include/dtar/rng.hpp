#pragma once

#include <cstdint>
#include <random>

namespace dtar {

using Rng = std::mt19937_64;

/// Mixes a master seed with a stream tag and index (SplitMix64 finalizer).
/// Independent sub-streams are derived this way everywhere a stage needs
/// its own generator, so results do not depend on evaluation order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

/// Uniform real in [0, 1).
double uniform01(Rng& rng);

/// Uniform integer in [lo, hi] (inclusive).
int uniform_int(Rng& rng, int lo, int hi);

/// Stream tags used by derive_seed. Fixed values keep traces stable.
enum class Stream : std::uint64_t {
  kTraffic = 1,
  kFaults = 2,
  kFlows = 3,
  kSurge = 4,
  kAgent = 5,
  kScenario = 6,
  kPartitioner = 7,
  kInit = 8,
  kEval = 9,
  kMinibatch = 10,
};

inline std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
  return derive_seed(master, static_cast<std::uint64_t>(stream), index);
}
inline Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

}  // namespace dtar
