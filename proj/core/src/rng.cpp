#include "dtar/rng.hpp"

namespace dtar {

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (stream * 0xD1B54A32D192ED03ULL));
  h = splitmix64(h ^ (index * 0x8CB92BA72F3D8DD7ULL));
  return h;
}

double uniform01(Rng& rng) {
  // 53 random mantissa bits; avoids implementation-defined distribution output.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int uniform_int(Rng& rng, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo + 1);
  // reject the tail so the modulo is unbiased
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return lo + static_cast<int>(x % span);
}

}  // namespace dtar
