#include "bmlab/rng.hpp"

#include "bmlab/special.hpp"

namespace bmlab {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

CounterRng CounterRng::substream(std::uint64_t seed, std::string_view name, std::uint64_t replicate) noexcept {
  std::uint64_t key = mix64(mix64(seed ^ mix64(fnv1a(name))) ^ replicate);
  return CounterRng(key);
}

std::uint64_t CounterRng::next_u64() noexcept { return mix64(key_ + (++ctr_) * 0x9E3779B97F4A7C15ull); }

double CounterRng::next_uniform() noexcept {
  // (0,1): top 53 bits plus a half-ulp offset keeps both endpoints excluded.
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double CounterRng::next_gaussian() noexcept { return normal_quantile_fast(next_uniform()); }

}  // namespace bmlab
