#pragma once

#include <cstdint>
#include <string_view>

namespace bmlab {

// Stateless mixing primitives. mix64 is the splitmix64 finalizer; it is a
// bijection on 64-bit words, so distinct counters never collide within a key.
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a(std::string_view s) noexcept;

// Counter-based generator. Streams are keyed by (seed, stream name, replicate)
// so any replicate can be regenerated in isolation and results do not depend
// on which thread produced them.
class CounterRng {
 public:
  static CounterRng substream(std::uint64_t seed, std::string_view name, std::uint64_t replicate) noexcept;

  std::uint64_t next_u64() noexcept;
  double next_uniform() noexcept;   // open interval (0,1), 53 significant bits
  double next_gaussian() noexcept;  // inverse-CDF transform of next_uniform()

  std::uint64_t key() const noexcept { return key_; }

 private:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace bmlab
