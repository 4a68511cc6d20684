#include "gsw/rng.hpp"

namespace gsw {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SeedSpec SeedSpec::child(std::uint64_t sub) const {
  return {master_seed, splitmix64(stream_id ^ splitmix64(sub + 0x632be59bd9b4e019ULL))};
}

Rng::Rng(SeedSpec seed)
    : engine_(splitmix64(seed.master_seed ^ splitmix64(seed.stream_id))) {}

}  // namespace gsw
