#include "netmisfit/rng.hpp"

namespace netmisfit {

Seed Seed::lane(std::uint64_t tag) const {
  return {splitmix64(master ^ splitmix64(tag + 0x6c616e65ULL)), stream};
}

StreamRng::StreamRng(Seed seed)
    : key_(splitmix64(splitmix64(seed.master) ^ (seed.stream * 0xd1342543de82ef95ULL + 1))) {}

StreamRng::result_type StreamRng::operator()() {
  // Two rounds of the splitmix finalizer over key + counter.
  const std::uint64_t x = key_ + 0x9e3779b97f4a7c15ULL * ++counter_;
  return splitmix64(x ^ (x >> 29) ^ key_);
}

double StreamRng::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double StreamRng::uniform_open() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t StreamRng::below(std::uint64_t bound) {
  // Lemire's nearly-divisionless rejection.
  unsigned __int128 product = static_cast<unsigned __int128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

}  // namespace netmisfit
