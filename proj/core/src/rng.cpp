#include "boundary/rng.hpp"

namespace boundary {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::string_view stream) {
  std::uint64_t state = seed ^ fnv1a(stream);
  return splitmix64(state);
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index) {
  std::uint64_t state = mix_seed(seed, stream) + 0x9e3779b97f4a7c15ull * (index + 1);
  return splitmix64(state);
}

std::mt19937_64 make_rng(std::uint64_t seed, std::string_view stream) {
  return std::mt19937_64(mix_seed(seed, stream));
}

std::mt19937_64 make_rng(std::uint64_t seed, std::string_view stream, std::uint64_t index) {
  return std::mt19937_64(mix_seed(seed, stream, index));
}

}  // namespace boundary
