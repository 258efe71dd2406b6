#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace boundary {

// Splitmix64 step; the workhorse behind seed derivation.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent seed for a named stream of a run. Every source of
// randomness in the library draws from a stream obtained this way, so a
// single top-level seed fixes an entire run.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view stream);
std::uint64_t mix_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index);

std::mt19937_64 make_rng(std::uint64_t seed, std::string_view stream);
std::mt19937_64 make_rng(std::uint64_t seed, std::string_view stream, std::uint64_t index);

}  // namespace boundary
