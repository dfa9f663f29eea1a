#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mmw {

using Rng = std::mt19937_64;

/// Stream tags keep independent random quantities on independent streams.
enum class StreamTag : std::uint64_t {
  Drop = 1,
  LargeScale = 2,
  Fading = 3,
  Depolarization = 4,
  Coupling = 5,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Derives a generator from a run seed and any number of identifiers
/// (cell id, UE id, ...). The result depends only on the inputs, never on
/// how many draws other streams have made, so generation order is free.
Rng make_stream(std::uint64_t seed, StreamTag tag, std::initializer_list<std::uint64_t> ids = {});

}  // namespace mmw
