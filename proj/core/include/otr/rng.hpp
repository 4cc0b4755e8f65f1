#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace otr {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Derives an independent child seed from (seed, index). Streams for
// replicate b depend only on (seed, b), never on the order in which
// replicates execute.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// Seed derived along a path, e.g. {replicate, bootstrap_draw}.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {});

// Stream tags, so that different consumers of one replicate seed never share
// a stream.
namespace stream_tag {
inline constexpr std::uint64_t data = 0x64617461;
inline constexpr std::uint64_t evaluation = 0x6576616c;
inline constexpr std::uint64_t bootstrap = 0x626f6f74;
inline constexpr std::uint64_t truth = 0x74727565;
}  // namespace stream_tag

}  // namespace otr
