#pragma once

#include <cstdint>

namespace stickylab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). One call
/// encrypts a 128-bit counter under a 64-bit key into 128 output bits.
/// Pure integer math, identical on every platform.
struct Philox4x32 {
    static void block(const std::uint32_t ctr[4], const std::uint32_t key[2],
                      std::uint32_t out[4]);
};

/// Layout of the 128-bit counter used throughout:
///   words 0..1 : 64-bit draw counter (position within the stream)
///   words 2..3 : 64-bit stream id
/// The key is the master seed. A (seed, stream, counter) triple therefore
/// pins every random number, independent of scheduling or batching.
std::uint64_t philox_u64(std::uint64_t seed, std::uint64_t stream, std::uint64_t ctr);

/// Uniform double in (0,1) from the top 52 bits, offset by half a step so the
/// endpoints are unreachable: min 2^-53, max 1 - 2^-53, every step exact.
inline double u64_to_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
}

inline double philox_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t ctr) {
    return u64_to_unit(philox_u64(seed, stream, ctr));
}

/// Stream ids partition by purpose so different experiments sharing a master
/// seed never reuse draws. Path index goes in the low 40 bits.
enum class StreamPurpose : std::uint64_t {
    walk = 1,
    regularized = 2,
    coupled = 3,
    pilot = 4,
    generic = 5,
};

inline std::uint64_t stream_id(StreamPurpose p, std::uint64_t index) {
    return (static_cast<std::uint64_t>(p) << 40) | index;
}

/// Sequential view of one substream: draw k of the stream is always
/// philox(seed, stream, k) regardless of how it is consumed.
class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream), ctr_(0) {}

    std::uint64_t bits64() { return philox_u64(seed_, stream_, ctr_++); }
    double uniform() { return u64_to_unit(bits64()); }
    double normal();  // inverse-CDF transform, see kernels.hpp

    std::uint64_t counter() const { return ctr_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t ctr_;
};

}  // namespace stickylab
