#ifndef ENTEST_RANDOM_HPP
#define ENTEST_RANDOM_HPP

#include <cstddef>
#include <cstdint>
#include <optional>

namespace entest {

using RngSeed = std::uint64_t;

/// Counter-based SplitMix64 stream.
///
/// Output i of a stream with key K is mix64(K + (i + 1) * 0x9E3779B97F4A7C15),
/// where mix64 is the SplitMix64 finalizer. The whole state is (key, counter),
/// so any position of any stream is reproducible on every platform.
/// split(tag) derives an independent child key, which is how per-trial and
/// per-purpose substreams are obtained.
///
/// Uniform doubles use the top 53 bits of an output. Standard normals use the
/// Box-Muller transform on two consecutive uniforms u1 in (0,1], u2 in [0,1):
/// z0 = sqrt(-2 ln u1) cos(2 pi u2), z1 = sqrt(-2 ln u1) sin(2 pi u2), with z1
/// cached for the next call.
class Rng {
public:
    explicit Rng(RngSeed seed) noexcept : key_(seed) {}

    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1).
    double uniform() noexcept;
    /// Uniform on (0, 1].
    double uniform_positive() noexcept;
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept;
    /// Uniform integer in [0, bound), rejection-sampled so there is no modulo bias.
    std::uint64_t below(std::uint64_t bound) noexcept;
    double normal() noexcept;

    Rng split(std::uint64_t tag) const noexcept;
    RngSeed key() const noexcept { return key_; }
    std::uint64_t position() const noexcept { return counter_; }

private:
    RngSeed key_;
    std::uint64_t counter_ = 0;
    std::optional<double> spare_normal_;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

/// Derives a child seed from a parent seed and a sequence of tags.
RngSeed derive_seed(RngSeed parent, std::uint64_t tag_a, std::uint64_t tag_b = 0) noexcept;

}  // namespace entest

#endif  // ENTEST_RANDOM_HPP
