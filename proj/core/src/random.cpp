#include "entest/random.hpp"

#include <cmath>
#include <numbers>

namespace entest {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSplitSalt = 0xD1B54A32D192ED03ULL;
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;
}  // namespace

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double Rng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;
}

double Rng::uniform_positive() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * kTwoPow53Inv;
}

double Rng::uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
}

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
    if (bound <= 1) {
        return 0;
    }
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = next_u64();
    while (x >= limit) {
        x = next_u64();
    }
    return x % bound;
}

double Rng::normal() noexcept {
    if (spare_normal_) {
        const double z = *spare_normal_;
        spare_normal_.reset();
        return z;
    }
    const double u1 = uniform_positive();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

Rng Rng::split(std::uint64_t tag) const noexcept {
    return Rng(mix64(key_ ^ mix64(tag + kSplitSalt)));
}

RngSeed derive_seed(RngSeed parent, std::uint64_t tag_a, std::uint64_t tag_b) noexcept {
    return Rng(parent).split(tag_a).split(tag_b).key();
}

}  // namespace entest
