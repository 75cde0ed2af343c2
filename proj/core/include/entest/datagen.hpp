#ifndef ENTEST_DATAGEN_HPP
#define ENTEST_DATAGEN_HPP

#include <cstddef>
#include <optional>
#include <string_view>

#include "entest/core.hpp"
#include "entest/linalg.hpp"
#include "entest/random.hpp"

namespace entest {

/// Synthetic mean-estimation designs. In every setting the first ceil(alpha n)
/// samples are low-noise and the remainder high-noise; all share mean zero.
///   s1: N(0, 1) then N(0, i^2)                    (d = 1, 1-based i)
///   s2: N(0, (ln i)^2) then N(0, i^2)             (d = 1; i = 1 uses sd ln 2)
///   s3: N(0, I) then N(0, 100 I)                  (d defaults to 10)
///   s4: N(0, Sigma0) then N(0, 100 Sigma0)        (Sigma0 from gen_psd_setting4)
enum class MeanSettingId { s1, s2, s3, s4 };

std::optional<MeanSettingId> parse_mean_setting(std::string_view text) noexcept;
std::string_view to_string(MeanSettingId id) noexcept;

struct MeanSetting {
    MeanSettingId id = MeanSettingId::s1;
    std::size_t n = 1000;
    double alpha = 0.8;
    std::size_t d = 1;
    RngSeed seed = 0;

    /// Fills in the conventional dimension: 1 for s1/s2, 10 for s3/s4.
    static MeanSetting make(MeanSettingId id, std::size_t n, double alpha, RngSeed seed);
    void validate() const;
};

SampleSet gen_mean_data(const MeanSetting& setting);

/// Random SPD matrix: unit diagonal, each off-diagonal pair zero with
/// probability 1/2 and otherwise uniform on (-0.5, 0.5), then shifted by c*I
/// so the smallest eigenvalue is exactly 0.2.
SymmetricMatrix gen_psd_setting4(std::size_t d, RngSeed seed);

/// Rows of X ~ N(0, I_d), beta* a random unit vector, eps_i ~ N(0, 1) for the
/// first ceil(alpha n) rows and N(0, 100) for the rest.
RegressionData gen_regression_data(std::size_t n, std::size_t d, double alpha, RngSeed seed);

/// count rows of mean + L z, L = cholesky(cov), z i.i.d. standard normal from rng.
Matrix sample_gaussian(std::span<const double> mean, const SymmetricMatrix& cov, std::size_t count, Rng& rng);

/// Seed for trial r at sample size n under a base seed.
RngSeed trial_seed(RngSeed base, std::size_t n, std::size_t trial) noexcept;

}  // namespace entest

#endif  // ENTEST_DATAGEN_HPP
