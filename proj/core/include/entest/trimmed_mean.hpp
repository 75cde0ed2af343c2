#ifndef ENTEST_TRIMMED_MEAN_HPP
#define ENTEST_TRIMMED_MEAN_HPP

#include "entest/core.hpp"

namespace entest {

struct MeanEstimate {
    Vector value;
    IterateTrace trace;
};

struct ItmStep {
    Vector next;
    Subset subset;
    /// Sum over the subset of ||x_i - mu_t||^2, at the selecting iterate.
    double trimmed_loss = 0.0;
};

/// ||x_i - mu||^2 for every sample.
Vector mean_losses(const SampleSet& samples, std::span<const double> mu);

/// L(mu, S) = sum over S of ||x_i - mu||^2.
double subset_mean_loss(const SampleSet& samples, std::span<const double> mu, const Subset& subset);

/// Arithmetic mean of the rows in subset.
Vector subset_mean(const SampleSet& samples, const Subset& subset);

/// Keep the k samples closest to mu_t and average them.
ItmStep itm_step(const SampleSet& samples, std::span<const double> mu_t, std::size_t k,
                 TieBreak tie_break = TieBreak::by_index);

/// Iterative trimmed mean. Starts at the grand mean and runs exactly
/// config.iterations steps of itm_step with k = ceil(alpha n).
MeanEstimate itm(const SampleSet& samples, const TrimConfig& config);

}  // namespace entest

#endif  // ENTEST_TRIMMED_MEAN_HPP
