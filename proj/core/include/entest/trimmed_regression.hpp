#ifndef ENTEST_TRIMMED_REGRESSION_HPP
#define ENTEST_TRIMMED_REGRESSION_HPP

#include "entest/core.hpp"

namespace entest {

struct BetaEstimate {
    Vector value;
    IterateTrace trace;
};

struct ItsmStep {
    Vector next;
    Subset subset;
    /// Sum over the subset of squared residuals at the selecting iterate.
    double trimmed_loss = 0.0;
};

struct ItsmOptions {
    /// Rescale each (x_i, y_i) by 1/||x_i|| before fitting.
    bool normalize = false;
    /// When positive, a rank-deficient refit falls back to ridge least squares
    /// with this penalty instead of failing. Off by default: a silent penalty
    /// changes the estimator.
    double ridge_fallback = 0.0;
};

/// (y_i - x_i^T beta)^2 for every row.
Vector squared_residuals(const RegressionData& data, std::span<const double> beta);

/// L(beta, S) = sum over S of squared residuals.
double subset_residual_loss(const RegressionData& data, std::span<const double> beta, const Subset& subset);

/// Least squares restricted to the rows in subset.
Vector subset_least_squares(const RegressionData& data, const Subset& subset);

/// Divides each row and its response by the row norm. beta* is preserved and
/// noise_sd is rescaled to match. Throws on a zero row.
RegressionData normalize_rows(const RegressionData& data);

ItsmStep itsm_step(const RegressionData& data, std::span<const double> beta_t, std::size_t k,
                   TieBreak tie_break = TieBreak::by_index, double ridge_fallback = 0.0);

/// Iterative trimmed squares minimization. Starts at the full-sample least
/// squares fit and runs exactly config.iterations steps. A rank-deficient
/// refit raises SingularSystemError tagged with the failing iteration.
BetaEstimate itsm(const RegressionData& data, const TrimConfig& config, const ItsmOptions& options = {});

}  // namespace entest

#endif  // ENTEST_TRIMMED_REGRESSION_HPP
