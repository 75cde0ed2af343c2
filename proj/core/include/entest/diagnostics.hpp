#ifndef ENTEST_DIAGNOSTICS_HPP
#define ENTEST_DIAGNOSTICS_HPP

#include <string>

#include "entest/core.hpp"
#include "entest/trimmed_mean.hpp"

namespace entest {

/// Aggregate of per-check margins; a negative margin is a violation.
struct BoundCheckReport {
    std::size_t trials = 0;
    std::size_t violations = 0;
    std::string bound_name;
    /// 1 - violations / trials.
    double empirical_rate = 1.0;
    Vector details;
};

BoundCheckReport summarize_margins(std::string bound_name, Vector margins);

inline constexpr double kDefaultEnvelopeConstant = 5.0;

/// lambda_(k): the k-th smallest squared noise_scale, k = ceil(alpha n).
double lambda_order_statistic(const SampleSet& samples, double alpha);
/// sigma_(k): the k-th smallest noise_sd, k = ceil(alpha n).
double sigma_order_statistic(const RegressionData& data, double alpha);

/// 2|S| sqrt(lambda_S d) - sum over S of ||x_i - mu*||, where lambda_S is the
/// largest squared noise_scale in S.
double lemma1_check(const SampleSet& samples, const Subset& subset);

/// Per-step residual of the one-step contraction
///   ||mu_{t+1} - mu*|| <= 1/2 ||mu_t - mu*|| + 2 sqrt(d lambda_(k)),
/// as RHS - LHS, one entry per recorded step.
Vector contraction_trace(const IterateTrace& trace, const SampleSet& samples, double alpha);

struct EnvelopeMargin {
    double margin = 0.0;
    double bound = 0.0;
    double error = 0.0;
    /// Whether 2^-T ||theta_0 - theta*|| is below a tenth of the bias scale,
    /// the regime in which the envelope is meant to apply. Only set by the
    /// overloads that see the trace.
    bool initial_term_ok = true;
};

/// c sqrt(d lambda_(k)) - ||mu_T - mu*||.
EnvelopeMargin theorem_error_check(std::span<const double> estimate, const SampleSet& samples, double alpha,
                                   double c = kDefaultEnvelopeConstant);
EnvelopeMargin theorem_error_check(const MeanEstimate& estimate, const SampleSet& samples, double alpha,
                                   double c = kDefaultEnvelopeConstant);

/// c c1 sigma_(k) - ||beta_T - beta*||.
EnvelopeMargin regression_error_check(std::span<const double> estimate, const RegressionData& data, double alpha,
                                      double c1, double c = kDefaultEnvelopeConstant);

}  // namespace entest

#endif  // ENTEST_DIAGNOSTICS_HPP
