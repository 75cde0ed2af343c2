#include "entest/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace entest {

namespace {

const Vector& require_truth(const SampleSet& samples, const char* who) {
    if (!samples.truth_mean() || !samples.noise_scale()) {
        throw std::invalid_argument(std::string(who) + ": needs truth_mean and noise_scale metadata");
    }
    return *samples.truth_mean();
}

}  // namespace

BoundCheckReport summarize_margins(std::string bound_name, Vector margins) {
    BoundCheckReport report;
    report.bound_name = std::move(bound_name);
    report.trials = margins.size();
    report.violations = static_cast<std::size_t>(
        std::count_if(margins.begin(), margins.end(), [](double m) { return m < 0.0; }));
    report.empirical_rate =
        report.trials == 0 ? 1.0 : 1.0 - static_cast<double>(report.violations) / static_cast<double>(report.trials);
    report.details = std::move(margins);
    return report;
}

double lambda_order_statistic(const SampleSet& samples, double alpha) {
    if (!samples.noise_scale()) {
        throw std::invalid_argument("lambda_order_statistic: samples carry no noise_scale metadata");
    }
    Vector lambdas = *samples.noise_scale();
    for (double& v : lambdas) {
        v *= v;
    }
    return order_statistic(lambdas, subset_size(samples.n(), alpha));
}

double sigma_order_statistic(const RegressionData& data, double alpha) {
    if (!data.noise_sd()) {
        throw std::invalid_argument("sigma_order_statistic: data carries no noise_sd metadata");
    }
    return order_statistic(*data.noise_sd(), subset_size(data.n(), alpha));
}

double lemma1_check(const SampleSet& samples, const Subset& subset) {
    const Vector& truth = require_truth(samples, "lemma1_check");
    if (subset.size() == 0) {
        throw std::invalid_argument("lemma1_check: empty subset");
    }
    double lambda_s = 0.0;
    double total = 0.0;
    for (std::size_t i : subset.indices()) {
        const double s = (*samples.noise_scale())[i];
        lambda_s = std::max(lambda_s, s * s);
        total += distance2(samples.point(i), truth);
    }
    const double size = static_cast<double>(subset.size());
    return 2.0 * size * std::sqrt(lambda_s * static_cast<double>(samples.d())) - total;
}

Vector contraction_trace(const IterateTrace& trace, const SampleSet& samples, double alpha) {
    const Vector& truth = require_truth(samples, "contraction_trace");
    const double bias = 2.0 * std::sqrt(static_cast<double>(samples.d()) * lambda_order_statistic(samples, alpha));
    Vector residuals;
    residuals.reserve(trace.steps.size());
    double previous = distance2(trace.initial, truth);
    for (const IterateRecord& step : trace.steps) {
        const double current = distance2(step.estimate, truth);
        residuals.push_back(0.5 * previous + bias - current);
        previous = current;
    }
    return residuals;
}

EnvelopeMargin theorem_error_check(std::span<const double> estimate, const SampleSet& samples, double alpha,
                                   double c) {
    const Vector& truth = require_truth(samples, "theorem_error_check");
    EnvelopeMargin m;
    m.bound = c * std::sqrt(static_cast<double>(samples.d()) * lambda_order_statistic(samples, alpha));
    m.error = distance2(estimate, truth);
    m.margin = m.bound - m.error;
    return m;
}

EnvelopeMargin theorem_error_check(const MeanEstimate& estimate, const SampleSet& samples, double alpha, double c) {
    EnvelopeMargin m = theorem_error_check(estimate.value, samples, alpha, c);
    const double scale = std::sqrt(static_cast<double>(samples.d()) * lambda_order_statistic(samples, alpha));
    const double initial = distance2(estimate.trace.initial, *samples.truth_mean());
    const double steps = static_cast<double>(estimate.trace.steps.size());
    m.initial_term_ok = std::ldexp(initial, -static_cast<int>(steps)) <= 0.1 * scale;
    return m;
}

EnvelopeMargin regression_error_check(std::span<const double> estimate, const RegressionData& data, double alpha,
                                      double c1, double c) {
    if (!data.truth_beta() || !data.noise_sd()) {
        throw std::invalid_argument("regression_error_check: needs truth_beta and noise_sd metadata");
    }
    if (!(c1 > 0.0)) {
        throw std::invalid_argument("regression_error_check: c1 must be positive");
    }
    EnvelopeMargin m;
    m.bound = c * c1 * sigma_order_statistic(data, alpha);
    m.error = distance2(estimate, *data.truth_beta());
    m.margin = m.bound - m.error;
    return m;
}

}  // namespace entest
