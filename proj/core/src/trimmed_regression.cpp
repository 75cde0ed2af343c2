#include "entest/trimmed_regression.hpp"

#include <stdexcept>
#include <string>

#include "entest/linalg.hpp"

namespace entest {

namespace {

void check_dimension(const RegressionData& data, std::span<const double> beta) {
    if (beta.size() != data.d()) {
        throw std::invalid_argument("trimmed regression: coefficient dimension does not match the design");
    }
}

std::optional<double> error_to(const RegressionData& data, std::span<const double> beta) {
    if (!data.truth_beta()) {
        return std::nullopt;
    }
    return distance2(beta, *data.truth_beta());
}

Vector fit_subset(const RegressionData& data, const Subset& subset, double ridge_fallback) {
    const Matrix x = select_rows(data.design(), subset.indices());
    Vector y;
    y.reserve(subset.size());
    for (std::size_t i : subset.indices()) {
        y.push_back(data.response()[i]);
    }
    try {
        return least_squares(x, y);
    } catch (const SingularSystemError&) {
        if (ridge_fallback > 0.0) {
            return least_squares_ridge(x, y, ridge_fallback);
        }
        throw;
    }
}

}  // namespace

Vector squared_residuals(const RegressionData& data, std::span<const double> beta) {
    check_dimension(data, beta);
    Vector r(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double e = data.response()[i] - dot(data.design().row(i), beta);
        r[i] = e * e;
    }
    return r;
}

double subset_residual_loss(const RegressionData& data, std::span<const double> beta, const Subset& subset) {
    check_dimension(data, beta);
    double total = 0.0;
    for (std::size_t i : subset.indices()) {
        const double e = data.response()[i] - dot(data.design().row(i), beta);
        total += e * e;
    }
    return total;
}

Vector subset_least_squares(const RegressionData& data, const Subset& subset) {
    return fit_subset(data, subset, 0.0);
}

RegressionData normalize_rows(const RegressionData& data) {
    Matrix x = data.design();
    Vector y = data.response();
    std::optional<Vector> sd = data.noise_sd();
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double norm = norm2(x.row(i));
        if (norm == 0.0) {
            throw std::invalid_argument("normalize_rows: row " + std::to_string(i) + " is zero");
        }
        for (double& v : x.row(i)) {
            v /= norm;
        }
        y[i] /= norm;
        if (sd) {
            (*sd)[i] /= norm;
        }
    }
    return RegressionData(std::move(x), std::move(y), data.truth_beta(), std::move(sd));
}

ItsmStep itsm_step(const RegressionData& data, std::span<const double> beta_t, std::size_t k, TieBreak tie_break,
                   double ridge_fallback) {
    if (k < data.d()) {
        throw std::invalid_argument("itsm_step: subset size smaller than the dimension");
    }
    const Vector residuals = squared_residuals(data, beta_t);
    Subset subset = select_lowest_loss(residuals, k, tie_break);
    double trimmed = 0.0;
    for (std::size_t i : subset.indices()) {
        trimmed += residuals[i];
    }
    Vector next = fit_subset(data, subset, ridge_fallback);
    return ItsmStep{std::move(next), std::move(subset), trimmed};
}

BetaEstimate itsm(const RegressionData& input, const TrimConfig& config, const ItsmOptions& options) {
    config.validate();
    if (input.n() <= input.d()) {
        throw std::invalid_argument("itsm: need more rows than columns");
    }
    const RegressionData data = options.normalize ? normalize_rows(input) : input;
    const std::size_t k = subset_size(data.n(), config.alpha);
    if (k < data.d()) {
        throw std::invalid_argument("itsm: ceil(alpha n) is smaller than the dimension");
    }

    IterateTrace trace;
    trace.initial = least_squares(data.design(), data.response());
    trace.initial_error = error_to(data, trace.initial);
    trace.steps.reserve(config.iterations);

    Vector current = trace.initial;
    for (std::size_t t = 0; t < config.iterations; ++t) {
        ItsmStep step;
        try {
            step = itsm_step(data, current, k, config.tie_break, options.ridge_fallback);
        } catch (const SingularSystemError& e) {
            throw e.at_iteration(t);
        }
        IterateRecord record;
        record.trimmed_loss = step.trimmed_loss;
        record.refit_loss = subset_residual_loss(data, step.next, step.subset);
        record.error_to_truth = error_to(data, step.next);
        if (!trace.converged_at && t > 0 && step.subset == trace.steps.back().subset &&
            distance2(step.next, current) < config.loss_tolerance) {
            trace.converged_at = t;
        }
        current = step.next;
        record.estimate = std::move(step.next);
        record.subset = std::move(step.subset);
        trace.steps.push_back(std::move(record));
    }
    return BetaEstimate{current, std::move(trace)};
}

}  // namespace entest
