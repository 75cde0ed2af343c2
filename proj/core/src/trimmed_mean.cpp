#include "entest/trimmed_mean.hpp"

#include <numeric>
#include <stdexcept>

namespace entest {

namespace {

void check_dimension(const SampleSet& samples, std::span<const double> mu) {
    if (mu.size() != samples.d()) {
        throw std::invalid_argument("trimmed mean: estimate dimension does not match the samples");
    }
}

std::optional<double> error_to(const SampleSet& samples, std::span<const double> mu) {
    if (!samples.truth_mean()) {
        return std::nullopt;
    }
    return distance2(mu, *samples.truth_mean());
}

}  // namespace

Vector mean_losses(const SampleSet& samples, std::span<const double> mu) {
    check_dimension(samples, mu);
    Vector losses(samples.n());
    for (std::size_t i = 0; i < samples.n(); ++i) {
        losses[i] = squared_distance(samples.point(i), mu);
    }
    return losses;
}

double subset_mean_loss(const SampleSet& samples, std::span<const double> mu, const Subset& subset) {
    check_dimension(samples, mu);
    double total = 0.0;
    for (std::size_t i : subset.indices()) {
        total += squared_distance(samples.point(i), mu);
    }
    return total;
}

Vector subset_mean(const SampleSet& samples, const Subset& subset) {
    if (subset.size() == 0) {
        throw std::invalid_argument("subset_mean: empty subset");
    }
    Vector mean(samples.d(), 0.0);
    for (std::size_t i : subset.indices()) {
        auto x = samples.point(i);
        for (std::size_t j = 0; j < mean.size(); ++j) {
            mean[j] += x[j];
        }
    }
    const double inv = 1.0 / static_cast<double>(subset.size());
    for (double& m : mean) {
        m *= inv;
    }
    return mean;
}

ItmStep itm_step(const SampleSet& samples, std::span<const double> mu_t, std::size_t k, TieBreak tie_break) {
    const Vector losses = mean_losses(samples, mu_t);
    Subset subset = select_lowest_loss(losses, k, tie_break);
    double trimmed = 0.0;
    for (std::size_t i : subset.indices()) {
        trimmed += losses[i];
    }
    Vector next = subset_mean(samples, subset);
    return ItmStep{std::move(next), std::move(subset), trimmed};
}

MeanEstimate itm(const SampleSet& samples, const TrimConfig& config) {
    config.validate();
    const std::size_t n = samples.n();
    const std::size_t k = subset_size(n, config.alpha);

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    IterateTrace trace;
    trace.initial = subset_mean(samples, Subset(std::move(all), n));
    trace.initial_error = error_to(samples, trace.initial);
    trace.steps.reserve(config.iterations);

    Vector current = trace.initial;
    for (std::size_t t = 0; t < config.iterations; ++t) {
        ItmStep step = itm_step(samples, current, k, config.tie_break);
        IterateRecord record;
        record.refit_loss = subset_mean_loss(samples, step.next, step.subset);
        record.trimmed_loss = step.trimmed_loss;
        record.error_to_truth = error_to(samples, step.next);

        if (!trace.converged_at && t > 0 && step.subset == trace.steps.back().subset &&
            distance2(step.next, current) < config.loss_tolerance) {
            trace.converged_at = t;
        }
        current = step.next;
        record.estimate = std::move(step.next);
        record.subset = std::move(step.subset);
        trace.steps.push_back(std::move(record));
    }
    return MeanEstimate{current, std::move(trace)};
}

}  // namespace entest
