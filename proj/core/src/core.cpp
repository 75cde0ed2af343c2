#include "entest/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace entest {

namespace {

void require_nonnegative(const Vector& v, std::size_t n, const char* what) {
    if (v.size() != n) {
        throw std::invalid_argument(std::string(what) + ": length does not match the number of samples");
    }
    for (double x : v) {
        if (!std::isfinite(x) || x < 0.0) {
            throw std::invalid_argument(std::string(what) + ": entries must be finite and nonnegative");
        }
    }
}

}  // namespace

SampleSet::SampleSet(Matrix points, std::optional<Vector> truth_mean, std::optional<Vector> noise_scale)
    : points_(std::move(points)), truth_mean_(std::move(truth_mean)), noise_scale_(std::move(noise_scale)) {
    if (points_.rows() == 0 || points_.cols() == 0) {
        throw std::invalid_argument("SampleSet: need n >= 1 and d >= 1");
    }
    if (!all_finite(points_.data())) {
        throw std::invalid_argument("SampleSet: non-finite point coordinate");
    }
    if (truth_mean_ && (truth_mean_->size() != d() || !all_finite(*truth_mean_))) {
        throw std::invalid_argument("SampleSet: truth_mean must be a finite d-vector");
    }
    if (noise_scale_) {
        require_nonnegative(*noise_scale_, n(), "SampleSet noise_scale");
    }
}

RegressionData::RegressionData(Matrix design, Vector response, std::optional<Vector> truth_beta,
                               std::optional<Vector> noise_sd)
    : design_(std::move(design)),
      response_(std::move(response)),
      truth_beta_(std::move(truth_beta)),
      noise_sd_(std::move(noise_sd)) {
    if (design_.rows() == 0 || design_.cols() == 0) {
        throw std::invalid_argument("RegressionData: need n >= 1 and d >= 1");
    }
    if (design_.rows() != response_.size()) {
        throw std::invalid_argument("RegressionData: design rows and response length differ");
    }
    if (!all_finite(design_.data()) || !all_finite(response_)) {
        throw std::invalid_argument("RegressionData: non-finite entry");
    }
    if (truth_beta_ && (truth_beta_->size() != d() || !all_finite(*truth_beta_))) {
        throw std::invalid_argument("RegressionData: truth_beta must be a finite d-vector");
    }
    if (noise_sd_) {
        require_nonnegative(*noise_sd_, n(), "RegressionData noise_sd");
    }
}

void TrimConfig::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("TrimConfig: alpha must lie in (0, 1]");
    }
    if (iterations < 1) {
        throw std::invalid_argument("TrimConfig: iterations must be at least 1");
    }
    if (!(loss_tolerance >= 0.0)) {
        throw std::invalid_argument("TrimConfig: loss_tolerance must be nonnegative");
    }
}

AlphaRegime mean_alpha_regime(double alpha) noexcept {
    if (alpha >= 0.8) {
        return AlphaRegime::guaranteed;
    }
    if (alpha > 2.0 / 3.0) {
        return AlphaRegime::contraction;
    }
    return AlphaRegime::unsupported;
}

std::string_view to_string(AlphaRegime regime) noexcept {
    switch (regime) {
        case AlphaRegime::guaranteed:
            return "guaranteed";
        case AlphaRegime::contraction:
            return "contraction";
        case AlphaRegime::unsupported:
            return "unsupported";
    }
    return "unsupported";
}

double regression_alpha_threshold(double c1) {
    if (!(c1 > 0.0)) {
        throw std::invalid_argument("regression_alpha_threshold: c1 must be positive");
    }
    return 4.0 * c1 / (1.0 + 4.0 * c1);
}

Subset::Subset(std::vector<std::size_t> indices, std::size_t n) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
        throw std::invalid_argument("Subset: duplicate index");
    }
    if (!indices_.empty() && indices_.back() >= n) {
        throw std::invalid_argument("Subset: index out of range");
    }
}

bool Subset::contains(std::size_t i) const noexcept {
    return std::binary_search(indices_.begin(), indices_.end(), i);
}

std::size_t subset_size(std::size_t n, double alpha) {
    if (n == 0 || !(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("subset_size: need n >= 1 and alpha in (0, 1]");
    }
    const double product = alpha * static_cast<double>(n);
    const double nearest = std::round(product);
    const double snapped = std::abs(product - nearest) <= 1e-9 ? nearest : std::ceil(product);
    const auto k = static_cast<std::size_t>(snapped);
    return std::clamp<std::size_t>(k, 1, n);
}

std::vector<std::size_t> lowest_k_indices(std::span<const double> keys, std::size_t k) {
    if (k > keys.size()) {
        throw std::invalid_argument("select_lowest_loss: k exceeds the number of samples");
    }
    std::vector<std::size_t> order(keys.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto before = [&](std::size_t a, std::size_t b) {
        return keys[a] < keys[b] || (keys[a] == keys[b] && a < b);
    };
    if (k < order.size()) {
        std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), before);
    }
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

Subset select_lowest_loss(std::span<const double> losses, std::size_t k, TieBreak tie_break) {
    if (tie_break != TieBreak::by_index) {
        throw std::invalid_argument("select_lowest_loss: unknown tie-break policy");
    }
    if (!all_finite(losses)) {
        throw std::invalid_argument("select_lowest_loss: non-finite loss");
    }
    return Subset(lowest_k_indices(losses, k), losses.size());
}

double order_statistic(std::span<const double> values, std::size_t k) {
    if (k == 0 || k > values.size()) {
        throw std::invalid_argument("order_statistic: k out of range");
    }
    Vector copy(values.begin(), values.end());
    std::nth_element(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(k - 1), copy.end());
    return copy[k - 1];
}

}  // namespace entest
