#ifndef ENTEST_CORE_HPP
#define ENTEST_CORE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "entest/matrix.hpp"

namespace entest {

/// n points in d dimensions. truth_mean and noise_scale are generator
/// metadata: the common mean and each sample's sqrt(lambda_max(Sigma_i)).
class SampleSet {
public:
    explicit SampleSet(Matrix points, std::optional<Vector> truth_mean = {},
                       std::optional<Vector> noise_scale = {});

    std::size_t n() const noexcept { return points_.rows(); }
    std::size_t d() const noexcept { return points_.cols(); }
    const Matrix& points() const noexcept { return points_; }
    std::span<const double> point(std::size_t i) const noexcept { return points_.row(i); }
    const std::optional<Vector>& truth_mean() const noexcept { return truth_mean_; }
    const std::optional<Vector>& noise_scale() const noexcept { return noise_scale_; }

private:
    Matrix points_;
    std::optional<Vector> truth_mean_;
    std::optional<Vector> noise_scale_;
};

/// y = X beta* + eps with per-row noise standard deviations sigma_i.
class RegressionData {
public:
    RegressionData(Matrix design, Vector response, std::optional<Vector> truth_beta = {},
                   std::optional<Vector> noise_sd = {});

    std::size_t n() const noexcept { return design_.rows(); }
    std::size_t d() const noexcept { return design_.cols(); }
    const Matrix& design() const noexcept { return design_; }
    const Vector& response() const noexcept { return response_; }
    const std::optional<Vector>& truth_beta() const noexcept { return truth_beta_; }
    const std::optional<Vector>& noise_sd() const noexcept { return noise_sd_; }

private:
    Matrix design_;
    Vector response_;
    std::optional<Vector> truth_beta_;
    std::optional<Vector> noise_sd_;
};

enum class TieBreak { by_index };

struct TrimConfig {
    double alpha = 0.8;
    std::size_t iterations = 20;
    /// Estimate movement below this, with a repeated subset, marks convergence.
    double loss_tolerance = 1e-12;
    TieBreak tie_break = TieBreak::by_index;

    /// Throws std::invalid_argument unless 0 < alpha <= 1 and iterations >= 1.
    void validate() const;
};

/// Where a trimming fraction sits relative to the known guarantees for ITM.
enum class AlphaRegime {
    guaranteed,   // alpha >= 4/5
    contraction,  // 2/3 < alpha < 4/5: contraction factor still below one
    unsupported,  // alpha <= 2/3
};

AlphaRegime mean_alpha_regime(double alpha) noexcept;
std::string_view to_string(AlphaRegime regime) noexcept;

/// Smallest alpha with a regression guarantee for conditioning constant c1: 4c1/(1+4c1).
double regression_alpha_threshold(double c1);

/// Sorted, duplicate-free row indices into a data set of known size.
class Subset {
public:
    Subset() = default;
    /// Sorts the indices; throws std::invalid_argument on duplicates or index >= n.
    Subset(std::vector<std::size_t> indices, std::size_t n);

    std::span<const std::size_t> indices() const noexcept { return indices_; }
    std::size_t size() const noexcept { return indices_.size(); }
    bool contains(std::size_t i) const noexcept;

    friend bool operator==(const Subset&, const Subset&) = default;
    friend auto operator<=>(const Subset& a, const Subset& b) = default;

private:
    std::vector<std::size_t> indices_;
};

/// One alternating step. trimmed_loss is L(theta_t, S_t), the loss at the
/// selecting iterate; refit_loss is L(theta_{t+1}, S_t) after re-estimation.
struct IterateRecord {
    Vector estimate;  // theta_{t+1}
    Subset subset;    // S_t
    double trimmed_loss = 0.0;
    double refit_loss = 0.0;
    std::optional<double> error_to_truth;
};

struct IterateTrace {
    Vector initial;  // theta_0
    std::optional<double> initial_error;
    std::vector<IterateRecord> steps;
    /// First step index t at which S_t == S_{t-1} and the estimate moved less than the tolerance.
    std::optional<std::size_t> converged_at;
};

/// ceil(alpha * n), with products within 1e-9 of an integer snapped first.
std::size_t subset_size(std::size_t n, double alpha);

/// Indices of the k smallest losses, ties broken by ascending index.
Subset select_lowest_loss(std::span<const double> losses, std::size_t k, TieBreak tie_break = TieBreak::by_index);

/// k-th smallest value (1-based k).
double order_statistic(std::span<const double> values, std::size_t k);

/// Row indices of the k smallest keys, ties by ascending index. Same ordering
/// rule as select_lowest_loss, for callers ranking by metadata instead of loss.
std::vector<std::size_t> lowest_k_indices(std::span<const double> keys, std::size_t k);

}  // namespace entest

#endif  // ENTEST_CORE_HPP
