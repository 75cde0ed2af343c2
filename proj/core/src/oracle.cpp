#include "entest/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "entest/linalg.hpp"
#include "entest/trimmed_mean.hpp"
#include "entest/trimmed_regression.hpp"

namespace entest {

namespace {

void guard(std::size_t n, std::size_t k, std::uint64_t limit) {
    const std::uint64_t count = binomial(n, k);
    if (count > limit) {
        throw ResourceLimitError(count, limit);
    }
}

void check_k(std::size_t k, std::size_t n, const char* who) {
    if (k == 0 || k > n) {
        throw std::invalid_argument(std::string(who) + ": k must lie in [1, n]");
    }
}

// Eigen-extreme of X_S^T X_S for one row subset.
EigenExtremes gram_extremes(const Matrix& design, std::span<const std::size_t> rows) {
    return sym_eig_extremes(SymmetricMatrix(gram(select_rows(design, rows))));
}

PsiEstimate psi_exhaustive(const Matrix& design, std::size_t k, PsiBound bound, std::uint64_t limit) {
    check_k(k, design.rows(), "psi");
    guard(design.rows(), k, limit);
    PsiEstimate est{k, bound == PsiBound::minus ? std::numeric_limits<double>::infinity() : 0.0, PsiMethod::exact,
                    bound, 0};
    for_each_combination(design.rows(), k, [&](const std::vector<std::size_t>& rows) {
        const EigenExtremes e = gram_extremes(design, rows);
        est.value = bound == PsiBound::minus ? std::min(est.value, e.min) : std::max(est.value, e.max);
        ++est.subsets_examined;
    });
    // X_S^T X_S is PSD; clip tiny negative rounding from the eigen solver.
    est.value = std::max(est.value, 0.0);
    return est;
}

}  // namespace

ResourceLimitError::ResourceLimitError(std::uint64_t required, std::uint64_t limit)
    : std::runtime_error("exhaustive search needs " + std::to_string(required) + " subsets, limit is " +
                         std::to_string(limit)),
      required_(required),
      limit_(limit) {}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // result * (n - k + i) / i stays integral at every step.
        const std::uint64_t factor = n - k + i;
        const std::uint64_t g = std::gcd(result, i);
        const std::uint64_t reduced = result / g;
        const std::uint64_t divisor = i / g;
        const std::uint64_t f = factor / divisor;
        if (f != 0 && reduced > std::numeric_limits<std::uint64_t>::max() / f) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        result = reduced * f;
    }
    return result;
}

Vector oracle_mean(const SampleSet& samples, std::size_t k) {
    if (!samples.noise_scale()) {
        throw std::invalid_argument("oracle_mean: samples carry no noise_scale metadata");
    }
    check_k(k, samples.n(), "oracle_mean");
    return subset_mean(samples, Subset(lowest_k_indices(*samples.noise_scale(), k), samples.n()));
}

Vector oracle_ls(const RegressionData& data, std::size_t k) {
    if (!data.noise_sd()) {
        throw std::invalid_argument("oracle_ls: data carries no noise_sd metadata");
    }
    check_k(k, data.n(), "oracle_ls");
    if (k < data.d()) {
        throw std::invalid_argument("oracle_ls: k smaller than the dimension");
    }
    return subset_least_squares(data, Subset(lowest_k_indices(*data.noise_sd(), k), data.n()));
}

TrimmedMeanFit brute_force_trimmed_mean(const SampleSet& samples, std::size_t k) {
    check_k(k, samples.n(), "brute_force_trimmed_mean");
    guard(samples.n(), k, kTrimmedSearchLimit);
    TrimmedMeanFit best;
    best.loss = std::numeric_limits<double>::infinity();
    for_each_combination(samples.n(), k, [&](const std::vector<std::size_t>& rows) {
        Subset s(rows, samples.n());
        Vector mu = subset_mean(samples, s);
        const double loss = subset_mean_loss(samples, mu, s);
        if (loss < best.loss) {
            best = TrimmedMeanFit{std::move(mu), std::move(s), loss};
        }
    });
    return best;
}

TrimmedLsFit brute_force_trimmed_ls(const RegressionData& data, std::size_t k) {
    check_k(k, data.n(), "brute_force_trimmed_ls");
    if (k < data.d()) {
        throw std::invalid_argument("brute_force_trimmed_ls: k smaller than the dimension");
    }
    guard(data.n(), k, kTrimmedSearchLimit);
    TrimmedLsFit best;
    best.loss = std::numeric_limits<double>::infinity();
    bool found = false;
    for_each_combination(data.n(), k, [&](const std::vector<std::size_t>& rows) {
        Subset s(rows, data.n());
        Vector beta;
        try {
            beta = subset_least_squares(data, s);
        } catch (const SingularSystemError&) {
            ++best.skipped;
            return;
        }
        const double loss = subset_residual_loss(data, beta, s);
        if (!found || loss < best.loss) {
            found = true;
            best.beta = std::move(beta);
            best.subset = std::move(s);
            best.loss = loss;
        }
    });
    if (!found) {
        throw std::invalid_argument("brute_force_trimmed_ls: every subset is rank deficient");
    }
    return best;
}

PsiEstimate psi_minus_exact(const Matrix& design, std::size_t k) {
    return psi_exhaustive(design, k, PsiBound::minus, kPsiSearchLimit);
}

PsiEstimate psi_plus_exact(const Matrix& design, std::size_t k) {
    return psi_exhaustive(design, k, PsiBound::plus, kPsiSearchLimit);
}

PsiEstimate psi_minus_sampled(const Matrix& design, std::size_t k, std::uint64_t trials, RngSeed seed) {
    if (trials < 1) {
        throw std::invalid_argument("psi_minus_sampled: trials must be at least 1");
    }
    check_k(k, design.rows(), "psi_minus_sampled");
    const std::size_t n = design.rows();
    if (trials >= binomial(n, k)) {
        PsiEstimate full = psi_exhaustive(design, k, PsiBound::minus, std::numeric_limits<std::uint64_t>::max());
        full.method = PsiMethod::sampled;
        return full;
    }

    Rng rng(seed);
    PsiEstimate est{k, std::numeric_limits<double>::infinity(), PsiMethod::sampled, PsiBound::minus, 0};
    std::vector<std::size_t> pool(n);
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        // Partial Fisher-Yates: the first k slots form a uniform k-subset.
        for (std::size_t i = 0; i < k; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(n - i));
            std::swap(pool[i], pool[j]);
        }
        std::vector<std::size_t> rows(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(rows.begin(), rows.end());
        est.value = std::min(est.value, gram_extremes(design, rows).min);
        ++est.subsets_examined;
    }
    est.value = std::max(est.value, 0.0);
    return est;
}

}  // namespace entest
