#ifndef ENTEST_ORACLE_HPP
#define ENTEST_ORACLE_HPP

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "entest/core.hpp"
#include "entest/random.hpp"

namespace entest {

/// Raised when an exhaustive search would exceed its subset budget.
class ResourceLimitError : public std::runtime_error {
public:
    ResourceLimitError(std::uint64_t required, std::uint64_t limit);
    std::uint64_t required() const noexcept { return required_; }
    std::uint64_t limit() const noexcept { return limit_; }

private:
    std::uint64_t required_;
    std::uint64_t limit_;
};

inline constexpr std::uint64_t kTrimmedSearchLimit = 1'000'000;
inline constexpr std::uint64_t kPsiSearchLimit = 100'000;

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept;

/// Mean of the k samples with the smallest noise_scale (ties by index).
Vector oracle_mean(const SampleSet& samples, std::size_t k);

/// Least squares over the k rows with the smallest noise_sd (ties by index).
Vector oracle_ls(const RegressionData& data, std::size_t k);

struct TrimmedMeanFit {
    Vector mu;
    Subset subset;
    double loss = 0.0;
};

/// Global minimizer of the trimmed squared loss by enumerating every size-k
/// subset in lexicographic order; the first minimum wins ties.
TrimmedMeanFit brute_force_trimmed_mean(const SampleSet& samples, std::size_t k);

struct TrimmedLsFit {
    Vector beta;
    Subset subset;
    double loss = 0.0;
    /// Subsets skipped because their rows were rank deficient.
    std::uint64_t skipped = 0;
};

/// Exhaustive least trimmed squares. Throws std::invalid_argument when every
/// subset is rank deficient.
TrimmedLsFit brute_force_trimmed_ls(const RegressionData& data, std::size_t k);

enum class PsiMethod { exact, sampled };
enum class PsiBound { minus, plus };

/// psi-(k): min over |S| = k of lambda_min(X_S^T X_S); psi+(k): max of lambda_max.
struct PsiEstimate {
    std::size_t k = 0;
    double value = 0.0;
    PsiMethod method = PsiMethod::exact;
    PsiBound bound = PsiBound::minus;
    std::uint64_t subsets_examined = 0;
};

PsiEstimate psi_minus_exact(const Matrix& design, std::size_t k);
PsiEstimate psi_plus_exact(const Matrix& design, std::size_t k);

/// Minimum of lambda_min(X_S^T X_S) over `trials` uniformly drawn size-k
/// subsets. When trials >= C(n, k) every subset is visited instead, so the
/// result equals psi_minus_exact.
PsiEstimate psi_minus_sampled(const Matrix& design, std::size_t k, std::uint64_t trials, RngSeed seed);

/// Visits every size-k subset of [0, n) in lexicographic order. The callback
/// receives the sorted index combination.
template <typename Visit>
void for_each_combination(std::size_t n, std::size_t k, Visit&& visit) {
    if (k > n) {
        return;
    }
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) {
        idx[i] = i;
    }
    while (true) {
        visit(std::as_const(idx));
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == n - k + (pos - 1)) {
            --pos;
        }
        if (pos == 0) {
            return;
        }
        ++idx[pos - 1];
        for (std::size_t j = pos; j < k; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

}  // namespace entest

#endif  // ENTEST_ORACLE_HPP
