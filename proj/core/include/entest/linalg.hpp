#ifndef ENTEST_LINALG_HPP
#define ENTEST_LINALG_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "entest/matrix.hpp"

namespace entest {

/// Dense symmetric matrix. Construction checks symmetry within 1e-12
/// relative to the largest entry and then symmetrizes exactly.
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(Matrix m);

    std::size_t size() const noexcept { return m_.rows(); }
    const Matrix& matrix() const noexcept { return m_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }

private:
    Matrix m_;
};

/// Raised when a least-squares design is numerically rank deficient.
class SingularSystemError : public std::runtime_error {
public:
    SingularSystemError(std::size_t rank, std::size_t cols, std::optional<std::size_t> iteration = {});

    std::size_t rank() const noexcept { return rank_; }
    std::size_t cols() const noexcept { return cols_; }
    /// ITSM iteration during which the failure happened, when known.
    std::optional<std::size_t> iteration() const noexcept { return iteration_; }

    SingularSystemError at_iteration(std::size_t iteration) const;

private:
    std::size_t rank_;
    std::size_t cols_;
    std::optional<std::size_t> iteration_;
};

/// Raised by cholesky() on a non-positive-definite input.
class FactorizationError : public std::runtime_error {
public:
    explicit FactorizationError(std::size_t pivot);
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

inline constexpr double kRankTolerance = 1e-10;

/// Minimizes ||response - design*beta||_2 with Householder QR and column
/// pivoting. A column whose pivoted diagonal |R_jj| falls below
/// kRankTolerance * |R_00| counts as rank deficient.
Vector least_squares(const Matrix& design, std::span<const double> response);

/// Ridge-regularized variant, solved as least squares on the design
/// augmented with sqrt(ridge)*I rows. ridge must be positive.
Vector least_squares_ridge(const Matrix& design, std::span<const double> response, double ridge);

/// Numerical rank under the same pivoted-QR criterion least_squares uses.
std::size_t numerical_rank(const Matrix& design);

struct EigenExtremes {
    double min;
    double max;
};

/// All eigenvalues, ascending, by cyclic Jacobi rotation.
Vector sym_eigenvalues(const SymmetricMatrix& m);

EigenExtremes sym_eig_extremes(const SymmetricMatrix& m);

/// Lower-triangular L with L*Lᵀ = m.
Matrix cholesky(const SymmetricMatrix& m);

}  // namespace entest

#endif  // ENTEST_LINALG_HPP
