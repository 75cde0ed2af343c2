#include "entest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

namespace entest {

namespace {

std::string singular_message(std::size_t rank, std::size_t cols, std::optional<std::size_t> iteration) {
    std::ostringstream os;
    os << "singular system: numerical rank " << rank << " < " << cols << " columns";
    if (iteration) {
        os << " (iteration " << *iteration << ")";
    }
    return os.str();
}

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kJacobiTolerance = 1e-12;
constexpr int kMaxJacobiSweeps = 100;

struct PivotedQr {
    Matrix r;                       // upper n×n block holds R
    Vector qt_b;                    // Qᵀ b
    std::vector<std::size_t> perm;  // column j of R corresponds to original column perm[j]
    std::size_t rank = 0;
};

// Householder QR with column pivoting, applied to b along the way.
PivotedQr pivoted_qr(const Matrix& a, std::span<const double> b) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    PivotedQr qr{a, Vector(b.begin(), b.end()), std::vector<std::size_t>(n), 0};
    std::iota(qr.perm.begin(), qr.perm.end(), std::size_t{0});
    Matrix& w = qr.r;
    Vector v(m);

    const std::size_t steps = std::min(m, n);
    for (std::size_t j = 0; j < steps; ++j) {
        // Exact trailing column norms; O(mn) per step keeps the total at O(mn²).
        std::size_t best = j;
        double best_norm = -1.0;
        for (std::size_t c = j; c < n; ++c) {
            double s = 0.0;
            for (std::size_t i = j; i < m; ++i) {
                s += w(i, c) * w(i, c);
            }
            if (s > best_norm) {
                best_norm = s;
                best = c;
            }
        }
        if (best != j) {
            for (std::size_t i = 0; i < m; ++i) {
                std::swap(w(i, j), w(i, best));
            }
            std::swap(qr.perm[j], qr.perm[best]);
        }

        const double xnorm = std::sqrt(best_norm);
        if (xnorm == 0.0) {
            continue;
        }
        const double alpha = w(j, j) > 0.0 ? -xnorm : xnorm;
        double vnorm2 = 0.0;
        for (std::size_t i = j; i < m; ++i) {
            v[i] = w(i, j);
        }
        v[j] -= alpha;
        for (std::size_t i = j; i < m; ++i) {
            vnorm2 += v[i] * v[i];
        }
        w(j, j) = alpha;
        for (std::size_t i = j + 1; i < m; ++i) {
            w(i, j) = 0.0;
        }
        if (vnorm2 == 0.0) {
            continue;
        }
        const double scale = 2.0 / vnorm2;
        for (std::size_t c = j + 1; c < n; ++c) {
            double s = 0.0;
            for (std::size_t i = j; i < m; ++i) {
                s += v[i] * w(i, c);
            }
            s *= scale;
            for (std::size_t i = j; i < m; ++i) {
                w(i, c) -= s * v[i];
            }
        }
        double s = 0.0;
        for (std::size_t i = j; i < m; ++i) {
            s += v[i] * qr.qt_b[i];
        }
        s *= scale;
        for (std::size_t i = j; i < m; ++i) {
            qr.qt_b[i] -= s * v[i];
        }
    }

    const double lead = steps > 0 ? std::abs(w(0, 0)) : 0.0;
    for (std::size_t j = 0; j < steps; ++j) {
        if (lead > 0.0 && std::abs(w(j, j)) > kRankTolerance * lead) {
            ++qr.rank;
        } else {
            break;
        }
    }
    return qr;
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw std::invalid_argument("SymmetricMatrix: matrix is not square");
    }
    if (!all_finite(m_.data())) {
        throw std::invalid_argument("SymmetricMatrix: non-finite entry");
    }
    double scale = 0.0;
    for (double x : m_.data()) {
        scale = std::max(scale, std::abs(x));
    }
    const std::size_t d = m_.rows();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            if (std::abs(m_(i, j) - m_(j, i)) > kSymmetryTolerance * scale) {
                std::ostringstream os;
                os << "SymmetricMatrix: entries (" << i << "," << j << ") and (" << j << "," << i
                   << ") differ";
                throw std::invalid_argument(os.str());
            }
            const double avg = 0.5 * (m_(i, j) + m_(j, i));
            m_(i, j) = avg;
            m_(j, i) = avg;
        }
    }
}

SingularSystemError::SingularSystemError(std::size_t rank, std::size_t cols, std::optional<std::size_t> iteration)
    : std::runtime_error(singular_message(rank, cols, iteration)), rank_(rank), cols_(cols), iteration_(iteration) {}

SingularSystemError SingularSystemError::at_iteration(std::size_t iteration) const {
    return SingularSystemError(rank_, cols_, iteration);
}

FactorizationError::FactorizationError(std::size_t pivot)
    : std::runtime_error("cholesky: matrix is not positive definite (pivot " + std::to_string(pivot) + ")"),
      pivot_(pivot) {}

Vector least_squares(const Matrix& design, std::span<const double> response) {
    if (design.rows() != response.size()) {
        throw std::invalid_argument("least_squares: design rows and response length differ");
    }
    const std::size_t n = design.cols();
    if (n == 0) {
        throw std::invalid_argument("least_squares: design has no columns");
    }
    if (design.rows() < n) {
        throw SingularSystemError(design.rows(), n);
    }
    const PivotedQr qr = pivoted_qr(design, response);
    if (qr.rank < n) {
        throw SingularSystemError(qr.rank, n);
    }
    Vector z(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = qr.qt_b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) {
            s -= qr.r(ii, j) * z[j];
        }
        z[ii] = s / qr.r(ii, ii);
    }
    Vector beta(n);
    for (std::size_t j = 0; j < n; ++j) {
        beta[qr.perm[j]] = z[j];
    }
    return beta;
}

Vector least_squares_ridge(const Matrix& design, std::span<const double> response, double ridge) {
    if (!(ridge > 0.0)) {
        throw std::invalid_argument("least_squares_ridge: ridge must be positive");
    }
    if (design.rows() != response.size()) {
        throw std::invalid_argument("least_squares_ridge: design rows and response length differ");
    }
    const std::size_t m = design.rows();
    const std::size_t n = design.cols();
    Matrix augmented(m + n, n);
    Vector rhs(m + n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        std::copy(design.row(i).begin(), design.row(i).end(), augmented.row(i).begin());
        rhs[i] = response[i];
    }
    const double root = std::sqrt(ridge);
    for (std::size_t j = 0; j < n; ++j) {
        augmented(m + j, j) = root;
    }
    return least_squares(augmented, rhs);
}

std::size_t numerical_rank(const Matrix& design) {
    if (design.cols() == 0 || design.rows() == 0) {
        return 0;
    }
    const Vector zeros(design.rows(), 0.0);
    return pivoted_qr(design, zeros).rank;
}

Vector sym_eigenvalues(const SymmetricMatrix& sym) {
    Matrix a = sym.matrix();
    const std::size_t d = a.rows();
    const double total = frobenius_norm(a);
    Vector eig(d);
    if (total == 0.0) {
        return eig;
    }

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                if (i != j) {
                    s += a(i, j) * a(i, j);
                }
            }
        }
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < kMaxJacobiSweeps && off_norm() > kJacobiTolerance * total; ++sweep) {
        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < d; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }

    for (std::size_t i = 0; i < d; ++i) {
        eig[i] = a(i, i);
    }
    std::sort(eig.begin(), eig.end());
    return eig;
}

EigenExtremes sym_eig_extremes(const SymmetricMatrix& m) {
    if (m.size() == 0) {
        throw std::invalid_argument("sym_eig_extremes: empty matrix");
    }
    const Vector eig = sym_eigenvalues(m);
    return {eig.front(), eig.back()};
}

Matrix cholesky(const SymmetricMatrix& sym) {
    const Matrix& a = sym.matrix();
    const std::size_t d = a.rows();
    Matrix l(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) {
            diag -= l(j, k) * l(j, k);
        }
        if (!(diag > 0.0)) {
            throw FactorizationError(j);
        }
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < d; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= l(i, k) * l(j, k);
            }
            l(i, j) = s / ljj;
        }
    }
    return l;
}

}  // namespace entest
