#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "entest/linalg.hpp"
#include "entest/random.hpp"

namespace entest {
namespace {

Matrix random_matrix(Rng& rng, std::size_t m, std::size_t n) {
    Matrix a(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) = rng.normal();
        }
    }
    return a;
}

SymmetricMatrix random_spd(Rng& rng, std::size_t d) {
    Matrix g = gram(random_matrix(rng, d + 3, d));
    for (std::size_t i = 0; i < d; ++i) {
        g(i, i) += 0.1;
    }
    return SymmetricMatrix(std::move(g));
}

// Closed-form roots of the characteristic polynomial of a symmetric 3x3
// matrix (trigonometric solution of the depressed cubic).
std::pair<double, double> cubic_extremes(const Matrix& a) {
    const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
    const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) + (a(2, 2) - q) * (a(2, 2) - q) +
                      2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    if (p == 0.0) {
        return {q, q};
    }
    Matrix b(3, 3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            b(i, j) = (a(i, j) - (i == j ? q : 0.0)) / p;
        }
    }
    const double det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                       b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                       b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    const double r = std::clamp(det / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double largest = q + 2.0 * p * std::cos(phi);
    const double smallest = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    return {smallest, largest};
}

TEST(LeastSquares, Examples) {
    const Vector b1 = least_squares(Matrix{{1.0}, {1.0}}, Vector{2.0, 4.0});
    ASSERT_EQ(b1.size(), 1u);
    EXPECT_NEAR(b1[0], 3.0, 1e-14);

    const Vector b2 = least_squares(Matrix{{1.0, 0.0}, {0.0, 1.0}}, Vector{5.0, 7.0});
    EXPECT_NEAR(b2[0], 5.0, 1e-14);
    EXPECT_NEAR(b2[1], 7.0, 1e-14);

    const Vector b3 = least_squares(Matrix{{1.0}, {2.0}, {3.0}}, Vector{2.0, 4.0, 6.0});
    EXPECT_NEAR(b3[0], 2.0, 1e-14);
}

TEST(LeastSquares, RankDeficientReportsRank) {
    try {
        least_squares(Matrix{{1.0, 2.0}, {2.0, 4.0}, {3.0, 6.0}}, Vector{1.0, 2.0, 3.0});
        FAIL() << "expected SingularSystemError";
    } catch (const SingularSystemError& e) {
        EXPECT_EQ(e.rank(), 1u);
        EXPECT_EQ(e.cols(), 2u);
        EXPECT_FALSE(e.iteration().has_value());
    }
    EXPECT_THROW(least_squares(Matrix{{1.0, 0.0}}, Vector{1.0}), SingularSystemError);
    EXPECT_THROW(least_squares(Matrix{{0.0}, {0.0}}, Vector{1.0, 2.0}), SingularSystemError);
    EXPECT_THROW(least_squares(Matrix{{1.0}}, Vector{1.0, 2.0}), std::invalid_argument);
}

TEST(LeastSquares, ResidualOrthogonalToColumns) {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + rng.below(8);
        const std::size_t m = d + rng.below(40);
        const Matrix x = random_matrix(rng, m, d);
        Vector y(m);
        for (double& v : y) {
            v = 10.0 * rng.normal();
        }
        const Vector beta = least_squares(x, y);
        const Vector fitted = multiply(x, beta);
        Vector r(m);
        for (std::size_t i = 0; i < m; ++i) {
            r[i] = y[i] - fitted[i];
        }
        const Matrix xt = x.transpose();
        EXPECT_LE(norm2(multiply(xt, r)), 1e-8 * (1.0 + norm2(multiply(xt, y))));
    }
}

TEST(LeastSquares, MatchesNormalEquationsOnWellConditionedData) {
    Rng rng(22);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 1 + rng.below(6);
        const Matrix x = random_matrix(rng, 3 * d + 5, d);
        Vector y(x.rows());
        for (double& v : y) {
            v = rng.normal();
        }
        // Independent route: Cholesky solve of XᵀX beta = Xᵀy.
        const Matrix l = cholesky(SymmetricMatrix(gram(x)));
        Vector rhs = multiply(x.transpose(), y);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t k = 0; k < i; ++k) {
                rhs[i] -= l(i, k) * rhs[k];
            }
            rhs[i] /= l(i, i);
        }
        for (std::size_t i = d; i-- > 0;) {
            for (std::size_t k = i + 1; k < d; ++k) {
                rhs[i] -= l(k, i) * rhs[k];
            }
            rhs[i] /= l(i, i);
        }
        const Vector beta = least_squares(x, y);
        for (std::size_t j = 0; j < d; ++j) {
            EXPECT_NEAR(beta[j], rhs[j], 1e-9);
        }
    }
}

TEST(LeastSquares, TranslationEquivariant) {
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 1 + rng.below(6);
        const Matrix x = random_matrix(rng, 2 * d + 3, d);
        Vector y(x.rows());
        for (double& v : y) {
            v = rng.normal();
        }
        Vector delta(d);
        for (double& v : delta) {
            v = rng.uniform(-5.0, 5.0);
        }
        const Vector shift = multiply(x, delta);
        Vector y2 = y;
        for (std::size_t i = 0; i < y.size(); ++i) {
            y2[i] += shift[i];
        }
        const Vector b1 = least_squares(x, y);
        const Vector b2 = least_squares(x, y2);
        for (std::size_t j = 0; j < d; ++j) {
            EXPECT_NEAR(b2[j], b1[j] + delta[j], 1e-8);
        }
    }
}

TEST(LeastSquares, RidgeFallbackSolvesRankDeficientSystems) {
    const Vector b = least_squares_ridge(Matrix{{1.0, 1.0}, {1.0, 1.0}}, Vector{2.0, 2.0}, 1e-6);
    EXPECT_NEAR(b[0], 1.0, 1e-5);
    EXPECT_NEAR(b[1], 1.0, 1e-5);
    EXPECT_THROW(least_squares_ridge(Matrix{{1.0}}, Vector{1.0}, 0.0), std::invalid_argument);
}

TEST(SymEig, Examples) {
    const auto id = sym_eig_extremes(SymmetricMatrix(Matrix::identity(3)));
    EXPECT_NEAR(id.min, 1.0, 1e-12);
    EXPECT_NEAR(id.max, 1.0, 1e-12);

    const Vector diag{0.2, 1.0, 4.0};
    const auto dg = sym_eig_extremes(SymmetricMatrix(Matrix::diagonal(diag)));
    EXPECT_NEAR(dg.min, 0.2, 1e-12);
    EXPECT_NEAR(dg.max, 4.0, 1e-12);

    const auto two = sym_eig_extremes(SymmetricMatrix(Matrix{{2.0, 1.0}, {1.0, 2.0}}));
    EXPECT_NEAR(two.min, 1.0, 1e-12);
    EXPECT_NEAR(two.max, 3.0, 1e-12);
}

TEST(SymEig, AsymmetricInputRejected) {
    EXPECT_THROW(SymmetricMatrix(Matrix{{1.0, 2.0}, {0.0, 1.0}}), std::invalid_argument);
    EXPECT_THROW(SymmetricMatrix(Matrix(2, 3)), std::invalid_argument);
}

TEST(SymEig, MatchesCharacteristicPolynomialIn2x2And3x3) {
    Rng rng(24);
    for (int trial = 0; trial < 300; ++trial) {
        Matrix a(3, 3);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = i; j < 3; ++j) {
                a(i, j) = a(j, i) = rng.uniform(-5.0, 5.0);
            }
        }
        const auto [lo, hi] = cubic_extremes(a);
        const auto e = sym_eig_extremes(SymmetricMatrix(a));
        const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
        EXPECT_NEAR(e.min, lo, 1e-8 * scale);
        EXPECT_NEAR(e.max, hi, 1e-8 * scale);

        const double p = rng.uniform(-3.0, 3.0), q = rng.uniform(-3.0, 3.0), r = rng.uniform(-3.0, 3.0);
        const double mid = 0.5 * (p + r);
        const double rad = std::sqrt(0.25 * (p - r) * (p - r) + q * q);
        const auto e2 = sym_eig_extremes(SymmetricMatrix(Matrix{{p, q}, {q, r}}));
        EXPECT_NEAR(e2.min, mid - rad, 1e-8 * std::max(1.0, std::abs(mid) + rad));
        EXPECT_NEAR(e2.max, mid + rad, 1e-8 * std::max(1.0, std::abs(mid) + rad));
    }
}

TEST(SymEig, PositivelyHomogeneous) {
    Rng rng(25);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 2 + rng.below(10);
        const SymmetricMatrix m = random_spd(rng, d);
        const double c = std::exp(rng.uniform(-3.0, 3.0));
        const auto base = sym_eig_extremes(m);
        const auto sc = sym_eig_extremes(SymmetricMatrix(scaled(m.matrix(), c)));
        EXPECT_NEAR(sc.min, c * base.min, 1e-8 * c * base.max);
        EXPECT_NEAR(sc.max, c * base.max, 1e-8 * c * base.max);
    }
}

TEST(SymEig, TraceEqualsEigenvalueSum) {
    Rng rng(26);
    const SymmetricMatrix m = random_spd(rng, 40);
    const Vector eig = sym_eigenvalues(m);
    double trace = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        trace += m(i, i);
    }
    double sum = 0.0;
    for (double e : eig) {
        sum += e;
    }
    EXPECT_NEAR(sum, trace, 1e-9 * trace);
    EXPECT_TRUE(std::is_sorted(eig.begin(), eig.end()));
}

TEST(Cholesky, Examples) {
    EXPECT_EQ(cholesky(SymmetricMatrix(Matrix::identity(3))), Matrix::identity(3));
    const Matrix l1 = cholesky(SymmetricMatrix(Matrix{{4.0, 0.0}, {0.0, 9.0}}));
    EXPECT_DOUBLE_EQ(l1(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(l1(1, 1), 3.0);
    EXPECT_DOUBLE_EQ(l1(1, 0), 0.0);
    const Matrix l2 = cholesky(SymmetricMatrix(Matrix{{4.0, 2.0}, {2.0, 5.0}}));
    EXPECT_DOUBLE_EQ(l2(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(l2(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(l2(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(l2(1, 1), 2.0);
}

TEST(Cholesky, ReportsFailingPivot) {
    try {
        cholesky(SymmetricMatrix(Matrix{{1.0, 2.0}, {2.0, 1.0}}));
        FAIL() << "expected FactorizationError";
    } catch (const FactorizationError& e) {
        EXPECT_EQ(e.pivot(), 1u);
    }
    try {
        cholesky(SymmetricMatrix(Matrix{{-1.0}}));
        FAIL() << "expected FactorizationError";
    } catch (const FactorizationError& e) {
        EXPECT_EQ(e.pivot(), 0u);
    }
}

TEST(Cholesky, RoundTripsRandomSpd) {
    Rng rng(27);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + rng.below(8);
        const SymmetricMatrix m = random_spd(rng, d);
        const Matrix l = cholesky(m);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i + 1; j < d; ++j) {
                EXPECT_EQ(l(i, j), 0.0);
            }
        }
        const Matrix back = multiply(l, l.transpose());
        Matrix diff(d, d);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                diff(i, j) = back(i, j) - m(i, j);
            }
        }
        EXPECT_LE(frobenius_norm(diff), 1e-10 * frobenius_norm(m.matrix()));
    }
}

}  // namespace
}  // namespace entest
