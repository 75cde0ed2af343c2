#include "entest/datagen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace entest {

namespace {

// Substream tags. Changing any of these changes every generated dataset.
constexpr std::uint64_t kPointsStream = 1;
constexpr std::uint64_t kCovarianceStream = 2;
constexpr std::uint64_t kDesignStream = 3;
constexpr std::uint64_t kBetaStream = 4;
constexpr std::uint64_t kNoiseStream = 5;

constexpr double kSetting4MinEigenvalue = 0.2;
constexpr double kHighNoiseVarianceFactor = 100.0;

SampleSet univariate(const MeanSetting& s, std::size_t k) {
    Rng rng = Rng(s.seed).split(kPointsStream);
    Matrix points(s.n, 1);
    Vector scale(s.n);
    for (std::size_t idx = 0; idx < s.n; ++idx) {
        const double i = static_cast<double>(idx + 1);
        double sd = i;
        if (idx < k) {
            sd = s.id == MeanSettingId::s1 ? 1.0 : std::log(idx == 0 ? 2.0 : i);
        }
        points(idx, 0) = sd * rng.normal();
        scale[idx] = sd;
    }
    return SampleSet(std::move(points), Vector(1, 0.0), std::move(scale));
}

SampleSet multivariate(const MeanSetting& s, std::size_t k) {
    const SymmetricMatrix base = s.id == MeanSettingId::s4
                                     ? gen_psd_setting4(s.d, Rng(s.seed).split(kCovarianceStream).key())
                                     : SymmetricMatrix(Matrix::identity(s.d));
    const SymmetricMatrix wide(scaled(base.matrix(), kHighNoiseVarianceFactor));
    const double base_scale = std::sqrt(sym_eig_extremes(base).max);
    const double wide_scale = std::sqrt(kHighNoiseVarianceFactor) * base_scale;

    Rng rng = Rng(s.seed).split(kPointsStream);
    const Vector zero(s.d, 0.0);
    const Matrix low = sample_gaussian(zero, base, k, rng);
    const Matrix high = sample_gaussian(zero, wide, s.n - k, rng);

    Matrix points(s.n, s.d);
    Vector scale(s.n);
    for (std::size_t i = 0; i < s.n; ++i) {
        auto src = i < k ? low.row(i) : high.row(i - k);
        std::copy(src.begin(), src.end(), points.row(i).begin());
        scale[i] = i < k ? base_scale : wide_scale;
    }
    return SampleSet(std::move(points), zero, std::move(scale));
}

}  // namespace

std::optional<MeanSettingId> parse_mean_setting(std::string_view text) noexcept {
    if (text == "1" || text == "s1") return MeanSettingId::s1;
    if (text == "2" || text == "s2") return MeanSettingId::s2;
    if (text == "3" || text == "s3") return MeanSettingId::s3;
    if (text == "4" || text == "s4") return MeanSettingId::s4;
    return std::nullopt;
}

std::string_view to_string(MeanSettingId id) noexcept {
    switch (id) {
        case MeanSettingId::s1: return "1";
        case MeanSettingId::s2: return "2";
        case MeanSettingId::s3: return "3";
        case MeanSettingId::s4: return "4";
    }
    return "?";
}

MeanSetting MeanSetting::make(MeanSettingId id, std::size_t n, double alpha, RngSeed seed) {
    const bool univariate = id == MeanSettingId::s1 || id == MeanSettingId::s2;
    return MeanSetting{id, n, alpha, univariate ? std::size_t{1} : std::size_t{10}, seed};
}

void MeanSetting::validate() const {
    if (n < 5) {
        throw std::invalid_argument("MeanSetting: n must be at least 5");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("MeanSetting: alpha must lie in (0, 1]");
    }
    const bool univariate = id == MeanSettingId::s1 || id == MeanSettingId::s2;
    if (univariate && d != 1) {
        throw std::invalid_argument("MeanSetting: settings 1 and 2 are univariate");
    }
    if (d < 1 || (id == MeanSettingId::s4 && d < 2)) {
        throw std::invalid_argument("MeanSetting: dimension too small for this setting");
    }
}

SampleSet gen_mean_data(const MeanSetting& setting) {
    setting.validate();
    const std::size_t k = subset_size(setting.n, setting.alpha);
    switch (setting.id) {
        case MeanSettingId::s1:
        case MeanSettingId::s2:
            return univariate(setting, k);
        case MeanSettingId::s3:
        case MeanSettingId::s4:
            return multivariate(setting, k);
    }
    throw std::invalid_argument("gen_mean_data: unknown setting");
}

SymmetricMatrix gen_psd_setting4(std::size_t d, RngSeed seed) {
    if (d < 2) {
        throw std::invalid_argument("gen_psd_setting4: d must be at least 2");
    }
    Rng rng(seed);
    Matrix m = Matrix::identity(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const bool nonzero = rng.uniform() < 0.5;
            double value = 0.0;
            if (nonzero) {
                // Open interval: redraw the (probability 2^-53) endpoint.
                do {
                    value = rng.uniform(-0.5, 0.5);
                } while (value == -0.5);
            }
            m(i, j) = value;
            m(j, i) = value;
        }
    }
    const double shift = kSetting4MinEigenvalue - sym_eig_extremes(SymmetricMatrix(m)).min;
    for (std::size_t i = 0; i < d; ++i) {
        m(i, i) += shift;
    }
    return SymmetricMatrix(std::move(m));
}

RegressionData gen_regression_data(std::size_t n, std::size_t d, double alpha, RngSeed seed) {
    if (d < 1 || n <= d) {
        throw std::invalid_argument("gen_regression_data: need n > d >= 1");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("gen_regression_data: alpha must lie in (0, 1]");
    }
    const std::size_t k = subset_size(n, alpha);
    const Rng root(seed);

    Rng design_rng = root.split(kDesignStream);
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            x(i, j) = design_rng.normal();
        }
    }

    Rng beta_rng = root.split(kBetaStream);
    Vector beta(d);
    double norm = 0.0;
    while (norm == 0.0) {
        for (double& b : beta) {
            b = beta_rng.normal();
        }
        norm = norm2(beta);
    }
    for (double& b : beta) {
        b /= norm;
    }

    Rng noise_rng = root.split(kNoiseStream);
    Vector y = multiply(x, beta);
    Vector sd(n);
    for (std::size_t i = 0; i < n; ++i) {
        sd[i] = i < k ? 1.0 : std::sqrt(kHighNoiseVarianceFactor);
        y[i] += sd[i] * noise_rng.normal();
    }
    return RegressionData(std::move(x), std::move(y), std::move(beta), std::move(sd));
}

Matrix sample_gaussian(std::span<const double> mean, const SymmetricMatrix& cov, std::size_t count, Rng& rng) {
    const std::size_t d = cov.size();
    if (mean.size() != d) {
        throw std::invalid_argument("sample_gaussian: mean and covariance dimensions differ");
    }
    const Matrix l = cholesky(cov);
    Matrix out(count, d);
    Vector z(d);
    for (std::size_t r = 0; r < count; ++r) {
        for (double& zi : z) {
            zi = rng.normal();
        }
        auto row = out.row(r);
        for (std::size_t i = 0; i < d; ++i) {
            double s = mean[i];
            for (std::size_t j = 0; j <= i; ++j) {
                s += l(i, j) * z[j];
            }
            row[i] = s;
        }
    }
    return out;
}

RngSeed trial_seed(RngSeed base, std::size_t n, std::size_t trial) noexcept {
    return derive_seed(base, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial));
}

}  // namespace entest
