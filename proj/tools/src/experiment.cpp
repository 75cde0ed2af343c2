#include "entest/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"

#include "entest/datagen.hpp"
#include "entest/trimmed_mean.hpp"
#include "entest/trimmed_regression.hpp"

namespace entest::cli {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kPsiDesignStream = 0x7073690000000001ULL;
constexpr std::uint64_t kPsiSampleStream = 0x7073690000000002ULL;

template <typename Fn>
auto timed(bool enabled, double& elapsed_ms, Fn&& fn) {
    const auto start = enabled ? Clock::now() : Clock::time_point{};
    auto result = fn();
    if (enabled) {
        elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    }
    return result;
}

MeanSettingId mean_setting_id(const ExperimentConfig& config) {
    const auto id = parse_mean_setting(config.setting);
    if (!id) {
        throw ConfigError("unknown mean setting '" + config.setting + "' (expected 1, 2, 3 or 4)");
    }
    return *id;
}

MeanSetting mean_setting(const ExperimentConfig& config, std::size_t n, RngSeed seed) {
    MeanSetting s = MeanSetting::make(mean_setting_id(config), n, config.alpha, seed);
    s.d = config.dimension();
    return s;
}

TrimConfig trim_config(const ExperimentConfig& config) {
    TrimConfig tc;
    tc.alpha = config.alpha;
    tc.iterations = config.iterations;
    return tc;
}

struct TrialPair {
    TrialResult estimator;
    TrialResult oracle;
};

std::vector<TrialResult> finish_rows(std::vector<TrialPair> pairs) {
    std::vector<TrialResult> rows;
    rows.reserve(pairs.size() * 2);
    for (auto& p : pairs) {
        rows.push_back(std::move(p.estimator));
        rows.push_back(std::move(p.oracle));
    }
    std::sort(rows.begin(), rows.end(), [](const TrialResult& a, const TrialResult& b) {
        return std::tie(a.method, a.n, a.trial_index) < std::tie(b.method, b.n, b.trial_index);
    });

    struct Acc {
        std::size_t d = 0;
        double error = 0.0;
        double runtime = 0.0;
        std::size_t count = 0;
    };
    std::map<std::pair<std::string, std::size_t>, Acc> groups;
    for (const auto& r : rows) {
        Acc& a = groups[{r.method, r.n}];
        a.d = r.d;
        a.error += r.final_error;
        a.runtime += r.runtime_ms;
        ++a.count;
    }
    for (const auto& [key, acc] : groups) {
        TrialResult agg;
        agg.method = key.first;
        agg.n = key.second;
        agg.d = acc.d;
        agg.trial_index = -1;
        agg.final_error = acc.error / static_cast<double>(acc.count);
        agg.runtime_ms = acc.runtime / static_cast<double>(acc.count);
        rows.push_back(std::move(agg));
    }
    return rows;
}

template <typename TrialFn>
std::vector<TrialResult> run_paired(const ExperimentConfig& config, TrialFn&& trial) {
    config.validate();
    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (std::size_t n : config.n_list) {
        for (std::size_t r = 1; r <= config.trials; ++r) {
            jobs.emplace_back(n, r);
        }
    }
    std::vector<TrialPair> pairs(jobs.size());
    parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
        pairs[j] = trial(jobs[j].first, jobs[j].second, trial_seed(config.seed, jobs[j].first, jobs[j].second));
    });
    return finish_rows(std::move(pairs));
}

void write_text(const std::string& path, const std::string& text, std::ostream* fallback) {
    if ((path.empty() || path == "-") && fallback != nullptr) {
        *fallback << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    f << text;
    f.flush();
    if (!f) {
        throw IoError("failed writing '" + path + "'");
    }
}

Matrix normalized_gaussian_design(std::size_t n, std::size_t d, RngSeed seed) {
    Rng rng(seed);
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        while (norm == 0.0) {
            for (double& v : x.row(i)) {
                v = rng.normal();
            }
            norm = norm2(x.row(i));
        }
        for (double& v : x.row(i)) {
            v /= norm;
        }
    }
    return x;
}

nlohmann::ordered_json psi_json(const PsiEstimate& p) {
    return {{"k", p.k},
            {"value", p.value},
            {"method", p.method == PsiMethod::exact ? "exact" : "sampled"},
            {"subsets_examined", p.subsets_examined}};
}

}  // namespace

void ExperimentConfig::validate() const {
    if (n_list.empty()) {
        throw ConfigError("--n needs at least one sample size");
    }
    for (std::size_t i = 1; i < n_list.size(); ++i) {
        if (n_list[i] <= n_list[i - 1]) {
            throw ConfigError("--n must be strictly increasing");
        }
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ConfigError("--alpha must lie in (0, 1]");
    }
    if (iterations < 1) {
        throw ConfigError("--iters must be at least 1");
    }
    if (trials < 1) {
        throw ConfigError("--trials must be at least 1");
    }
    if (!(envelope_c > 0.0)) {
        throw ConfigError("--envelope-c must be positive");
    }
    const bool regression = command == Command::regression || (command == Command::export_data && setting == "regression");
    if (regression) {
        const std::size_t dim = dimension();
        if (dim < 1) {
            throw ConfigError("--d must be at least 1");
        }
        for (std::size_t n : n_list) {
            if (n <= dim) {
                throw ConfigError("regression needs n > d for every n");
            }
            if (subset_size(n, alpha) < dim) {
                throw ConfigError("regression needs ceil(alpha n) >= d for every n");
            }
        }
    } else {
        const MeanSettingId id = mean_setting_id(*this);
        for (std::size_t n : n_list) {
            if (n < 5) {
                throw ConfigError("mean settings need n >= 5");
            }
        }
        const bool univariate = id == MeanSettingId::s1 || id == MeanSettingId::s2;
        if (univariate && d && *d != 1) {
            throw ConfigError("settings 1 and 2 are univariate; --d must be 1");
        }
        if (id == MeanSettingId::s4 && dimension() < 2) {
            throw ConfigError("setting 4 needs d >= 2");
        }
        if (dimension() < 1) {
            throw ConfigError("--d must be at least 1");
        }
    }
    if (command == Command::diagnose) {
        if (psi_d < 1 || psi_n <= psi_d) {
            throw ConfigError("--psi-n must exceed --psi-d >= 1");
        }
        if (psi_trials < 1) {
            throw ConfigError("--psi-trials must be at least 1");
        }
    }
    if (command == Command::export_data) {
        if (n_list.size() != 1) {
            throw ConfigError("export takes exactly one --n value");
        }
        if (out_path.empty() || out_path == "-") {
            throw ConfigError("export needs --out <file>");
        }
    }
}

std::size_t ExperimentConfig::dimension() const {
    if (d) {
        return *d;
    }
    const bool regression = command == Command::regression || (command == Command::export_data && setting == "regression");
    if (regression) {
        return 100;
    }
    const auto id = parse_mean_setting(setting);
    return id && (*id == MeanSettingId::s3 || *id == MeanSettingId::s4) ? 10 : 1;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = count;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

std::vector<TrialResult> run_mean_experiment(const ExperimentConfig& config) {
    const TrimConfig tc = trim_config(config);
    return run_paired(config, [&](std::size_t n, std::size_t r, RngSeed seed) {
        const SampleSet data = gen_mean_data(mean_setting(config, n, seed));
        const std::size_t k = subset_size(n, config.alpha);
        TrialPair p;
        p.estimator = {"ITM", n, data.d(), static_cast<long>(r), 0.0, 0.0, std::nullopt};
        p.oracle = {"OM", n, data.d(), static_cast<long>(r), 0.0, 0.0, std::nullopt};

        const MeanEstimate est = timed(config.record_timing, p.estimator.runtime_ms, [&] { return itm(data, tc); });
        p.estimator.final_error = distance2(est.value, *data.truth_mean());
        p.estimator.converged_at = est.trace.converged_at;

        const Vector om = timed(config.record_timing, p.oracle.runtime_ms, [&] { return oracle_mean(data, k); });
        p.oracle.final_error = distance2(om, *data.truth_mean());
        return p;
    });
}

std::vector<TrialResult> run_regression_experiment(const ExperimentConfig& config) {
    const TrimConfig tc = trim_config(config);
    const std::size_t d = config.dimension();
    return run_paired(config, [&](std::size_t n, std::size_t r, RngSeed seed) {
        const RegressionData data = gen_regression_data(n, d, config.alpha, seed);
        const std::size_t k = subset_size(n, config.alpha);
        TrialPair p;
        p.estimator = {"ITSM", n, d, static_cast<long>(r), 0.0, 0.0, std::nullopt};
        p.oracle = {"OLS", n, d, static_cast<long>(r), 0.0, 0.0, std::nullopt};

        const BetaEstimate est = timed(config.record_timing, p.estimator.runtime_ms, [&] { return itsm(data, tc); });
        p.estimator.final_error = distance2(est.value, *data.truth_beta());
        p.estimator.converged_at = est.trace.converged_at;

        const Vector ols = timed(config.record_timing, p.oracle.runtime_ms, [&] { return oracle_ls(data, k); });
        p.oracle.final_error = distance2(ols, *data.truth_beta());
        return p;
    });
}

DiagnoseResult run_diagnose(const ExperimentConfig& config) {
    config.validate();
    const TrimConfig tc = trim_config(config);
    DiagnoseResult result;
    result.setting = config.setting;
    result.alpha = config.alpha;
    result.regime = mean_alpha_regime(config.alpha);

    for (std::size_t n : config.n_list) {
        const std::size_t k = subset_size(n, config.alpha);
        struct TrialMargins {
            double lemma1 = 0.0;
            Vector contraction;
            double envelope = 0.0;
        };
        std::vector<TrialMargins> margins(config.trials);
        parallel_for(config.trials, config.threads, [&](std::size_t t) {
            const SampleSet data = gen_mean_data(mean_setting(config, n, trial_seed(config.seed, n, t + 1)));
            const Subset low_noise(lowest_k_indices(*data.noise_scale(), k), n);
            margins[t].lemma1 = lemma1_check(data, low_noise);
            const MeanEstimate est = itm(data, tc);
            margins[t].contraction = contraction_trace(est.trace, data, config.alpha);
            margins[t].envelope = theorem_error_check(est, data, config.alpha, config.envelope_c).margin;
        });

        Vector lemma1;
        Vector contraction;
        Vector envelope;
        for (const auto& m : margins) {
            lemma1.push_back(m.lemma1);
            contraction.insert(contraction.end(), m.contraction.begin(), m.contraction.end());
            envelope.push_back(m.envelope);
        }
        const double nd = static_cast<double>(n);
        DiagnoseSection section;
        section.n = n;
        section.reports.push_back(summarize_margins("lemma1", std::move(lemma1)));
        section.reference_rates.push_back(1.0 - 1.0 / static_cast<double>(k));
        section.reports.push_back(summarize_margins("contraction", std::move(contraction)));
        section.reference_rates.push_back(std::max(0.0, 1.0 - 5.0 / (4.0 * nd)));
        section.reports.push_back(summarize_margins("theorem_envelope", std::move(envelope)));
        section.reference_rates.push_back(
            std::max(0.0, 1.0 - 5.0 * static_cast<double>(config.iterations) / (4.0 * nd)));
        result.sections.push_back(std::move(section));
    }

    PsiSummary& psi = result.psi;
    psi.n = config.psi_n;
    psi.d = config.psi_d;
    const Matrix design =
        normalized_gaussian_design(config.psi_n, config.psi_d, derive_seed(config.seed, kPsiDesignStream));
    const std::size_t k = subset_size(config.psi_n, config.alpha);
    psi.sampled = psi_minus_sampled(design, k, config.psi_trials, derive_seed(config.seed, kPsiSampleStream));
    if (binomial(config.psi_n, k) <= kPsiSearchLimit) {
        psi.exact = psi_minus_exact(design, k);
    }
    psi.c1 = psi.sampled.value > 0.0 ? static_cast<double>(k) / psi.sampled.value
                                     : std::numeric_limits<double>::infinity();
    return result;
}

void export_dataset(const ExperimentConfig& config) {
    config.validate();
    const std::size_t n = config.n_list.front();
    const RngSeed seed = trial_seed(config.seed, n, 1);
    std::ostringstream csv;
    nlohmann::ordered_json meta;
    meta["n"] = n;
    meta["alpha"] = config.alpha;
    meta["seed"] = config.seed;
    meta["trial_seed"] = seed;

    auto header = [&](std::size_t d, bool with_y) {
        for (std::size_t j = 0; j < d; ++j) {
            csv << (j ? "," : "") << "x_" << j;
        }
        if (with_y) {
            csv << ",y";
        }
        csv << '\n';
    };
    auto write_row = [&](std::span<const double> x, const double* y) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            csv << (j ? "," : "") << format_double(x[j]);
        }
        if (y != nullptr) {
            csv << ',' << format_double(*y);
        }
        csv << '\n';
    };

    if (config.setting == "regression") {
        const RegressionData data = gen_regression_data(n, config.dimension(), config.alpha, seed);
        meta["kind"] = "regression";
        meta["d"] = data.d();
        meta["truth_beta"] = *data.truth_beta();
        meta["noise_sd"] = *data.noise_sd();
        header(data.d(), true);
        for (std::size_t i = 0; i < n; ++i) {
            write_row(data.design().row(i), &data.response()[i]);
        }
    } else {
        const SampleSet data = gen_mean_data(mean_setting(config, n, seed));
        meta["kind"] = "mean";
        meta["setting"] = config.setting;
        meta["d"] = data.d();
        meta["truth_mean"] = *data.truth_mean();
        meta["noise_scale"] = *data.noise_scale();
        header(data.d(), false);
        for (std::size_t i = 0; i < n; ++i) {
            write_row(data.point(i), nullptr);
        }
    }
    write_text(config.out_path, csv.str(), nullptr);
    write_text(config.out_path + ".meta.json", meta.dump(2) + "\n", nullptr);
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string results_to_csv(const std::vector<TrialResult>& rows) {
    std::ostringstream os;
    os << "method,n,d,trial,final_error,runtime_ms,converged_at\n";
    for (const auto& r : rows) {
        os << r.method << ',' << r.n << ',' << r.d << ',' << r.trial_index << ',' << format_double(r.final_error)
           << ',' << format_double(r.runtime_ms) << ',';
        if (r.converged_at) {
            os << *r.converged_at;
        }
        os << '\n';
    }
    return os.str();
}

std::string results_to_json(const std::vector<TrialResult>& rows) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["method"] = r.method;
        j["n"] = r.n;
        j["d"] = r.d;
        j["trial"] = r.trial_index;
        j["final_error"] = r.final_error;
        j["runtime_ms"] = r.runtime_ms;
        j["converged_at"] = r.converged_at ? nlohmann::ordered_json(*r.converged_at) : nlohmann::ordered_json(nullptr);
        out.push_back(std::move(j));
    }
    return out.dump(2) + "\n";
}

std::string diagnose_to_json(const DiagnoseResult& result) {
    nlohmann::ordered_json out;
    out["setting"] = result.setting;
    out["alpha"] = result.alpha;
    out["alpha_regime"] = std::string(to_string(result.regime));
    nlohmann::ordered_json sections = nlohmann::ordered_json::array();
    for (const auto& s : result.sections) {
        nlohmann::ordered_json sj;
        sj["n"] = s.n;
        nlohmann::ordered_json reports = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < s.reports.size(); ++i) {
            const BoundCheckReport& r = s.reports[i];
            nlohmann::ordered_json rj;
            rj["bound_name"] = r.bound_name;
            rj["trials"] = r.trials;
            rj["violations"] = r.violations;
            rj["empirical_rate"] = r.empirical_rate;
            rj["reference_rate"] = s.reference_rates[i];
            rj["details"] = r.details;
            reports.push_back(std::move(rj));
        }
        sj["reports"] = std::move(reports);
        sections.push_back(std::move(sj));
    }
    out["sections"] = std::move(sections);

    nlohmann::ordered_json psi;
    psi["n"] = result.psi.n;
    psi["d"] = result.psi.d;
    psi["sampled"] = psi_json(result.psi.sampled);
    psi["exact"] = result.psi.exact ? psi_json(*result.psi.exact) : nlohmann::ordered_json(nullptr);
    psi["c1"] = std::isfinite(result.psi.c1) ? nlohmann::ordered_json(result.psi.c1) : nlohmann::ordered_json(nullptr);
    out["psi_minus"] = std::move(psi);
    return out.dump(2) + "\n";
}

}  // namespace entest::cli
