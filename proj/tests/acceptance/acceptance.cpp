// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "entest/entest.hpp"
#include "entest/experiment.hpp"
#include "instances.hpp"

using namespace entest;
using entest::testing::boundary_gap;
using entest::testing::random_regression;
using entest::testing::random_samples;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_s;
    std::function<Outcome()> body;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

TrimConfig trim(double alpha, std::size_t iterations) {
    TrimConfig c;
    c.alpha = alpha;
    c.iterations = iterations;
    return c;
}

// Mean final error per (method, n) from the aggregate rows.
std::map<std::pair<std::string, std::size_t>, double> aggregates(const std::vector<cli::TrialResult>& rows) {
    std::map<std::pair<std::string, std::size_t>, double> out;
    for (const auto& r : rows) {
        if (r.trial_index == -1) {
            out[{r.method, r.n}] = r.final_error;
        }
    }
    return out;
}

cli::ExperimentConfig mean_config(const std::string& setting, std::vector<std::size_t> n_list, std::size_t trials) {
    cli::ExperimentConfig c;
    c.command = cli::Command::mean;
    c.setting = setting;
    c.n_list = std::move(n_list);
    c.alpha = 0.8;
    c.iterations = 20;
    c.trials = trials;
    c.seed = 20240601;
    c.threads = 1;
    return c;
}

std::vector<cli::TrialResult> setting1_rows;

Outcome itm_tracks_oracle() {
    const cli::ExperimentConfig c = mean_config("1", {500, 1000, 2000}, 50);
    setting1_rows = cli::run_mean_experiment(c);
    const auto agg = aggregates(setting1_rows);
    Outcome o{true, ""};
    for (std::size_t n : c.n_list) {
        const double itm_err = agg.at({"ITM", n});
        const double om_err = agg.at({"OM", n});
        o.pass = o.pass && itm_err <= 3.0 * om_err;
        o.detail += fmt("n=%zu ITM=%.4g OM=%.4g ratio=%.3f; ", n, itm_err, om_err, itm_err / om_err);
    }
    const bool decreasing = agg.at({"ITM", 2000}) < agg.at({"ITM", 500});
    o.pass = o.pass && decreasing;
    o.detail += decreasing ? "decreasing in n" : "NOT decreasing in n";
    return o;
}

Outcome theorem_envelope() {
    if (setting1_rows.empty()) {
        return {false, "criterion 1 produced no rows"};
    }
    std::size_t trials = 0, held = 0;
    double worst = 0.0;
    for (const auto& r : setting1_rows) {
        if (r.method != "ITM" || r.trial_index < 1) {
            continue;
        }
        const SampleSet s = gen_mean_data(
            MeanSetting::make(MeanSettingId::s1, r.n, 0.8, trial_seed(20240601, r.n, static_cast<std::size_t>(r.trial_index))));
        const double bound = 5.0 * std::sqrt(static_cast<double>(s.d()) * lambda_order_statistic(s, 0.8));
        ++trials;
        held += r.final_error <= bound ? 1 : 0;
        worst = std::max(worst, r.final_error / bound);
    }
    const double rate = static_cast<double>(held) / static_cast<double>(trials);
    return {rate >= 0.99, fmt("%zu/%zu trials inside 5*sqrt(d*lambda) (rate %.4f, worst error/bound %.4f)", held,
                              trials, rate, worst)};
}

Outcome multivariate_settings() {
    Outcome o{true, ""};
    for (const char* setting : {"3", "4"}) {
        cli::ExperimentConfig c = mean_config(setting, {1000}, 20);
        c.d = 10;
        const auto agg = aggregates(cli::run_mean_experiment(c));
        const double itm_err = agg.at({"ITM", 1000});
        const double om_err = agg.at({"OM", 1000});
        o.pass = o.pass && itm_err <= 3.0 * om_err;
        o.detail += fmt("setting %s ITM=%.4g OM=%.4g ratio=%.3f; ", setting, itm_err, om_err, itm_err / om_err);
    }
    return o;
}

Outcome itsm_tracks_ols() {
    cli::ExperimentConfig c = mean_config("regression", {1000, 2000}, 20);
    c.command = cli::Command::regression;
    c.d = 20;
    const auto agg = aggregates(cli::run_regression_experiment(c));
    Outcome o{true, ""};
    for (std::size_t n : c.n_list) {
        const double itsm_err = agg.at({"ITSM", n});
        const double ols_err = agg.at({"OLS", n});
        o.pass = o.pass && itsm_err <= 3.0 * ols_err;
        o.detail += fmt("n=%zu ITSM=%.4g OLS=%.4g ratio=%.3f; ", n, itsm_err, ols_err, itsm_err / ols_err);
    }
    return o;
}

// Counts breaks of pre_{t+1} <= refit_t <= pre_t beyond 1e-9.
std::size_t chain_violations(const IterateTrace& trace) {
    std::size_t bad = 0;
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        bad += trace.steps[t].refit_loss > trace.steps[t].trimmed_loss + 1e-9 ? 1 : 0;
        if (t + 1 < trace.steps.size()) {
            bad += trace.steps[t + 1].trimmed_loss > trace.steps[t].refit_loss + 1e-9 ? 1 : 0;
        }
    }
    return bad;
}

Outcome monotone_loss() {
    Rng rng(5001);
    std::size_t itm_bad = 0, itsm_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const SampleSet s = random_samples(rng, 1 + rng.below(50), 1 + rng.below(5));
        itm_bad += chain_violations(itm(s, trim(rng.uniform(0.5, 1.0), 20)).trace);
    }
    for (int i = 0; i < 500; ++i) {
        const std::size_t d = 1 + rng.below(5);
        const RegressionData data = random_regression(rng, 5 * d + 10 + rng.below(40), d);
        itsm_bad += chain_violations(itsm(data, trim(rng.uniform(0.7, 1.0), 20)).trace);
    }
    return {itm_bad == 0 && itsm_bad == 0,
            fmt("ITM violations %zu over 1000 instances, ITSM violations %zu over 500", itm_bad, itsm_bad)};
}

Outcome brute_force_dominance() {
    Rng rng(6001);
    std::size_t itm_below = 0, itm_opt = 0, itsm_below = 0, itsm_opt = 0;
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 2 + rng.below(9);
        const SampleSet s = random_samples(rng, n, 1 + rng.below(3));
        const double loss = itm(s, trim(0.8, 20)).trace.steps.back().refit_loss;
        const double best = brute_force_trimmed_mean(s, subset_size(n, 0.8)).loss;
        itm_below += loss < best - 1e-9 ? 1 : 0;
        itm_opt += loss <= best + 1e-9 ? 1 : 0;
    }
    for (int i = 0; i < 100; ++i) {
        const std::size_t d = 1 + rng.below(2);
        const std::size_t n = d + 3 + rng.below(8 - d);
        const RegressionData data = random_regression(rng, n, d, 0.3);
        const double loss = itsm(data, trim(0.8, 20)).trace.steps.back().refit_loss;
        const double best = brute_force_trimmed_ls(data, subset_size(n, 0.8)).loss;
        itsm_below += loss < best - 1e-9 ? 1 : 0;
        itsm_opt += loss <= best + 1e-9 * (1.0 + best) ? 1 : 0;
    }
    return {itm_below == 0 && itsm_below == 0,
            fmt("below-optimum ITM %zu/200, ITSM %zu/100; global optimum reached ITM %.1f%%, ITSM %.1f%%",
                itm_below, itsm_below, 100.0 * itm_opt / 200.0, 100.0 * itsm_opt / 100.0)};
}

Outcome lemma1_rate() {
    const std::size_t n = 1000;
    std::vector<std::size_t> block(800);
    for (std::size_t i = 0; i < block.size(); ++i) {
        block[i] = i;
    }
    const Subset s(block, n);
    std::size_t held = 0;
    for (std::size_t r = 1; r <= 2000; ++r) {
        const SampleSet data = gen_mean_data(MeanSetting::make(MeanSettingId::s1, n, 0.8, trial_seed(7001, n, r)));
        held += lemma1_check(data, s) >= 0.0 ? 1 : 0;
    }
    const double rate = held / 2000.0;
    const double need = 1.0 - 1.0 / 800.0 - 0.02;
    return {rate >= need, fmt("holding rate %.4f over 2000 trials (threshold %.4f)", rate, need)};
}

Matrix normalized_gaussian(Rng& rng, std::size_t n, std::size_t d) {
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            x(i, j) = rng.normal();
        }
        const double norm = norm2(x.row(i));
        for (std::size_t j = 0; j < d; ++j) {
            x(i, j) /= norm;
        }
    }
    return x;
}

Outcome psi_consistency() {
    std::size_t mismatched = 0, below = 0;
    for (RngSeed seed = 1; seed <= 50; ++seed) {
        Rng rng = Rng(8001).split(seed);
        const Matrix x = normalized_gaussian(rng, 10, 2);
        const PsiEstimate exact = psi_minus_exact(x, 8);
        mismatched += psi_minus_sampled(x, 8, binomial(10, 8), seed).value != exact.value ? 1 : 0;
        below += psi_minus_sampled(x, 8, 10, seed).value < exact.value ? 1 : 0;
    }
    return {mismatched == 0 && below == 0,
            fmt("full coverage mismatches %zu/50, partial coverage below exact %zu/50", mismatched, below)};
}

Outcome equivariance() {
    Rng rng(9001);
    double itm_shift = 0.0, itm_scale = 0.0, itsm_shift = 0.0;
    int done = 0;
    while (done < 200) {
        const std::size_t n = 5 + rng.below(40), d = 1 + rng.below(4);
        const SampleSet s = random_samples(rng, n, d);
        const MeanEstimate base = itm(s, trim(0.8, 20));
        const std::size_t k = subset_size(n, 0.8);
        double gap = boundary_gap(mean_losses(s, base.trace.initial), k);
        for (const auto& step : base.trace.steps) {
            gap = std::min(gap, boundary_gap(mean_losses(s, step.estimate), k));
        }
        if (gap < 1e-6) {
            continue;
        }
        ++done;
        const double c = std::exp(rng.uniform(-2.0, 2.0));
        Vector shift(d);
        for (double& v : shift) {
            v = rng.uniform(-50.0, 50.0);
        }
        Matrix moved = s.points(), stretched = s.points();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                moved(i, j) += shift[j];
                stretched(i, j) *= c;
            }
        }
        const Vector m = itm(SampleSet(std::move(moved)), trim(0.8, 20)).value;
        const Vector st = itm(SampleSet(std::move(stretched)), trim(0.8, 20)).value;
        for (std::size_t j = 0; j < d; ++j) {
            itm_shift = std::max(itm_shift, std::abs(m[j] - base.value[j] - shift[j]));
            itm_scale = std::max(itm_scale, std::abs(st[j] - c * base.value[j]));
        }
    }
    done = 0;
    while (done < 200) {
        const std::size_t d = 1 + rng.below(4);
        const std::size_t n = 4 * d + 6 + rng.below(40);
        const RegressionData data = random_regression(rng, n, d);
        const BetaEstimate base = itsm(data, trim(0.8, 20));
        const std::size_t k = subset_size(n, 0.8);
        double gap = boundary_gap(squared_residuals(data, base.trace.initial), k);
        for (const auto& step : base.trace.steps) {
            gap = std::min(gap, boundary_gap(squared_residuals(data, step.estimate), k));
        }
        if (gap < 1e-6) {
            continue;
        }
        ++done;
        Vector delta(d);
        for (double& v : delta) {
            v = rng.uniform(-5.0, 5.0);
        }
        Vector y = data.response();
        const Vector xd = multiply(data.design(), delta);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] += xd[i];
        }
        const Vector b = itsm(RegressionData(data.design(), std::move(y)), trim(0.8, 20)).value;
        for (std::size_t j = 0; j < d; ++j) {
            itsm_shift = std::max(itsm_shift, std::abs(b[j] - base.value[j] - delta[j]));
        }
    }
    const double worst = std::max({itm_shift, itm_scale, itsm_shift});
    return {worst <= 1e-8, fmt("max deviation ITM translate %.2e, ITM scale %.2e, ITSM shift %.2e (200 instances each)",
                               itm_shift, itm_scale, itsm_shift)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "entest");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    return cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "entest_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::vector<std::vector<std::string>> commands{
        {"mean", "--setting", "1", "--n", "100,200", "--trials", "10", "--seed", "42"},
        {"mean", "--setting", "4", "--n", "200", "--trials", "5", "--seed", "42", "--format", "json"},
        {"regression", "--n", "200", "--d", "10", "--trials", "5", "--seed", "42"},
        {"diagnose", "--setting", "2", "--n", "200", "--trials", "20", "--psi-n", "10", "--psi-d", "2", "--seed", "42"},
        {"export", "--setting", "3", "--n", "50", "--seed", "42"},
        {"export", "--setting", "regression", "--n", "50", "--d", "5", "--seed", "42"},
    };
    std::size_t identical = 0;
    std::string failures;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        std::string outputs[2];
        bool ok = true;
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path out = dir / fmt("cmd%zu_run%d.out", i, rep);
            auto args = commands[i];
            args.insert(args.end(), {"--out", out.string()});
            ok = ok && invoke(args) == cli::kExitOk;
            outputs[rep] = slurp(out);
            if (commands[i][0] == "export") {
                outputs[rep] += slurp(out.string() + ".meta.json");
            }
        }
        if (ok && !outputs[0].empty() && outputs[0] == outputs[1]) {
            ++identical;
        } else {
            failures += " " + commands[i][0];
        }
    }
    fs::remove_all(dir);
    return {identical == commands.size(),
            fmt("%zu/%zu commands byte-identical on rerun%s", identical, commands.size(), failures.c_str())};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "ITM tracks oracle mean (setting 1)", 10.0, itm_tracks_oracle},
        {2, "final-error envelope", 10.0, theorem_envelope},
        {3, "multivariate settings 3 and 4", 20.0, multivariate_settings},
        {4, "ITSM tracks oracle least squares", 30.0, itsm_tracks_ols},
        {5, "monotone trimmed loss", 30.0, monotone_loss},
        {6, "brute-force oracle dominance", 30.0, brute_force_dominance},
        {7, "per-subset deviation bound rate", 20.0, lemma1_rate},
        {8, "psi- sampled vs exact", 10.0, psi_consistency},
        {9, "equivariance", 10.0, equivariance},
        {10, "CLI determinism", 5.0, determinism},
    };
    int failed = 0;
    double criterion1_seconds = 0.0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        // Criterion 2 reuses the runs of criterion 1 and shares its budget.
        if (c.id == 1) {
            criterion1_seconds = seconds;
        } else if (c.id == 2) {
            seconds += criterion1_seconds;
        }
        const bool in_time = seconds < c.limit_s;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("[%s] %2d %s: %s | %.2fs (limit %.0fs)%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), seconds, c.limit_s, in_time ? "" : " TIME EXCEEDED");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
