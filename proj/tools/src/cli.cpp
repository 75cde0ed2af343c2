#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>

#include "CLI11.hpp"

#include "entest/datagen.hpp"
#include "entest/experiment.hpp"

namespace entest::cli {

namespace {

constexpr const char* kSeedEnv = "ENTEST_SEED";

struct Flags {
    ExperimentConfig config;
    std::string format = "csv";
    std::size_t d = 0;
    CLI::Option* trials = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* dim = nullptr;
};

void add_common(CLI::App& sub, Flags& f, bool experiment) {
    sub.add_option("--n", f.config.n_list, "Comma-separated, strictly increasing sample sizes")
        ->delimiter(',')
        ->capture_default_str();
    sub.add_option("--alpha", f.config.alpha, "Trimming fraction in (0, 1]")->capture_default_str();
    f.seed = sub.add_option("--seed", f.config.seed, "Base seed (falls back to $ENTEST_SEED, then 0)");
    f.dim = sub.add_option("--d", f.d, "Dimension override (settings 3/4 default 10, regression 100)");
    sub.add_option("--out", f.config.out_path, "Output file ('-' or omitted: stdout)");
    if (experiment) {
        sub.add_option("--iters", f.config.iterations, "Iterations T")->capture_default_str();
        f.trials = sub.add_option("--trials", f.config.trials, "Repetitions R per sample size");
        sub.add_option("--threads", f.config.threads, "Worker threads (0: hardware concurrency)");
        sub.add_flag("--timing", f.config.record_timing, "Record wall-clock runtime_ms (breaks byte reproducibility)");
    }
}

RngSeed resolve_seed(const Flags& f) {
    if (f.seed->count() > 0) {
        return f.config.seed;
    }
    const char* env = std::getenv(kSeedEnv);
    if (env == nullptr || *env == '\0') {
        return 0;
    }
    RngSeed seed = 0;
    const std::string text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(std::string(kSeedEnv) + " is not an unsigned 64-bit integer: '" + text + "'");
    }
    return seed;
}

void warn_alpha(const ExperimentConfig& config, std::ostream& err) {
    const AlphaRegime regime = mean_alpha_regime(config.alpha);
    if (regime == AlphaRegime::contraction) {
        err << "warning: alpha=" << config.alpha
            << " is below 4/5; per-step contraction still holds but the error envelope is not guaranteed\n";
    } else if (regime == AlphaRegime::unsupported) {
        err << "warning: alpha=" << config.alpha << " is at or below 2/3; no convergence guarantee applies\n";
    }
}

void emit(const std::string& text, const ExperimentConfig& config, std::ostream& out) {
    if (config.out_path.empty() || config.out_path == "-") {
        out << text;
        return;
    }
    std::ofstream f(config.out_path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open '" + config.out_path + "' for writing");
    }
    f << text;
    f.flush();
    if (!f) {
        throw IoError("failed writing '" + config.out_path + "'");
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Iterative trimming estimators for entangled single-sample data", "entest"};
    app.require_subcommand(1);

    Flags mean_flags;
    mean_flags.config.command = Command::mean;
    CLI::App* mean = app.add_subcommand("mean", "ITM versus the oracle mean on a synthetic setting");
    mean->add_option("--setting", mean_flags.config.setting, "Mean setting: 1, 2, 3 or 4")->capture_default_str();
    mean->add_option("--format", mean_flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    add_common(*mean, mean_flags, true);

    Flags reg_flags;
    reg_flags.config.command = Command::regression;
    reg_flags.config.setting = "regression";
    CLI::App* regression = app.add_subcommand("regression", "ITSM versus oracle least squares");
    regression->add_option("--format", reg_flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    add_common(*regression, reg_flags, true);

    Flags diag_flags;
    diag_flags.config.command = Command::diagnose;
    CLI::App* diagnose = app.add_subcommand("diagnose", "Monte-Carlo checks of the per-step and final error bounds");
    diagnose->add_option("--setting", diag_flags.config.setting, "Mean setting: 1, 2, 3 or 4")->capture_default_str();
    diagnose->add_option("--envelope-c", diag_flags.config.envelope_c, "Constant c of the final-error envelope")
        ->capture_default_str();
    diagnose->add_option("--psi-n", diag_flags.config.psi_n, "Rows of the psi- design")->capture_default_str();
    diagnose->add_option("--psi-d", diag_flags.config.psi_d, "Columns of the psi- design")->capture_default_str();
    diagnose->add_option("--psi-trials", diag_flags.config.psi_trials, "Random subsets for sampled psi-")
        ->capture_default_str();
    add_common(*diagnose, diag_flags, true);

    Flags export_flags;
    export_flags.config.command = Command::export_data;
    CLI::App* exporter = app.add_subcommand("export", "Write one generated dataset as CSV plus a JSON sidecar");
    exporter->add_option("--setting", export_flags.config.setting, "1, 2, 3, 4 or regression")->capture_default_str();
    add_common(*exporter, export_flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    Flags* active = mean->parsed()         ? &mean_flags
                    : regression->parsed() ? &reg_flags
                    : diagnose->parsed()   ? &diag_flags
                                           : &export_flags;
    try {
        ExperimentConfig& config = active->config;
        config.seed = resolve_seed(*active);
        config.format = active->format == "json" ? OutputFormat::json : OutputFormat::csv;
        if (active->dim->count() > 0) {
            config.d = active->d;
        }
        if (active->trials != nullptr && active->trials->count() == 0) {
            const auto id = parse_mean_setting(config.setting);
            const bool univariate = id && (*id == MeanSettingId::s1 || *id == MeanSettingId::s2);
            config.trials = config.command == Command::regression ? 20 : (univariate ? 200 : 20);
        }
        config.validate();

        switch (config.command) {
            case Command::mean: {
                warn_alpha(config, err);
                const auto rows = run_mean_experiment(config);
                emit(config.format == OutputFormat::json ? results_to_json(rows) : results_to_csv(rows), config, out);
                break;
            }
            case Command::regression: {
                const auto rows = run_regression_experiment(config);
                emit(config.format == OutputFormat::json ? results_to_json(rows) : results_to_csv(rows), config, out);
                break;
            }
            case Command::diagnose:
                warn_alpha(config, err);
                emit(diagnose_to_json(run_diagnose(config)), config, out);
                break;
            case Command::export_data:
                export_dataset(config);
                break;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

}  // namespace entest::cli
