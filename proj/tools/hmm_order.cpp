#include "hmmorder/errors.hpp"
#include "hmmorder/estimator.hpp"
#include "hmmorder/harness.hpp"
#include "hmmorder/hmm_sim.hpp"
#include "hmmorder/io.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using namespace hmmorder;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

std::optional<double> auto_or_number(const std::string& flag, const std::string& text) {
    if (text == "auto") return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError(flag + ": expected 'auto' or a number, got '" + text + "'");
    return v;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ConfigError("write to '" + path + "' failed");
}

struct EstimateArgs {
    std::string input;
    std::string layout = "columns";
    std::size_t dim = 0;
    std::string kernel;
    std::optional<double> beta;
    std::string kappa = "auto";
    std::string tau = "auto";
    double alpha = 0.05;
    double t_mix = 1.0;
    std::size_t l_max = 10;
    std::string diagnostics;
    std::size_t stride = 1;
    std::string method = "multivariate";
    std::size_t low_rank = 0;
};

int run_estimate(const EstimateArgs& a) {
    DatasetDescriptor desc;
    desc.path = a.input;
    desc.layout = layout_from_string(a.layout);
    desc.dim = a.dim;
    desc.stride = a.stride;
    const std::optional<double> kappa = auto_or_number("--kappa", a.kappa);
    const std::optional<double> tau =
        a.tau == "theoretical" ? std::nullopt : auto_or_number("--tau", a.tau);
    if (a.method != "multivariate" && a.method != "max-univariate")
        throw ConfigError("unknown method '" + a.method + "'");
    const ObservedSeries series = load_series(desc);

    EstimatorOptions opts;
    opts.l_max = a.l_max;
    if (!a.kernel.empty()) opts.family = kernel_family_from_string(a.kernel);
    BandwidthRule rule = BandwidthRule::default_for_dim(series.dim());
    if (a.beta) rule.beta = *a.beta;
    rule.kappa = kappa;
    opts.bandwidth_rule = rule;
    if (a.tau == "theoretical") {
        opts.threshold = ThresholdRule::theoretical(a.alpha, a.t_mix);
    } else if (tau) {
        opts.threshold = ThresholdRule::explicit_value(*tau);
    }
    opts.operator_options.low_rank = a.low_rank;

    const OrderEstimate est = a.method == "multivariate" ? estimate_order(series, opts)
                                                         : estimate_order_max_univariate(series, opts);

    std::cout << "L_hat = " << est.l_hat << "\n";
    std::cout << "n = " << series.n_pairs() << ", d = " << series.dim() << ", h = " << est.bandwidth
              << ", tau = " << est.tau << "\n";
    if (est.truncated) std::cout << "warning: r_lmax exceeds tau, L_hat is a lower bound (raise --lmax)\n";
    if (!a.diagnostics.empty()) {
        if (est.method == EstimationMethod::MaxUnivariate) {
            for (std::size_t j = 0; j < est.per_coordinate.size(); ++j)
                export_diagnostics(est.per_coordinate[j], a.diagnostics + "." + std::to_string(j + 1) + ".csv");
        }
        export_diagnostics(est, a.diagnostics);
    }
    return 0;
}

struct SimulateArgs {
    std::string scenario = "shift";
    double delta = 5.0;
    double nu = 0.1;
    std::size_t n = 1000;
    std::size_t dim = 1;
    std::uint64_t seed = 1;
    std::string noise = "gaussian";
    std::string out;
};

int run_simulate(const SimulateArgs& a) {
    ScenarioParams params;
    params.delta = a.delta;
    params.nu = a.nu;
    params.dim = a.dim;
    params.noise = noise_family_from_string(a.noise);
    const HmmSpec spec = make_scenario(a.scenario, params);
    for (const auto& w : spec.warnings()) std::cerr << "warning: " << w << "\n";
    const Simulation sim = simulate(spec, a.n, a.seed);
    save_series(sim.series, a.out);
    return 0;
}

struct ExperimentArgs {
    std::string config;
    std::string out;
    std::string format = "csv";
    std::size_t jobs = 0;
    bool timing = false;
    std::string records;
};

int run_table(const ExperimentArgs& a, bool comparison) {
    ExperimentConfig cfg = load_experiment_config(a.config, comparison ? method_comparison_defaults() : ExperimentConfig{});
    if (a.jobs > 0) cfg.jobs = a.jobs;
    if (a.timing) cfg.timing = true;
    const ResultTable table = comparison ? run_method_comparison(cfg) : run_experiment(cfg);
    write_text(a.out, emit_table(table, table_format_from_string(a.format)));
    if (!a.records.empty()) write_text(a.records, emit_records(table));
    for (const auto& cell : table.cells)
        if (cell.failed() > 0)
            std::cerr << "warning: " << cell.failed() << " failed replicate(s) in " << cell.point.scenario << " n="
                      << cell.point.n << " " << cell.point.method.label() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Order estimation for nonparametric hidden Markov models"};
    app.require_subcommand(1);

    EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate", "Estimate the number of hidden states of a series");
    estimate->add_option("--input", est.input, "Data file")->required();
    estimate->add_option("--layout", est.layout, "columns, deg, rad or multiseq")
        ->check(CLI::IsMember({"columns", "deg", "rad", "multiseq"}));
    estimate->add_option("--dim", est.dim, "Number of data columns (0 infers it)");
    estimate->add_option("--kernel", est.kernel, "gaussian or vonmises")->check(CLI::IsMember({"gaussian", "vonmises"}));
    estimate->add_option("--beta", est.beta, "Bandwidth exponent, h = kappa n^-beta");
    estimate->add_option("--kappa", est.kappa, "Bandwidth constant: auto or a number");
    estimate->add_option("--tau", est.tau, "Threshold: auto, theoretical or a number");
    estimate->add_option("--alpha", est.alpha, "Overestimation level of the theoretical threshold");
    estimate->add_option("--tmix", est.t_mix, "Mixing time of the theoretical threshold");
    estimate->add_option("--lmax", est.l_max, "Largest order examined");
    estimate->add_option("--diagnostics", est.diagnostics, "CSV of r_ell against tau");
    estimate->add_option("--stride", est.stride, "Keep every k-th observation");
    estimate->add_option("--method", est.method, "multivariate or max-univariate")
        ->check(CLI::IsMember({"multivariate", "max-univariate"}));
    estimate->add_option("--low-rank", est.low_rank, "Rank of a pivoted low-rank Gram approximation (0 = exact)");

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate one of the built-in scenarios");
    simulate_cmd->add_option("--scenario", sim.scenario, "beta3, gauss3, vm3 or shift")
        ->check(CLI::IsMember(scenario_names()));
    simulate_cmd->add_option("--delta", sim.delta, "Shift size");
    simulate_cmd->add_option("--nu", sim.nu, "Off-diagonal transition probability");
    simulate_cmd->add_option("--n", sim.n, "Number of consecutive pairs (n + 1 points)");
    simulate_cmd->add_option("--dim", sim.dim, "Dimension of the shift scenario");
    simulate_cmd->add_option("--seed", sim.seed, "Random seed");
    simulate_cmd->add_option("--noise", sim.noise, "gaussian, student, laplace or exponential");
    simulate_cmd->add_option("--out", sim.out, "Output file")->required();

    ExperimentArgs exp;
    auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo experiment grid");
    ExperimentArgs cmp;
    auto* compare = app.add_subcommand("compare-spectral", "Operator method against the spectral baseline");
    for (auto [cmd, args] : {std::pair{experiment, &exp}, std::pair{compare, &cmp}}) {
        cmd->add_option("--config", args->config, "Experiment config file")->required();
        cmd->add_option("--out", args->out, "Output table")->required();
        cmd->add_option("--format", args->format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
        cmd->add_option("--jobs", args->jobs, "Concurrent replicates (default HMM_ORDER_JOBS or the config)");
        cmd->add_flag("--timing", args->timing, "Add the mean wall-time column");
        cmd->add_option("--records", args->records, "Per-replicate CSV");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*estimate) return run_estimate(est);
        if (*simulate_cmd) return run_simulate(sim);
        if (*experiment) return run_table(exp, false);
        if (*compare) return run_table(cmp, true);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
