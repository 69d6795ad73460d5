#pragma once

#include "hmmorder/hmm_sim.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hmmorder {

enum class MethodKind { OperatorMultivariate, OperatorMaxUnivariate, Spectral };

struct MethodSpec {
    MethodKind kind = MethodKind::OperatorMultivariate;
    std::size_t M = 20;      // spectral only
    std::size_t M_reg = 5;   // spectral only

    /// "operator-multivariate", "operator-max-univariate" or "spectral(M=20,M_reg=5)".
    std::string label() const;
};

/// Resolves an M_reg entry: an integer, "M", "M/k" or "M-k".
std::size_t resolve_m_reg(const std::string& expr, std::size_t M);

/// jobs default: HMM_ORDER_JOBS when set and positive, otherwise 1.
std::size_t default_jobs();

/// Monte Carlo grid. delta, noise and d only vary for the shift scenario.
struct ExperimentConfig {
    std::vector<std::string> scenarios{"shift"};
    std::vector<double> deltas{5.0};
    std::vector<double> nus{0.1};
    std::vector<std::optional<double>> betas{std::nullopt};  // nullopt = default rule
    std::vector<std::size_t> dims{1};
    std::vector<std::size_t> n_list{500};
    std::vector<NoiseFamily> noises{NoiseFamily::Gaussian};
    std::vector<MethodKind> methods{MethodKind::OperatorMultivariate};
    std::vector<std::size_t> M_values{20};
    std::vector<std::string> M_reg_exprs{"5"};
    std::size_t replicates = 20;
    std::uint64_t base_seed = 1;
    std::size_t jobs = default_jobs();
    std::size_t l_max = 10;
    bool timing = false;

    /// Throws ConfigError.
    void validate() const;
    /// Methods after expanding the spectral (M, M_reg) grid.
    std::vector<MethodSpec> method_specs() const;
};

/// Flat "key = v1, v2" file, '#' starts a comment. Keys: scenario, delta, nu, beta, d,
/// n_list, noise, method, M, M_reg, replicates, base_seed, jobs, lmax, timing.
/// Keys absent from the file keep their value in `base`.
ExperimentConfig parse_experiment_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_experiment_config(const std::string& path, ExperimentConfig base = {});

struct GridPoint {
    std::string scenario;
    NoiseFamily noise = NoiseFamily::Gaussian;
    double delta = 0.0;
    double nu = 0.1;
    std::optional<double> beta;
    std::size_t dim = 1;
    std::size_t n = 0;
    MethodSpec method;
    bool shift_parameters = true;  // delta/noise meaningful

    /// Identifies the simulated data; the method and beta are excluded.
    std::string data_key() const;
};

struct ReplicateRecord {
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    std::optional<std::size_t> l_hat;  // empty on failure
    double tau = 0.0;
    double bandwidth = 0.0;
    std::vector<double> sigma;
    double wall_seconds = 0.0;  // estimation only
    std::string error;
};

struct CellResult {
    GridPoint point;
    std::size_t true_order = 0;
    std::vector<ReplicateRecord> records;

    std::size_t replicates() const { return records.size(); }
    std::size_t failed() const;
    std::size_t count_equal(std::size_t l) const;
    std::size_t count_at_most(std::size_t l) const;
    std::size_t count_above(std::size_t l) const;
    /// Among all replicates, failures counted as misses.
    double success_frequency() const;
    double mean_wall_seconds() const;
};

struct ResultTable {
    std::vector<CellResult> cells;
    bool timing = false;
};

std::uint64_t fnv1a64(const std::string& text);

/// Seed of replicate r at a grid point: base_seed + r + hash(data key).
std::uint64_t replicate_seed(std::uint64_t base_seed, const GridPoint& point, std::size_t replicate);

/// Every grid point in a fixed order.
std::vector<GridPoint> expand_grid(const ExperimentConfig& config);

/// Runs every (grid point, replicate) with up to `jobs` threads. Results do not depend on jobs.
ResultTable run_experiment(const ExperimentConfig& config);

/// beta3, gauss3 and vm3 with nu = 0.1; spectral grid M in {20, 40, 60}, M_reg in {5, M/2, M-5}.
ExperimentConfig method_comparison_defaults();

/// Operator method against every spectral (M, M_reg) of the config; other methods are dropped.
ResultTable run_method_comparison(ExperimentConfig config);

enum class TableFormat { Csv, Markdown };

TableFormat table_format_from_string(const std::string& name);

/// Grid keys, then counts L_hat <= 1, = 2 .. = L, > L (L the true order), pct_true, failed
/// and, with timing, mean_wall_s.
std::string emit_table(const ResultTable& table, TableFormat format);

/// One CSV row per replicate.
std::string emit_records(const ResultTable& table);

struct TimingRow {
    std::size_t n = 0;
    std::size_t dim = 1;
    std::string method;
    double mean_wall_seconds = 0.0;
};

std::vector<TimingRow> timing_report(const ResultTable& table);
std::vector<TimingRow> timing_report(ExperimentConfig config);

}  // namespace hmmorder
