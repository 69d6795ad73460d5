#include "hmmorder/harness.hpp"

#include "hmmorder/errors.hpp"
#include "hmmorder/estimator.hpp"
#include "hmmorder/linalg.hpp"
#include "hmmorder/spectral_baseline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace hmmorder {

namespace {

std::string fmt_double(double v, const char* spec = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
    return value;
}

MethodKind method_kind_from_string(const std::string& name) {
    if (name == "operator-multivariate" || name == "multivariate") return MethodKind::OperatorMultivariate;
    if (name == "operator-max-univariate" || name == "max-univariate") return MethodKind::OperatorMaxUnivariate;
    if (name == "spectral") return MethodKind::Spectral;
    throw ConfigError("unknown method '" + name + "'");
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + text + "'");
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string join_row(const std::vector<std::string>& fields, TableFormat format) {
    std::string out;
    if (format == TableFormat::Markdown) {
        out = "|";
        for (const auto& f : fields) out += " " + f + " |";
    } else {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            out += csv_field(fields[i]);
        }
    }
    return out + "\n";
}

ReplicateRecord run_replicate(const GridPoint& point, std::size_t replicate, std::uint64_t seed, std::size_t l_max) {
    ReplicateRecord rec;
    rec.replicate = replicate;
    rec.seed = seed;
    try {
        ScenarioParams params;
        params.delta = point.delta;
        params.nu = point.nu;
        params.dim = point.dim;
        params.noise = point.noise;
        const HmmSpec spec = make_scenario(point.scenario, params);
        const Simulation sim = simulate(spec, point.n, seed);

        const auto start = std::chrono::steady_clock::now();
        if (point.method.kind == MethodKind::Spectral) {
            SpectralConfig cfg;
            cfg.M = point.method.M;
            cfg.M_reg = point.method.M_reg;
            const SpectralEstimate est = spectral_order(sim.series, cfg);
            rec.l_hat = est.l_hat;
            rec.sigma.assign(est.sigma.begin(), est.sigma.begin() + static_cast<std::ptrdiff_t>(
                                                                        std::min(l_max, est.sigma.size())));
        } else {
            EstimatorOptions opts;
            opts.l_max = l_max;
            if (point.beta) opts.bandwidth_rule = BandwidthRule{*point.beta, std::nullopt};
            const OrderEstimate est = point.method.kind == MethodKind::OperatorMultivariate
                                          ? estimate_order(sim.series, opts)
                                          : estimate_order_max_univariate(sim.series, opts);
            rec.l_hat = est.l_hat;
            rec.tau = est.tau;
            rec.bandwidth = est.bandwidth;
            rec.sigma.assign(est.sigma.begin(), est.sigma.begin() + static_cast<std::ptrdiff_t>(
                                                                        std::min(l_max, est.sigma.size())));
        }
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } catch (const std::exception& e) {
        rec.l_hat.reset();
        rec.error = e.what();
    }
    return rec;
}

}  // namespace

std::string MethodSpec::label() const {
    switch (kind) {
        case MethodKind::OperatorMultivariate: return "operator-multivariate";
        case MethodKind::OperatorMaxUnivariate: return "operator-max-univariate";
        case MethodKind::Spectral: return "spectral(M=" + std::to_string(M) + ",M_reg=" + std::to_string(M_reg) + ")";
    }
    return "unknown";
}

std::size_t resolve_m_reg(const std::string& expr, std::size_t M) {
    const std::string e = trim(expr);
    if (e == "M") return M;
    if (e.size() > 2 && e[0] == 'M' && (e[1] == '/' || e[1] == '-')) {
        const auto k = parse_number<std::size_t>("M_reg", trim(e.substr(2)));
        if (e[1] == '/') {
            if (k == 0) throw ConfigError("M_reg: division by zero");
            return M / k;
        }
        if (k >= M) throw ConfigError("M_reg: '" + e + "' is not positive for M=" + std::to_string(M));
        return M - k;
    }
    return parse_number<std::size_t>("M_reg", e);
}

void ExperimentConfig::validate() const {
    if (scenarios.empty() || deltas.empty() || nus.empty() || betas.empty() || dims.empty() || n_list.empty() ||
        noises.empty() || methods.empty())
        throw ConfigError("experiment grid has an empty axis");
    const auto known = scenario_names();
    for (const auto& s : scenarios)
        if (std::find(known.begin(), known.end(), s) == known.end()) throw ConfigError("unknown scenario '" + s + "'");
    if (replicates < 1) throw ConfigError("replicates must be >= 1");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (l_max < 1) throw ConfigError("lmax must be >= 1");
    for (double nu : nus)
        if (!(nu > 0.0 && nu < 0.5)) throw ConfigError("nu must lie in (0, 1/2)");
    for (std::size_t d : dims)
        if (d < 1) throw ConfigError("d must be >= 1");
    for (std::size_t n : n_list)
        if (n < 2) throw ConfigError("every n must be >= 2");
    for (const auto& b : betas)
        if (b && !(*b > 0.0)) throw ConfigError("beta must be positive");
    if (std::find(methods.begin(), methods.end(), MethodKind::Spectral) != methods.end()) {
        if (M_values.empty() || M_reg_exprs.empty()) throw ConfigError("spectral method needs M and M_reg");
        for (const auto& m : method_specs()) {
            if (m.kind != MethodKind::Spectral) continue;
            SpectralConfig cfg;
            cfg.M = m.M;
            cfg.M_reg = m.M_reg;
            cfg.validate();
        }
    }
}

std::vector<MethodSpec> ExperimentConfig::method_specs() const {
    std::vector<MethodSpec> out;
    for (MethodKind k : methods) {
        if (k != MethodKind::Spectral) {
            out.push_back({k, 0, 0});
            continue;
        }
        for (std::size_t m : M_values)
            for (const auto& expr : M_reg_exprs) out.push_back({k, m, resolve_m_reg(expr, m)});
    }
    return out;
}

ExperimentConfig parse_experiment_config(std::istream& in, ExperimentConfig base) {
    ExperimentConfig cfg = std::move(base);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::vector<std::string> values = split_list(line.substr(eq + 1));
        if (values.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": no value for '" + key + "'");
        const auto single = [&]() -> const std::string& {
            if (values.size() != 1) throw ConfigError("config key '" + key + "' takes a single value");
            return values.front();
        };

        if (key == "scenario") {
            cfg.scenarios = values;
        } else if (key == "delta") {
            cfg.deltas.clear();
            for (const auto& v : values) cfg.deltas.push_back(parse_number<double>(key, v));
        } else if (key == "nu") {
            cfg.nus.clear();
            for (const auto& v : values) cfg.nus.push_back(parse_number<double>(key, v));
        } else if (key == "beta") {
            cfg.betas.clear();
            for (const auto& v : values)
                cfg.betas.push_back(v == "auto" ? std::nullopt : std::optional<double>(parse_number<double>(key, v)));
        } else if (key == "d") {
            cfg.dims.clear();
            for (const auto& v : values) cfg.dims.push_back(parse_number<std::size_t>(key, v));
        } else if (key == "n_list" || key == "n") {
            cfg.n_list.clear();
            for (const auto& v : values) cfg.n_list.push_back(parse_number<std::size_t>(key, v));
        } else if (key == "noise") {
            cfg.noises.clear();
            for (const auto& v : values) cfg.noises.push_back(noise_family_from_string(v));
        } else if (key == "method") {
            cfg.methods.clear();
            for (const auto& v : values) cfg.methods.push_back(method_kind_from_string(v));
        } else if (key == "M") {
            cfg.M_values.clear();
            for (const auto& v : values) cfg.M_values.push_back(parse_number<std::size_t>(key, v));
        } else if (key == "M_reg") {
            cfg.M_reg_exprs = values;
        } else if (key == "replicates") {
            cfg.replicates = parse_number<std::size_t>(key, single());
        } else if (key == "base_seed") {
            cfg.base_seed = parse_number<std::uint64_t>(key, single());
        } else if (key == "jobs") {
            cfg.jobs = parse_number<std::size_t>(key, single());
        } else if (key == "lmax") {
            cfg.l_max = parse_number<std::size_t>(key, single());
        } else if (key == "timing") {
            cfg.timing = parse_bool(key, single());
        } else {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_experiment_config(in, std::move(base));
}

std::size_t default_jobs() {
    if (const char* env = std::getenv("HMM_ORDER_JOBS")) {
        std::size_t v = 0;
        const std::string s(env);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) return v;
    }
    return 1;
}

std::string GridPoint::data_key() const {
    std::string key = "scenario=" + scenario + ";nu=" + fmt_double(nu, "%.17g") + ";n=" + std::to_string(n);
    if (shift_parameters)
        key += ";noise=" + to_string(noise) + ";delta=" + fmt_double(delta, "%.17g") + ";d=" + std::to_string(dim);
    return key;
}

std::size_t CellResult::failed() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const ReplicateRecord& r) { return !r.l_hat; }));
}

std::size_t CellResult::count_equal(std::size_t l) const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [l](const ReplicateRecord& r) { return r.l_hat && *r.l_hat == l; }));
}

std::size_t CellResult::count_at_most(std::size_t l) const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [l](const ReplicateRecord& r) { return r.l_hat && *r.l_hat <= l; }));
}

std::size_t CellResult::count_above(std::size_t l) const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [l](const ReplicateRecord& r) { return r.l_hat && *r.l_hat > l; }));
}

double CellResult::success_frequency() const {
    if (records.empty()) return 0.0;
    return static_cast<double>(count_equal(true_order)) / static_cast<double>(records.size());
}

double CellResult::mean_wall_seconds() const {
    double sum = 0.0;
    std::size_t k = 0;
    for (const auto& r : records) {
        if (!r.l_hat) continue;
        sum += r.wall_seconds;
        ++k;
    }
    return k ? sum / static_cast<double>(k) : 0.0;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t replicate_seed(std::uint64_t base_seed, const GridPoint& point, std::size_t replicate) {
    return base_seed + static_cast<std::uint64_t>(replicate) + fnv1a64(point.data_key());
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& config) {
    config.validate();
    const std::vector<MethodSpec> methods = config.method_specs();
    std::vector<GridPoint> out;
    for (const auto& scenario : config.scenarios) {
        const bool shift = scenario == "shift";
        const std::vector<NoiseFamily> noises = shift ? config.noises : std::vector<NoiseFamily>{NoiseFamily::Gaussian};
        const std::vector<double> deltas = shift ? config.deltas : std::vector<double>{0.0};
        const std::vector<std::size_t> dims = shift ? config.dims : std::vector<std::size_t>{1};
        for (NoiseFamily noise : noises)
            for (double delta : deltas)
                for (double nu : config.nus)
                    for (std::size_t d : dims)
                        for (std::size_t n : config.n_list)
                            for (const auto& beta : config.betas)
                                for (const auto& method : methods) {
                                    GridPoint p;
                                    p.scenario = scenario;
                                    p.noise = noise;
                                    p.delta = delta;
                                    p.nu = nu;
                                    p.beta = beta;
                                    p.dim = d;
                                    p.n = n;
                                    p.method = method;
                                    p.shift_parameters = shift;
                                    out.push_back(std::move(p));
                                }
    }
    return out;
}

ResultTable run_experiment(const ExperimentConfig& config) {
    const std::vector<GridPoint> grid = expand_grid(config);
    ResultTable table;
    table.timing = config.timing;
    table.cells.resize(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        table.cells[c].point = grid[c];
        table.cells[c].records.resize(config.replicates);
        try {
            ScenarioParams params;
            params.nu = grid[c].nu;
            table.cells[c].true_order = make_scenario(grid[c].scenario, params).num_states();
        } catch (const Error&) {
            table.cells[c].true_order = 3;
        }
    }

    // Results must not depend on how many replicates share the machine.
    linalg::set_blas_threads(1);

    const std::size_t total = grid.size() * config.replicates;
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= total) return;
            const std::size_t c = task / config.replicates;
            const std::size_t r = task % config.replicates;
            table.cells[c].records[r] = run_replicate(grid[c], r, replicate_seed(config.base_seed, grid[c], r), config.l_max);
        }
    };
    const std::size_t threads = std::min(config.jobs, std::max<std::size_t>(1, total));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return table;
}

ExperimentConfig method_comparison_defaults() {
    ExperimentConfig config;
    config.scenarios = {"beta3", "gauss3", "vm3"};
    config.nus = {0.1};
    config.methods = {MethodKind::OperatorMultivariate, MethodKind::Spectral};
    config.M_values = {20, 40, 60};
    config.M_reg_exprs = {"5", "M/2", "M-5"};
    return config;
}

ResultTable run_method_comparison(ExperimentConfig config) {
    config.methods = {MethodKind::OperatorMultivariate, MethodKind::Spectral};
    return run_experiment(config);
}

TableFormat table_format_from_string(const std::string& name) {
    if (name == "csv") return TableFormat::Csv;
    if (name == "md" || name == "markdown") return TableFormat::Markdown;
    throw ConfigError("unknown table format '" + name + "'");
}

std::string emit_table(const ResultTable& table, TableFormat format) {
    std::size_t k = 3;
    if (!table.cells.empty()) {
        k = 2;
        for (const auto& c : table.cells) k = std::max(k, c.true_order);
    }
    std::vector<std::string> header{"scenario", "noise", "delta", "nu", "beta", "d", "n", "method", "replicates", "lhat_le1"};
    for (std::size_t l = 2; l <= k; ++l) header.push_back("lhat_" + std::to_string(l));
    header.push_back("lhat_gt" + std::to_string(k));
    header.push_back("pct_true");
    header.push_back("failed");
    if (table.timing) header.push_back("mean_wall_s");

    std::string out = join_row(header, format);
    if (format == TableFormat::Markdown) out += join_row(std::vector<std::string>(header.size(), "---"), format);

    for (const auto& c : table.cells) {
        const GridPoint& p = c.point;
        std::vector<std::string> row{p.scenario,
                                     p.shift_parameters ? to_string(p.noise) : "",
                                     p.shift_parameters ? fmt_double(p.delta) : "",
                                     fmt_double(p.nu),
                                     p.beta ? fmt_double(*p.beta) : "auto",
                                     std::to_string(p.dim),
                                     std::to_string(p.n),
                                     p.method.label(),
                                     std::to_string(c.replicates()),
                                     std::to_string(c.count_at_most(1))};
        for (std::size_t l = 2; l <= k; ++l) row.push_back(std::to_string(c.count_equal(l)));
        row.push_back(std::to_string(c.count_above(k)));
        row.push_back(fmt_double(100.0 * c.success_frequency()));
        row.push_back(std::to_string(c.failed()));
        if (table.timing) row.push_back(fmt_double(c.mean_wall_seconds(), "%.6f"));
        out += join_row(row, format);
    }
    return out;
}

std::string emit_records(const ResultTable& table) {
    std::string out = join_row({"scenario", "noise", "delta", "nu", "beta", "d", "n", "method", "replicate", "seed",
                                "l_hat", "tau", "bandwidth", "sigma", "wall_s", "error"},
                               TableFormat::Csv);
    for (const auto& c : table.cells) {
        const GridPoint& p = c.point;
        for (const auto& r : c.records) {
            std::string sigma;
            for (std::size_t i = 0; i < r.sigma.size(); ++i) sigma += (i ? ";" : "") + fmt_double(r.sigma[i], "%.17g");
            out += join_row({p.scenario, p.shift_parameters ? to_string(p.noise) : "",
                             p.shift_parameters ? fmt_double(p.delta) : "", fmt_double(p.nu),
                             p.beta ? fmt_double(*p.beta) : "auto", std::to_string(p.dim), std::to_string(p.n),
                             p.method.label(), std::to_string(r.replicate), std::to_string(r.seed),
                             r.l_hat ? std::to_string(*r.l_hat) : "", fmt_double(r.tau, "%.17g"),
                             fmt_double(r.bandwidth, "%.17g"), sigma,
                             table.timing ? fmt_double(r.wall_seconds, "%.6f") : "", r.error},
                            TableFormat::Csv);
        }
    }
    return out;
}

std::vector<TimingRow> timing_report(const ResultTable& table) {
    std::map<std::tuple<std::size_t, std::size_t, std::string>, std::pair<double, std::size_t>> acc;
    std::vector<std::tuple<std::size_t, std::size_t, std::string>> order;
    for (const auto& c : table.cells) {
        const auto key = std::make_tuple(c.point.n, c.point.dim, c.point.method.label());
        auto [it, inserted] = acc.try_emplace(key, 0.0, 0);
        if (inserted) order.push_back(key);
        for (const auto& r : c.records) {
            if (!r.l_hat) continue;
            it->second.first += r.wall_seconds;
            ++it->second.second;
        }
    }
    std::vector<TimingRow> out;
    for (const auto& key : order) {
        const auto& [sum, count] = acc.at(key);
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), count ? sum / static_cast<double>(count) : 0.0});
    }
    return out;
}

std::vector<TimingRow> timing_report(ExperimentConfig config) {
    config.timing = true;
    return timing_report(run_experiment(config));
}

}  // namespace hmmorder
