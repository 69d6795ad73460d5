#include "hmmorder/hmm_sim.hpp"

#include "hmmorder/errors.hpp"

#include <cmath>
#include <numbers>
#include <queue>

namespace hmmorder {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double uniform01(std::mt19937_64& rng) {
    // 53 random bits -> [0, 1)
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t sample_categorical(const Eigen::Ref<const Eigen::VectorXd>& probs, std::mt19937_64& rng) {
    const double u = uniform01(rng);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        acc += probs(i);
        if (u < acc) return static_cast<std::size_t>(i);
    }
    return static_cast<std::size_t>(probs.size() - 1);
}

double sample_noise(NoiseFamily noise, std::mt19937_64& rng) {
    switch (noise) {
        case NoiseFamily::Gaussian: return std::normal_distribution<double>(0.0, 1.0)(rng);
        case NoiseFamily::Student3: return std::student_t_distribution<double>(3.0)(rng);
        case NoiseFamily::Laplace: {
            const double e = std::exponential_distribution<double>(1.0)(rng);
            return uniform01(rng) < 0.5 ? -e : e;
        }
        case NoiseFamily::Exponential: return std::exponential_distribution<double>(1.0)(rng);
    }
    return 0.0;
}

}  // namespace

std::string to_string(NoiseFamily noise) {
    switch (noise) {
        case NoiseFamily::Gaussian: return "gaussian";
        case NoiseFamily::Student3: return "student";
        case NoiseFamily::Laplace: return "laplace";
        case NoiseFamily::Exponential: return "exponential";
    }
    return "unknown";
}

NoiseFamily noise_family_from_string(const std::string& name) {
    if (name == "gaussian") return NoiseFamily::Gaussian;
    if (name == "student" || name == "student3") return NoiseFamily::Student3;
    if (name == "laplace") return NoiseFamily::Laplace;
    if (name == "exponential") return NoiseFamily::Exponential;
    throw ConfigError("unknown noise family '" + name + "'");
}

double sample_von_mises(double mean, double concentration, std::mt19937_64& rng) {
    if (!(concentration > 0.0)) throw DomainError("von Mises concentration must be positive");
    const double kappa = concentration;
    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
    const double r = (1.0 + rho * rho) / (2.0 * rho);
    double f = 0.0;
    for (;;) {
        const double u1 = uniform01(rng);
        const double u2 = uniform01(rng);
        const double z = std::cos(std::numbers::pi * u1);
        f = (1.0 + r * z) / (r + z);
        const double c = kappa * (r - f);
        if (c * (2.0 - c) - u2 > 0.0) break;
        if (u2 > 0.0 && std::log(c / u2) + 1.0 - c >= 0.0) break;
    }
    const double u3 = uniform01(rng);
    const double theta = mean + (u3 < 0.5 ? -1.0 : 1.0) * std::acos(std::clamp(f, -1.0, 1.0));
    return wrap_angle(theta);
}

double sample_emission(const EmissionSpec& emission, std::mt19937_64& rng) {
    return std::visit(
        [&rng](const auto& e) -> double {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, ShiftNoise>) {
                return e.location + sample_noise(e.noise, rng);
            } else if constexpr (std::is_same_v<T, BetaEmission>) {
                const double x = std::gamma_distribution<double>(e.a, 1.0)(rng);
                const double y = std::gamma_distribution<double>(e.b, 1.0)(rng);
                return x / (x + y);
            } else if constexpr (std::is_same_v<T, GaussianEmission>) {
                return std::normal_distribution<double>(e.mean, e.sd)(rng);
            } else {
                return sample_von_mises(e.mean, e.concentration, rng);
            }
        },
        emission);
}

Eigen::MatrixXd make_transition_nu(double nu, std::size_t states) {
    if (states < 2) throw DomainError("make_transition_nu: need at least two states");
    const double off = static_cast<double>(states - 1);
    if (!(nu > 0.0 && nu < 1.0 / off))
        throw DomainError("make_transition_nu: nu must lie in (0, " + std::to_string(1.0 / off) + ")");
    const auto l = static_cast<Eigen::Index>(states);
    Eigen::MatrixXd a = Eigen::MatrixXd::Constant(l, l, nu);
    a.diagonal().setConstant(1.0 - off * nu);
    return a;
}

bool is_irreducible(const Eigen::MatrixXd& transition) {
    const Eigen::Index l = transition.rows();
    for (Eigen::Index start = 0; start < l; ++start) {
        std::vector<bool> seen(static_cast<std::size_t>(l), false);
        std::queue<Eigen::Index> todo;
        todo.push(start);
        seen[static_cast<std::size_t>(start)] = true;
        Eigen::Index count = 1;
        while (!todo.empty()) {
            const Eigen::Index i = todo.front();
            todo.pop();
            for (Eigen::Index j = 0; j < l; ++j) {
                if (transition(i, j) > 0.0 && !seen[static_cast<std::size_t>(j)]) {
                    seen[static_cast<std::size_t>(j)] = true;
                    ++count;
                    todo.push(j);
                }
            }
        }
        if (count != l) return false;
    }
    return true;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition) {
    const Eigen::Index l = transition.rows();
    if (l == 0 || transition.cols() != l) throw ShapeError("stationary_distribution: matrix must be square");
    if (!is_irreducible(transition)) throw StructureError("stationary_distribution: transition matrix is reducible");
    // (A^T - I) pi = 0 with the last equation replaced by sum(pi) = 1
    Eigen::MatrixXd system = transition.transpose() - Eigen::MatrixXd::Identity(l, l);
    system.row(l - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(l);
    rhs(l - 1) = 1.0;
    Eigen::VectorXd pi = system.fullPivLu().solve(rhs);
    pi = pi.cwiseMax(0.0);
    pi /= pi.sum();
    return pi;
}

HmmSpec HmmSpec::make(Eigen::MatrixXd transition, std::vector<EmissionSpec> emissions, std::size_t dim) {
    HmmSpec spec;
    spec.stationary = stationary_distribution(transition);
    spec.transition = std::move(transition);
    spec.emissions = std::move(emissions);
    spec.dim = dim;
    spec.validate();
    return spec;
}

DataKind HmmSpec::kind() const {
    if (!emissions.empty() && std::holds_alternative<VonMisesEmission>(emissions.front())) return DataKind::Circular;
    return DataKind::Linear;
}

void HmmSpec::validate() const {
    const auto l = static_cast<Eigen::Index>(emissions.size());
    if (l == 0) throw ShapeError("HmmSpec: no states");
    if (transition.rows() != l || transition.cols() != l || stationary.size() != l)
        throw ShapeError("HmmSpec: transition matrix, stationary distribution and emissions disagree on L");
    if (dim < 1) throw ShapeError("HmmSpec: dim must be >= 1");
    if ((transition.array() < 0.0).any()) throw DomainError("HmmSpec: negative transition probability");
    for (Eigen::Index i = 0; i < l; ++i)
        if (std::abs(transition.row(i).sum() - 1.0) > 1e-12) throw DomainError("HmmSpec: rows must sum to 1");
    if (std::abs(stationary.sum() - 1.0) > 1e-10 || (stationary.array() < 0.0).any())
        throw DomainError("HmmSpec: stationary distribution is not a probability vector");
    if ((stationary.transpose() * transition - stationary.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw DomainError("HmmSpec: pi A != pi");
    const DataKind k = kind();
    for (const auto& e : emissions) {
        const bool circ = std::holds_alternative<VonMisesEmission>(e);
        if (circ != (k == DataKind::Circular)) throw DomainError("HmmSpec: cannot mix circular and linear emissions");
        if (const auto* b = std::get_if<BetaEmission>(&e); b && !(b->a > 0.0 && b->b > 0.0))
            throw DomainError("HmmSpec: Beta parameters must be positive");
        if (const auto* g = std::get_if<GaussianEmission>(&e); g && !(g->sd > 0.0))
            throw DomainError("HmmSpec: Gaussian sd must be positive");
        if (const auto* v = std::get_if<VonMisesEmission>(&e); v && !(v->concentration > 0.0))
            throw DomainError("HmmSpec: von Mises concentration must be positive");
    }
    if (k == DataKind::Circular && dim != 1) throw ShapeError("HmmSpec: circular emissions are univariate");
}

std::vector<std::string> HmmSpec::warnings() const {
    std::vector<std::string> out;
    if (std::abs(transition.determinant()) <= 1e-10)
        out.emplace_back("transition matrix is (numerically) singular: the order is not identifiable");
    return out;
}

Simulation simulate(const HmmSpec& spec, std::size_t n_pairs, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    const std::size_t total = n_pairs + 1;
    const auto d = static_cast<Eigen::Index>(spec.dim);
    Eigen::MatrixXd points(static_cast<Eigen::Index>(total), d);
    std::vector<int> states(total);

    std::size_t x = sample_categorical(spec.stationary, rng);
    for (std::size_t t = 0; t < total; ++t) {
        if (t > 0) x = sample_categorical(spec.transition.row(static_cast<Eigen::Index>(x)).transpose(), rng);
        states[t] = static_cast<int>(x);
        for (Eigen::Index j = 0; j < d; ++j) points(static_cast<Eigen::Index>(t), j) = sample_emission(spec.emissions[x], rng);
    }
    return {ObservedSeries(std::move(points), spec.kind()), std::move(states)};
}

std::vector<std::string> scenario_names() { return {"beta3", "gauss3", "vm3", "shift"}; }

HmmSpec make_scenario(const std::string& name, const ScenarioParams& params) {
    Eigen::MatrixXd a = make_transition_nu(params.nu, 3);
    if (name == "beta3") {
        return HmmSpec::make(std::move(a), {BetaEmission{12.0, 1.0}, BetaEmission{1.0, 12.0}, BetaEmission{12.0, 12.0}});
    }
    if (name == "gauss3") {
        return HmmSpec::make(std::move(a),
                             {GaussianEmission{-6.0, 1.0}, GaussianEmission{6.0, 1.0}, GaussianEmission{0.0, 1.0}});
    }
    if (name == "vm3") {
        const double base = std::numbers::pi / 2.0;
        return HmmSpec::make(std::move(a), {VonMisesEmission{base, 10.0}, VonMisesEmission{base + kTwoPi / 3.0, 10.0},
                                            VonMisesEmission{base + 2.0 * kTwoPi / 3.0, 10.0}});
    }
    if (name == "shift") {
        // state 1 unshifted, state 2 at +delta, state 3 at -delta
        return HmmSpec::make(std::move(a),
                             {ShiftNoise{params.noise, 0.0}, ShiftNoise{params.noise, params.delta},
                              ShiftNoise{params.noise, -params.delta}},
                             params.dim);
    }
    throw ConfigError("unknown scenario '" + name + "'");
}

}  // namespace hmmorder
