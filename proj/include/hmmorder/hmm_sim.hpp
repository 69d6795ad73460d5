#pragma once

#include "hmmorder/series.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace hmmorder {

enum class NoiseFamily { Gaussian, Student3, Laplace, Exponential };

std::string to_string(NoiseFamily noise);
NoiseFamily noise_family_from_string(const std::string& name);

/// location + eps with eps from the noise family (standard scale, Exponential not centred).
struct ShiftNoise {
    NoiseFamily noise = NoiseFamily::Gaussian;
    double location = 0.0;
};

struct BetaEmission {
    double a = 1.0;
    double b = 1.0;
};

struct GaussianEmission {
    double mean = 0.0;
    double sd = 1.0;
};

/// Angles in [0, 2pi).
struct VonMisesEmission {
    double mean = 0.0;
    double concentration = 1.0;
};

using EmissionSpec = std::variant<ShiftNoise, BetaEmission, GaussianEmission, VonMisesEmission>;

/// Draw one coordinate from an emission distribution.
double sample_emission(const EmissionSpec& emission, std::mt19937_64& rng);

/// Best-Fisher rejection sampler for the von Mises distribution, result in [0, 2pi).
double sample_von_mises(double mean, double concentration, std::mt19937_64& rng);

/// Finite-state stationary HMM whose coordinates are conditionally independent given the
/// state and share the state's emission distribution.
struct HmmSpec {
    Eigen::MatrixXd transition;             // L x L, row stochastic
    Eigen::VectorXd stationary;             // pi A = pi
    std::vector<EmissionSpec> emissions;    // one per state
    std::size_t dim = 1;

    /// Computes the stationary distribution and validates.
    static HmmSpec make(Eigen::MatrixXd transition, std::vector<EmissionSpec> emissions, std::size_t dim = 1);

    std::size_t num_states() const { return emissions.size(); }
    DataKind kind() const;

    /// Throws DomainError / ShapeError / StructureError.
    void validate() const;
    /// Non-fatal identifiability concerns (singular transition matrix).
    std::vector<std::string> warnings() const;
};

/// Diagonal 1 - (L-1) nu, off-diagonal nu. Requires 0 < nu < 1/(L-1).
Eigen::MatrixXd make_transition_nu(double nu, std::size_t states = 3);

/// Solves pi A = pi, sum pi = 1. Throws StructureError for reducible A.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition);

/// True when every state reaches every other state through positive entries.
bool is_irreducible(const Eigen::MatrixXd& transition);

struct Simulation {
    ObservedSeries series;
    std::vector<int> states;  // zero-based hidden path
};

/// n_pairs + 1 observations; X_1 ~ pi. Deterministic for a given seed.
Simulation simulate(const HmmSpec& spec, std::size_t n_pairs, std::uint64_t seed);

/// Parameters of the named scenarios. Only the shift family reads noise, delta and dim.
struct ScenarioParams {
    double delta = 5.0;
    double nu = 0.1;
    std::size_t dim = 1;
    NoiseFamily noise = NoiseFamily::Gaussian;
};

/// Catalog of the simulation designs:
///   beta3  - B(12,1), B(1,12), B(12,12)
///   gauss3 - N(-6,1), N(6,1), N(0,1)
///   vm3    - VM(pi/2,10), VM(pi/2+2pi/3,10), VM(pi/2+4pi/3,10)
///   shift  - Y_tj = (1{X=2} - 1{X=3}) delta + eps_tj
/// all with the three-state transition matrix A_nu.
std::vector<std::string> scenario_names();
HmmSpec make_scenario(const std::string& name, const ScenarioParams& params = {});

}  // namespace hmmorder
