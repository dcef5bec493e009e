#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "schwinger/hamiltonian.hpp"
#include "schwinger/rydberg.hpp"

namespace schwinger {

struct EvolutionSpec {
    double t_final = 1.0;
    double dt_out = 0.1;       // output stride
    int krylov_dim = 30;
    double tol = 1e-9;         // local error target per step
    std::int64_t max_steps = 1000000;

    void validate() const;
};

struct TimeSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> field_profile;
    std::vector<std::vector<double>> charge_density;
    std::vector<double> field_squared_total;
    std::vector<double> energy;
    std::vector<double> norm;
};

using ComplexMatVec = std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

// exp(-i H t) |psi> by Lanczos steps with adaptive halving of the step
// size until the local residual estimate meets spec.tol. The observer is
// called at t = 0 and after each output stride.
void krylov_evolve(const ComplexMatVec& apply_h, Eigen::VectorXcd& psi,
                   const EvolutionSpec& spec,
                   const std::function<void(double, const Eigen::VectorXcd&)>& observer);

TimeSeries evolve_observables(const SparseHamiltonian& h, const SectorBasis& basis,
                              Eigen::VectorXcd psi0, const EvolutionSpec& spec);
TimeSeries evolve_observables(const SparseHamiltonianReal& h, const SectorBasis& basis,
                              Eigen::VectorXcd psi0, const EvolutionSpec& spec);

struct QuenchScenario {
    enum class Kind { String, FreeCheck, Custom };
    Kind kind = Kind::String;
    int d = 1;                       // pair separation in bonds, odd
    std::vector<int> occupations;    // for Custom

    void validate(const LatticeParams& params) const;
};

// Bare-string initial state: vacuum with one fermion moved from an even
// site to the odd site d bonds to its right (projective preparation).
GaugeConfig string_initial_config(const LatticeParams& params, int d);

struct QuenchResult {
    TimeSeries series;
    GaugeConfig initial;
    int mid_bond = 0;                // 1-based index of the monitored bond
    std::string conventions;
};
QuenchResult run_quench(const QuenchScenario& scenario, const LatticeParams& params,
                        const EvolutionSpec& spec);

// Sector Hamiltonian of the effective interface model implemented by the
// array hardware: uniform real hopping -t_eff plus the exact diagonal and,
// optionally, the residual tail terms. Gauge-equivalent to the sector
// Hamiltonian when the tails are absent.
SparseHamiltonianReal rydberg_effective_sector_hamiltonian(const LatticeParams& params,
                                                           const SectorBasis& basis,
                                                           const TailCouplings& tails,
                                                           bool include_tails);

struct EncodedVsDirectReport {
    double ising_deviation = 0.0;            // corner-flip assembly vs direct
    double rydberg_no_tail_deviation = 0.0;  // gauge-equivalent, should vanish
    double rydberg_tail_deviation = 0.0;     // with residual tail terms
    double tail_scale = 0.0;                 // |residual coefficient| used
};
EncodedVsDirectReport encoded_vs_direct(const LatticeParams& params, const EvolutionSpec& spec,
                                        const QuenchScenario& scenario, double tail_V = 1.0);

}  // namespace schwinger
