#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "schwinger/lattice.hpp"

namespace schwinger {

// Dual-species array couplings: V between atoms with even displacement
// parity (same sublattice), Vprime for odd parity. Interactions carry the
// 1/r^6 tail truncated at squared distance shell_cutoff.
struct RydbergParams {
    double V = 1.0;
    double Vprime = 125.0 / 64.0;
    double Omega = 0.0;
    double Delta = 1.0;
    double h = 0.0;       // uniform even-sublattice field
    double hprime = 0.0;  // row-gradient even-sublattice field
    double mu = 0.0;      // row-staggered even-sublattice field
    int shell_cutoff = 13;

    void validate() const;
    bool at_cancellation(double tol = 1e-12) const;
};

struct Shell {
    int r2;
    int multiplicity;
    bool odd_parity;
    double weight;  // 1/r^6
};

// Displacement shells with 0 < r^2 <= shell_cutoff, cutoff an exact shell
// endpoint in {1,2,4,5,8,9,10,13}.
std::vector<Shell> shell_table(int shell_cutoff = 13);

// Pair coupling for displacement (du, dv); zero beyond the cutoff.
double pair_coupling(int du, int dv, const RydbergParams& p);

struct StabilityReport {
    double DeltaBar = 0.0;             // bulk de-excitation gap
    double DeltaBarPrime = 0.0;        // bulk blockade-violation gap
    double DeltaBarDoublePrime = 0.0;  // interface excitation gap, quoted part
    double dpp_tail_lo = 0.0;          // envelope of the omitted configuration tails
    double dpp_tail_hi = 0.0;
    bool window_ok = false;            // 0.5783 V < Delta < 2.2953 V
    double lower_margin = 0.0;
    double upper_margin = 0.0;
};
StabilityReport bulk_gaps(const RydbergParams& p);

struct TailCouplings {
    double nn_coefficient = 0.0;        // same-occupation nearest-neighbor projector
    double residual_coefficient = 0.0;  // same-occupation three-site projector
    static constexpr double cancellation_ratio() { return 125.0 / 64.0; }
};
TailCouplings tail_couplings(const RydbergParams& p);

// Second-order corner-flip denominators computed by enumerating the atoms
// around the flipped pair for the four reference interface environments
// (a: straight peak, a': W-shaped, b/b': half-turned). deltaE_* are the
// de-excitation-channel gaps, excite_* the blockade-violating ones.
// DeltaTilde and DeltaTildePrime keep the four-digit reference constants;
// kappa_* are the corresponding shell-sum values (coefficients of V).
struct DenominatorReport {
    double deltaE_a = 0, deltaE_a_prime = 0, deltaE_b = 0, deltaE_b_prime = 0;
    double excite_a = 0, excite_a_prime = 0, excite_b = 0, excite_b_prime = 0;
    double region_A = 0, region_B = 0;  // config-independent side sums
    double DeltaTilde = 0;              // Delta - 0.3422 V
    double DeltaTildePrime = 0;         // 2.2953 V - Delta
    double kappa_b = 0;                 // shell-sum value behind 0.3422
    double kappa_excite_b = 0;          // shell-sum value behind 2.2953
    double epsilon_spread = 0;
    bool spread_ok = false;
    bool at_cancellation = false;
};
DenominatorReport virtual_denominators(const RydbergParams& p);

// t_eff = (Omega/2)^2 (1/DeltaTilde + 1/DeltaTildePrime).
double effective_kinetic(const RydbergParams& p);

struct DesignConstraints {
    double V = 1.0;
    double Delta = 1.4;
    double Omega_max = 1.0;
    double min_ratio = 5.0;
    bool rabi_modulation = false;
};

struct AtomSpec {
    int x = 0;
    int y = 0;
    bool even_sublattice = false;
    double detuning = 0.0;
    double omega = 0.0;
};

struct RydbergDesign {
    RydbergParams params;
    std::vector<AtomSpec> atoms;
    std::vector<std::pair<std::string, double>> ratios;
    bool feasible = false;
    std::string orientation_note;
};

// Solves the hardware knobs that reproduce the sector Hamiltonian of the
// given lattice: Omega from t_eff = 1/(2a) and the three even-sublattice
// field amplitudes. Emits one atom per cell of the (L, W) window.
RydbergDesign dictionary_solve(const LatticeParams& lattice, const DesignConstraints& c);

// Finite clamped patch for full diagonalization: wall vertices 0..n_moves
// with both endpoints pinned at height zero, free atoms in the interior
// columns with |row| <= height_max, and a clamped shell of width pad so
// every free atom sees its complete interaction neighborhood.
struct PatchSpec {
    int n_moves = 4;
    int height_max = 2;
    int pad = 3;
    int max_free_atoms = 20;
    void validate() const;
};

struct RydbergVerifyReport {
    int free_atoms = 0;
    std::int64_t dim = 0;
    int n_interface_states = 0;
    std::vector<double> full_band;  // lowest eigenvalues of the patch
    std::vector<double> eff_band;   // effective interface model
    double max_spectral_deviation = 0.0;  // after aligning the band means
    double gap_to_bulk = 0.0;
    double min_band_overlap = 0.0;  // weight of band vectors on interface states
    double omega_over_delta = 0.0;
    double t_eff = 0.0;
    // Per interface state: classical patch energy and the same-occupation
    // pair/triple counts of the (padded) move string.
    std::vector<double> classical_energies;
    std::vector<int> nn_counts;
    std::vector<int> triple_counts;
};

RydbergVerifyReport verify_rydberg(const PatchSpec& spec, const RydbergParams& p,
                                   bool include_tail_terms = true);

// Interface-state count of the clamped patch (ballot-path oracle).
std::int64_t patch_interface_count(const PatchSpec& spec);

}  // namespace schwinger
