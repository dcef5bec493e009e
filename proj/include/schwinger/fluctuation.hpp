#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "schwinger/common.hpp"

namespace schwinger {

// Free staggered-fermion chain with 2L sites; the q -> 0 reference model
// for charge full counting statistics.
struct DiracParams {
    int L = 2;       // half-system size, even so the cut sits on a bond
    double a = 1.0;
    double m = 0.0;
    double T = 0.0;  // temperature, 0 = ground state

    void validate() const;
};

struct SingleParticle {
    Eigen::MatrixXcd h;        // 2L x 2L Hermitian
    Eigen::VectorXd energies;  // ascending
    Eigen::MatrixXcd modes;    // columns are eigenvectors
};
SingleParticle dirac_single_particle(const DiracParams& p);

// C_ij = <c_i^dag c_j>; T = 0 projector onto negative-energy modes (exact
// zero modes half filled), T > 0 Fermi factors.
Eigen::MatrixXcd correlation_matrix(const DiracParams& p);

struct EntanglementSpectrum {
    Eigen::VectorXd p;     // mode occupations, sorted descending
    Eigen::VectorXd beta;  // log((1-p)/p)
    double fitted_rate = 0.0;      // decay rate of the sub-1/2 branch
    double fit_intercept = 0.0;
    int n_fit = 0;
    bool degenerate_flag = false;  // too few usable levels for the fit
};
EntanglementSpectrum entanglement_spectrum(const Eigen::MatrixXcd& C, int cut);

struct CorrelationLengthFit {
    double xi_over_a = 0.0;        // from |C_{i,i+d}| over odd d in [d_lo, d_hi]
    double reference_arcsinh = 0;  // 1/arcsinh(am)
    int d_lo = 5, d_hi = 25;
    int n_points = 0;
};
CorrelationLengthFit correlation_length_fit(const Eigen::MatrixXcd& C, double am,
                                            int d_lo = 5, int d_hi = 25);

// Distribution of a sum of independent Bernoulli variables, carried in log
// space so chains of a few thousand modes stay representable.
struct FcsResult {
    Eigen::VectorXd log_prob;  // log P(N = k), k = 0..n
    Eigen::VectorXd prob;
    double mean = 0.0;
    double variance = 0.0;
    std::vector<double> log_tail;  // log P(|N - n/2| > W), W = 0..n/2
    double tail(int W) const;
};
FcsResult fcs_from_beta(const Eigen::VectorXd& beta);
FcsResult fcs_from_probabilities(const Eigen::VectorXd& p);

struct GroundBound {
    std::vector<double> empirical_log_tail;  // from the T = 0 spectrum
    double lambda = 0.0;                     // exp(-fitted_rate)
    std::vector<double> bound_log;           // log(lambda^{W+1}/(1-lambda))
    std::vector<double> mls_bound;           // (1-lambda^{W+1})^{1/(1-lambda)}
    int union_factor = 0;                    // 2L-1 bonds
};
GroundBound ground_bound(const EntanglementSpectrum& spec, int L);

struct CgfResult {
    Eigen::VectorXd alphas;
    Eigen::VectorXd psi;       // scaled cumulant generating function
    double sigma2 = 0.0;       // scaled variance
    Eigen::VectorXd phi_x;     // Legendre-transform grid in (0, 1)
    Eigen::VectorXd phi;       // rate function
    double quad_tol = 0.0;
};
CgfResult scaled_cgf(const DiracParams& p, const Eigen::VectorXd& alphas,
                     double quad_tol = 1e-9);
double scaled_variance(const DiracParams& p, double quad_tol = 1e-9);
double psi_value(const DiracParams& p, double alpha, double quad_tol = 1e-9);
// Legendre transform Phi(x) = sup_alpha (alpha x - Psi(alpha)).
double rate_function(const DiracParams& p, double x, double quad_tol = 1e-9);
// log of the two-sided Chernoff bound exp(log 2 - L Phi(1/2 + (W+1)/L)).
double thermal_chernoff_log_bound(const DiracParams& p, int L, int W);

struct FiniteTCutoff {
    int W = 0;
    double sigma2 = 0.0;
    bool t_zero_warning = false;
};
FiniteTCutoff finite_T_cutoff(const DiracParams& p, int L, double epsilon);

enum class ResourceMode { T0, FiniteT };

struct ResourceConstants {
    double c1 = 1.0;  // infrared: ell/xi = c1/eps
    double c2 = 1.0;  // ultraviolet: a/xi = c2 eps
    double c3 = 1.0;  // T0 cutoff: W = c3 log^2(1/eps)
    double c4 = 1.0;  // thermal cutoff: W = c4 sqrt(sigma2 L log(1/eps))
};

struct ResourceEstimate {
    double epsilon = 0.0;
    ResourceMode mode = ResourceMode::T0;
    double ell_over_xi = 0.0;
    double a_over_xi = 0.0;
    std::int64_t L = 0;
    std::int64_t W = 0;
    std::int64_t N = 0;  // 2L (2W + 2)
};
ResourceEstimate resource_estimate(double epsilon, ResourceMode mode,
                                   const ResourceConstants& c = {});

}  // namespace schwinger
