#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "schwinger/fluctuation.hpp"

using namespace schwinger;

namespace {

// Exhaustive oracle for the Bernoulli-sum distribution.
Eigen::VectorXd brute_force_fcs(const Eigen::VectorXd& p) {
    const int n = static_cast<int>(p.size());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n + 1);
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
        double w = 1.0;
        int count = 0;
        for (int k = 0; k < n; ++k) {
            if ((mask >> k) & 1) {
                w *= p(k);
                ++count;
            } else {
                w *= 1.0 - p(k);
            }
        }
        out(count) += w;
    }
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("fluctuation");

TEST_CASE("single-particle chain") {
    DiracParams p;
    p.L = 100;
    p.m = 1.0;
    SingleParticle sp = dirac_single_particle(p);
    // Spectrum symmetric under E -> -E.
    for (int i = 0; i < 2 * p.L; ++i)
        CHECK(sp.energies(i) == doctest::Approx(-sp.energies(2 * p.L - 1 - i)).epsilon(1e-12));
    // Band edge at sqrt(m^2 + 1/a^2).
    CHECK(std::abs(sp.energies(2 * p.L - 1) - std::sqrt(2.0)) < 0.02 * std::sqrt(2.0));

    // Gapless at m = 0 with a finite-size gap ~ 1/L.
    double prev_gap = 0;
    for (int L : {50, 100, 200}) {
        DiracParams p0;
        p0.L = L;
        p0.m = 0.0;
        SingleParticle s0 = dirac_single_particle(p0);
        double gap = s0.energies.cwiseAbs().minCoeff();
        CHECK(gap < 2.0 / L);
        if (prev_gap > 0) CHECK(prev_gap / gap == doctest::Approx(2.0).epsilon(0.2));
        prev_gap = gap;
    }
}

TEST_CASE("correlation matrix") {
    DiracParams p;
    p.L = 40;
    p.m = 0.5;
    auto C = correlation_matrix(p);
    CHECK(std::abs(C.trace().real() - p.L) < 1e-10);
    CHECK((C * C - C).cwiseAbs().maxCoeff() < 1e-10);  // T = 0 projector

    DiracParams hot = p;
    hot.T = 1e6;
    auto Chot = correlation_matrix(hot);
    CHECK((Chot - 0.5 * Eigen::MatrixXcd::Identity(2 * p.L, 2 * p.L)).cwiseAbs().maxCoeff() <
          1e-3);

    DiracParams warm = p;
    warm.T = 0.7;
    auto Cwarm = correlation_matrix(warm);
    CHECK(std::abs(Cwarm.trace().real() - p.L) < 1e-10);
    CHECK((Cwarm * Cwarm - Cwarm).cwiseAbs().maxCoeff() > 1e-3);  // mixed state
}

TEST_CASE("entanglement spectrum: massless pairing is exact") {
    DiracParams p;
    p.L = 20;
    p.m = 0.0;
    auto es = entanglement_spectrum(correlation_matrix(p), p.L);
    for (int k = 0; k < p.L / 2; ++k)
        CHECK(std::abs(es.p(k) + es.p(p.L - 1 - k) - 1.0) < 1e-8);
}

TEST_CASE("entanglement spectrum: open-boundary polarization at m > 0") {
    // The exact half-chain block carries the staggered partial-charge sum
    // of the edge: the mode occupations pair only up to this offset, and
    // the block trace equals L/2 plus the mid-bond field.
    DiracParams p;
    p.L = 200;
    p.m = 0.5;
    auto C = correlation_matrix(p);
    double mid_field = C.topLeftCorner(p.L, p.L).trace().real() - p.L / 2.0;
    CHECK(std::abs(mid_field) > 0.05);
    CHECK(std::abs(mid_field) < 0.12);
    auto es = entanglement_spectrum(C, p.L);
    double worst = 0;
    for (int k = 0; k < p.L / 2; ++k)
        worst = std::max(worst, std::abs(es.p(k) + es.p(p.L - 1 - k) - 1.0));
    CHECK(worst < 2.0 * std::abs(mid_field));
    CHECK(es.fitted_rate > 1.0);
}

TEST_CASE("entanglement decay rate grows with the mass") {
    double prev = 0.0;
    for (double am : {0.25, 0.5, 1.0, 2.0}) {
        DiracParams p;
        p.L = 200;
        p.m = am;
        auto es = entanglement_spectrum(correlation_matrix(p), p.L);
        CHECK(es.n_fit >= 2);
        CHECK(es.fitted_rate > prev);
        prev = es.fitted_rate;
    }
}

TEST_CASE("correlation length fit tracks arcsinh(am)") {
    DiracParams p;
    p.L = 200;
    p.m = 0.5;
    auto C = correlation_matrix(p);
    auto fit = correlation_length_fit(C, p.m);
    CHECK(fit.reference_arcsinh == doctest::Approx(1.0 / std::asinh(0.5)).epsilon(1e-12));
    CHECK(fit.xi_over_a == doctest::Approx(fit.reference_arcsinh).epsilon(0.25));
}

TEST_CASE("Bernoulli distribution: binomial case") {
    Eigen::VectorXd p = Eigen::VectorXd::Constant(4, 0.5);
    FcsResult r = fcs_from_probabilities(p);
    CHECK(r.prob(2) == doctest::Approx(6.0 / 16.0).epsilon(1e-13));
    CHECK(r.prob.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.mean == doctest::Approx(2.0).epsilon(1e-12));
    for (int k = 0; k <= 4; ++k)
        CHECK(r.prob(k) == doctest::Approx(r.prob(4 - k)).epsilon(1e-10));
    CHECK(r.tail(2) == 0.0);  // support exhausted
    CHECK(r.tail(1) == doctest::Approx(2.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("Bernoulli distribution equals 2^n brute force") {
    for (int n : {10, 12}) {
        DiracParams p;
        p.L = n;
        p.m = 0.5;
        p.T = 0.8;
        auto es = entanglement_spectrum(correlation_matrix(p), n);
        FcsResult r = fcs_from_beta(es.beta);
        Eigen::VectorXd brute = brute_force_fcs(es.p);
        CHECK((r.prob - brute).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("ground-state tail bound holds for every cutoff") {
    for (double am : {0.5, 1.0, 2.0}) {
        DiracParams p;
        p.L = 200;
        p.m = am;
        auto es = entanglement_spectrum(correlation_matrix(p), p.L);
        GroundBound g = ground_bound(es, p.L);
        CHECK(g.lambda < 1.0);
        CHECK(g.union_factor == 2 * p.L - 1);
        for (std::size_t W = 0; W < g.empirical_log_tail.size(); ++W) {
            CAPTURE(am);
            CAPTURE(W);
            CHECK(g.empirical_log_tail[W] <= g.bound_log[W] + 1e-12);
        }
        // Most-likely-sequence bound approaches one from below.
        CHECK(g.mls_bound.front() < 1.0);
        CHECK(g.mls_bound.back() > 0.999);
        for (std::size_t W = 1; W < g.mls_bound.size(); ++W)
            CHECK(g.mls_bound[W] >= g.mls_bound[W - 1]);
        // Support exhausted at W = L/2.
        CHECK(std::isinf(g.empirical_log_tail.back()));
    }
}

TEST_CASE("scaled cumulant generating function") {
    DiracParams p;
    p.L = 2;
    p.m = 0.5;
    p.T = 0.5;
    CHECK(psi_value(p, 0.0, 1e-12) == 0.0);

    // Psi - alpha/2 is even.
    for (double a : {0.3, 1.1, 2.5})
        CHECK(psi_value(p, a, 1e-12) - a / 2 ==
              doctest::Approx(psi_value(p, -a, 1e-12) + a / 2).epsilon(1e-10));

    // Finite-difference curvature at the origin equals the variance quadrature.
    double h = 1e-3;
    double fd = (psi_value(p, h, 1e-13) - 2 * psi_value(p, 0.0, 1e-13) +
                 psi_value(p, -h, 1e-13)) /
                (h * h);
    double s2 = scaled_variance(p, 1e-13);
    CHECK(std::abs(fd - s2) < 1e-6);

    // Massless continuum limit of the variance.
    DiracParams c0;
    c0.L = 2;
    c0.m = 0.0;
    c0.T = 5e-4;
    double s2c = scaled_variance(c0, 1e-14);
    CHECK(std::abs(s2c - c0.T / std::numbers::pi) / (c0.T / std::numbers::pi) < 1e-6);

    // Rate function: zero at half filling, convex, curvature 1/(2 sigma2).
    CHECK(std::abs(rate_function(p, 0.5, 1e-12)) < 1e-10);
    Eigen::VectorXd alphas(3);
    alphas << -1.0, 0.0, 1.0;
    CgfResult cgf = scaled_cgf(p, alphas, 1e-10);
    for (int i = 1; i + 1 < cgf.phi.size(); ++i)
        CHECK(cgf.phi(i) <= 0.5 * (cgf.phi(i - 1) + cgf.phi(i + 1)) + 1e-12);
    double dx = 0.02;
    double curv = (rate_function(p, 0.5 + dx, 1e-12) + rate_function(p, 0.5 - dx, 1e-12) -
                   2 * rate_function(p, 0.5, 1e-12)) /
                  (dx * dx);
    CHECK(std::abs(curv / 2.0 - 1.0 / (2.0 * s2)) < 0.01 / (2.0 * s2));
}

TEST_CASE("thermal tails against the exponential-moment bound") {
    for (double am : {0.5, 1.0}) {
        for (double aT : {0.5, 1.0}) {
            DiracParams p;
            p.L = 200;
            p.m = am;
            p.T = aT;
            auto es = entanglement_spectrum(correlation_matrix(p), p.L);
            FcsResult f = fcs_from_beta(es.beta);
            for (int W = 0; W <= p.L / 2 - 2; ++W) {
                if (f.log_tail[W] < -600) continue;  // below eigensolver resolution
                CAPTURE(am);
                CAPTURE(aT);
                CAPTURE(W);
                CHECK(f.log_tail[W] <= thermal_chernoff_log_bound(p, p.L, W) + 1e-10);
            }
        }
    }
}

TEST_CASE("thermal variance matches the quadrature at ten percent") {
    DiracParams p;
    p.L = 400;
    p.m = 0.5;
    p.T = 0.5;
    double s2 = scaled_variance(p);
    auto es = entanglement_spectrum(correlation_matrix(p), p.L);
    FcsResult f = fcs_from_beta(es.beta);
    CHECK(std::abs(f.variance - p.L * s2) / (p.L * s2) < 0.10);
}

TEST_CASE("thermal cutoff formula") {
    DiracParams p;
    p.L = 200;
    p.m = 0.5;
    p.T = 0.5;
    auto c1 = finite_T_cutoff(p, p.L, 1e-3);
    CHECK_FALSE(c1.t_zero_warning);
    // Cross-validation: the empirical tail at the computed cutoff is below
    // the target.
    auto es = entanglement_spectrum(correlation_matrix(p), p.L);
    FcsResult f = fcs_from_beta(es.beta);
    CHECK(f.tail(c1.W) <= 1e-3);

    // Monotone in the target.
    int prev = 0;
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-6}) {
        auto c = finite_T_cutoff(p, p.L, eps);
        CHECK(c.W >= prev);
        prev = c.W;
    }
    DiracParams t0 = p;
    t0.T = 0.0;
    CHECK(finite_T_cutoff(t0, p.L, 1e-3).t_zero_warning);
    CHECK_THROWS_AS(finite_T_cutoff(p, p.L, 1.5), ValidationError);
}

TEST_CASE("resource scaling") {
    ResourceConstants c;
    // Halving epsilon quadruples the array size once the polylog factor is
    // divided out (T0 mode).
    auto n_over_polylog = [&](double eps) {
        auto r = resource_estimate(eps, ResourceMode::T0, c);
        double u = std::log(1.0 / eps);
        return double(r.N) / (u * u);
    };
    double ratio = n_over_polylog(5e-4) / n_over_polylog(1e-3);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));

    // Regression slopes with the known polylog factors removed.
    auto slope = [&](ResourceMode mode, double poly_exp) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (double eps = 1e-4; eps <= 1e-2 * (1 + 1e-12); eps *= std::pow(10.0, 0.25)) {
            auto r = resource_estimate(eps, mode, c);
            double u = std::log(1.0 / eps);
            double y = std::log(double(r.N)) - poly_exp * std::log(u);
            sx += u;
            sy += y;
            sxx += u * u;
            sxy += u * y;
            ++n;
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    CHECK(std::abs(slope(ResourceMode::T0, 2.0) - 2.0) <= 0.1);
    CHECK(std::abs(slope(ResourceMode::FiniteT, 0.5) - 2.5) <= 0.1);

    // Degenerate target keeps the smallest admissible array.
    auto r1 = resource_estimate(1.0, ResourceMode::T0, c);
    CHECK(r1.L == 1);
    CHECK(r1.W == 0);
    CHECK(r1.N == 4);
    CHECK_THROWS_AS(resource_estimate(0.0, ResourceMode::T0, c), ValidationError);
}

TEST_SUITE_END();
