#include <doctest.h>

#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "schwinger/rydberg.hpp"

using namespace schwinger;

namespace {

RydbergParams cancel_params(double Delta) {
    RydbergParams p;
    p.V = 1.0;
    p.Vprime = 125.0 / 64.0;
    p.Delta = Delta;
    return p;
}

// Independent route to the reference gaps: region sums plus per-environment
// extras written directly from the shell weights.
struct DenomOracle {
    double a, a_prime, b;
};
DenomOracle denominator_oracle(double Delta, double V, double Vp) {
    double region_A = 2 * V / 8 + V / 64 + 2 * V / 512 + 2 * V / 1000;
    double region_B = 2 * Vp / 125 + Vp / 729 + 2 * Vp / 2197;
    double extra_a = 2 * Vp / 125 + 2 * Vp / 729 + 2 * Vp / 2197;
    double extra_ap = 2 * V / 64 + 4 * V / 1000;
    double extra_b = 2 * V / 64 + 2 * V / 1000 + 2 * Vp / 2197;
    return {Delta - (region_A + region_B + extra_a), Delta - (region_A + region_B + extra_ap),
            Delta - (region_A + region_B + extra_b)};
}

// Ballot oracle: walks of n +-1 steps from 0 to 0 staying within |y| <= h.
std::int64_t ballot_count(int n, int h) {
    std::vector<std::int64_t> cur(2 * h + 1, 0);
    cur[h] = 1;
    for (int s = 0; s < n; ++s) {
        std::vector<std::int64_t> nxt(2 * h + 1, 0);
        for (int y = 0; y <= 2 * h; ++y) {
            if (!cur[y]) continue;
            if (y + 1 <= 2 * h) nxt[y + 1] += cur[y];
            if (y - 1 >= 0) nxt[y - 1] += cur[y];
        }
        cur = std::move(nxt);
    }
    return cur[h];
}

// Least-squares fit e ~ c0 + c_nn * nn + c_tr * triples.
Eigen::Vector3d fit_tail_coefficients(const RydbergVerifyReport& rep) {
    const int n = rep.n_interface_states;
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = rep.nn_counts[i];
        X(i, 2) = rep.triple_counts[i];
        y(i) = rep.classical_energies[i];
    }
    return (X.transpose() * X).ldlt().solve(X.transpose() * y);
}

}  // namespace

TEST_SUITE_BEGIN("rydberg");

TEST_CASE("shell table") {
    auto shells = shell_table(13);
    REQUIRE(shells.size() == 8);
    int mult = 0;
    for (const auto& s : shells) mult += s.multiplicity;
    CHECK(mult == 44);

    auto find = [&](int r2) {
        for (const auto& s : shells)
            if (s.r2 == r2) return s;
        FAIL("missing shell");
        return Shell{};
    };
    CHECK(find(1).multiplicity == 4);
    CHECK(find(1).odd_parity);
    CHECK(find(2).multiplicity == 4);
    CHECK(!find(2).odd_parity);
    CHECK(find(5).multiplicity == 8);
    CHECK(find(5).weight == doctest::Approx(1.0 / 125.0).epsilon(1e-15));
    CHECK(find(13).multiplicity == 8);
    CHECK(find(10).multiplicity == 8);
    CHECK(!find(10).odd_parity);

    CHECK(shell_table(2).size() == 2);
    CHECK_THROWS_AS(shell_table(3), ValidationError);
    CHECK_THROWS_AS(shell_table(16), ValidationError);
}

TEST_CASE("bulk stability gaps") {
    auto p = cancel_params(1.0);
    p.Vprime = 1.0;
    StabilityReport r = bulk_gaps(p);
    CHECK(r.DeltaBar == doctest::Approx(1.0 - 0.5783125).epsilon(1e-14));
    CHECK(std::abs(r.DeltaBar - 0.4217) < 5e-5);
    CHECK(std::abs(r.DeltaBarPrime - 3.0734) < 5e-4);  // four-digit reference
    CHECK(r.DeltaBarPrime ==
          doctest::Approx(4.0 * (1 + 2.0 / 125 + 1.0 / 729 + 2.0 / 2197) - 1.0).epsilon(1e-14));

    auto pe = cancel_params(0.5783125);
    StabilityReport re = bulk_gaps(pe);
    CHECK(std::abs(re.DeltaBar) < 5e-5);

    auto pw = cancel_params(1.4);
    StabilityReport rw = bulk_gaps(pw);
    CHECK(rw.window_ok);
    CHECK(rw.DeltaBarDoublePrime == doctest::Approx(2.25 - 1.4).epsilon(1e-13));
    CHECK(rw.dpp_tail_lo > 0.04);
    CHECK(rw.dpp_tail_hi < 0.05);
    CHECK(!bulk_gaps(cancel_params(0.3)).window_ok);
}

TEST_CASE("tail couplings and the cancellation ratio") {
    RydbergParams p;
    p.V = 64.0;
    p.Vprime = 125.0;  // exact integer ratio
    TailCouplings t = tail_couplings(p);
    CHECK(t.nn_coefficient == 0.0);  // exactly zero at V'/V = 125/64
    CHECK(t.residual_coefficient / p.V ==
          doctest::Approx(125.0 / 64.0 * (1.0 / 729 + 1.0 / 2197) - 2.0 / 1000).epsilon(1e-14));
    CHECK(std::abs(t.residual_coefficient / p.V - 0.0016) < 5e-5);

    RydbergParams q;
    q.V = 1.0;
    q.Vprime = 1.0;
    CHECK(tail_couplings(q).nn_coefficient ==
          doctest::Approx(-(1.0 / 64 - 1.0 / 125)).epsilon(1e-14));
}

TEST_CASE("virtual denominators against the region-sum oracle") {
    auto p = cancel_params(1.0);
    DenominatorReport r = virtual_denominators(p);
    CHECK(r.at_cancellation);
    DenomOracle oracle = denominator_oracle(1.0, 1.0, 125.0 / 64.0);
    CHECK(r.deltaE_a == doctest::Approx(oracle.a).epsilon(1e-13));
    CHECK(r.deltaE_a_prime == doctest::Approx(oracle.a_prime).epsilon(1e-13));
    CHECK(r.deltaE_b == doctest::Approx(oracle.b).epsilon(1e-13));
    CHECK(r.deltaE_b_prime == doctest::Approx(oracle.b).epsilon(1e-13));
    CHECK(r.region_A == doctest::Approx(-(2.0 / 8 + 1.0 / 64 + 2.0 / 512 + 2.0 / 1000)));

    // Four-digit reference constants.
    CHECK(std::abs((1.0 - r.deltaE_a) - 0.3456) < 5e-5);
    CHECK(std::abs((1.0 - r.deltaE_a_prime) - 0.3425) < 5e-5);
    CHECK(std::abs(r.kappa_b - 0.3422) < 1e-4);  // truncated reference, off by 6.6e-5
    CHECK(std::abs(r.kappa_excite_b - 2.2953) < 1e-4);
    CHECK(r.DeltaTilde == doctest::Approx(1.0 - 0.3422));
    CHECK(r.DeltaTildePrime == doctest::Approx(2.2953 - 1.0));

    // The configuration spread stays below 0.2% at the mid-window point.
    DenominatorReport rm = virtual_denominators(cancel_params(1.4));
    CHECK(rm.epsilon_spread <= 0.002);
    CHECK(rm.spread_ok);

    CHECK_THROWS_AS(virtual_denominators(cancel_params(3.0)), ValidationError);
}

TEST_CASE("denominators are linear in the couplings") {
    auto p = cancel_params(1.3);
    DenominatorReport r1 = virtual_denominators(p);
    auto p2 = p;
    p2.V *= 2;
    p2.Vprime *= 2;
    p2.Delta *= 2;
    DenominatorReport r2 = virtual_denominators(p2);
    CHECK(r2.deltaE_a == doctest::Approx(2 * r1.deltaE_a).epsilon(1e-13));
    CHECK(r2.excite_b == doctest::Approx(2 * r1.excite_b).epsilon(1e-13));
    StabilityReport s1 = bulk_gaps(p), s2 = bulk_gaps(p2);
    CHECK(s2.DeltaBar == doctest::Approx(2 * s1.DeltaBar).epsilon(1e-13));
    CHECK(s2.DeltaBarPrime == doctest::Approx(2 * s1.DeltaBarPrime).epsilon(1e-13));
}

TEST_CASE("effective kinetic scale") {
    auto p = cancel_params(1.0);
    p.Omega = 0.0;
    CHECK(effective_kinetic(p) == 0.0);
    p.Omega = 0.1;
    CHECK(effective_kinetic(p) ==
          doctest::Approx(0.0025 * (1.0 / 0.6578 + 1.0 / 1.2953)).epsilon(1e-13));
    auto bad = cancel_params(3.0);  // above the window
    bad.Omega = 0.1;
    CHECK_THROWS_AS(effective_kinetic(bad), ValidationError);
}

TEST_CASE("dictionary solve") {
    LatticeParams lat;
    lat.L = 4;
    lat.W = 2;
    lat.m = 0.02;
    lat.q = 0.2;
    lat.theta = 1.1;
    DesignConstraints c;
    c.V = 1.0;
    c.Delta = 1.4;
    c.Omega_max = 2.0;
    RydbergDesign d = dictionary_solve(lat, c);
    CHECK(d.params.Omega > 0);
    CHECK(effective_kinetic(d.params) == doctest::Approx(0.5 / lat.a).epsilon(1e-12));
    CHECK(!d.atoms.empty());
    CHECK(!d.ratios.empty());

    LatticeParams flat = lat;
    flat.theta = 0.0;
    CHECK(dictionary_solve(flat, c).params.h == 0.0);
    LatticeParams massless = lat;
    massless.m = 0.0;
    CHECK(dictionary_solve(massless, c).params.mu == 0.0);

    DesignConstraints tight = c;
    tight.Omega_max = 1e-4;
    CHECK_THROWS_AS(dictionary_solve(lat, tight), ValidationError);
}

TEST_CASE("patch interface count matches the ballot oracle") {
    PatchSpec spec;
    spec.n_moves = 4;
    spec.height_max = 2;
    CHECK(patch_interface_count(spec) == ballot_count(4, 2));
    CHECK(patch_interface_count(spec) == 6);
    spec.height_max = 1;
    CHECK(patch_interface_count(spec) == ballot_count(4, 1));

    PatchSpec big;
    big.n_moves = 8;
    big.height_max = 3;
    CHECK_THROWS_AS(big.validate(), ValidationError);  // too many free atoms
}

TEST_CASE("classical patch splits exactly per dictionary plus tails") {
    PatchSpec spec;
    auto p = cancel_params(1.4);
    p.Omega = 0.0;
    RydbergVerifyReport rep = verify_rydberg(spec, p, true);
    CHECK(rep.n_interface_states == 6);
    CHECK(rep.max_spectral_deviation < 1e-10);
    CHECK(rep.gap_to_bulk > 0.3);

    // With field patterns from a solved dictionary the classical band must
    // still split exactly as the sector diagonal predicts.
    LatticeParams lat;
    lat.L = 2;
    lat.W = 2;
    lat.m = 0.004;
    lat.q = 0.08;
    lat.theta = 0.9;
    DesignConstraints c;
    c.V = 1.0;
    c.Delta = 1.4;
    c.Omega_max = 2.0;
    RydbergDesign d = dictionary_solve(lat, c);
    RydbergParams pp = d.params;
    pp.Omega = 0.0;
    RydbergVerifyReport rep2 = verify_rydberg(spec, pp, true);
    CHECK(rep2.max_spectral_deviation < 1e-10);
}

TEST_CASE("classical tail-coefficient regression and the cancellation gain") {
    PatchSpec spec;
    auto pv = cancel_params(1.4);
    pv.Omega = 0.0;
    pv.Vprime = pv.V;  // no cancellation
    RydbergVerifyReport rv = verify_rydberg(spec, pv, false);
    Eigen::Vector3d cv = fit_tail_coefficients(rv);
    CHECK(std::abs(cv(1) - tail_couplings(pv).nn_coefficient) < 1e-10);

    auto pc = cancel_params(1.4);
    pc.Omega = 0.0;
    RydbergVerifyReport rc = verify_rydberg(spec, pc, false);
    Eigen::Vector3d cc = fit_tail_coefficients(rc);
    CHECK(std::abs(cc(1)) * 10.0 <= std::abs(cv(1)));
    CHECK(std::abs(cc(2) - tail_couplings(pc).residual_coefficient) < 1e-10);
}

TEST_CASE("quantum patch stays within the perturbative budget") {
    PatchSpec spec;
    auto p = cancel_params(1.4);
    p.Omega = 0.02 * p.Delta;
    RydbergVerifyReport rep = verify_rydberg(spec, p, true);
    double dt = p.Delta - 0.3422 * p.V;
    double budget = 50.0 * std::pow(p.Omega, 3) / (dt * dt);
    CHECK(rep.max_spectral_deviation <= budget);
    CHECK(rep.min_band_overlap > 0.99);
    CHECK(rep.gap_to_bulk > 0.3);

    auto fast = p;
    fast.Omega = 0.1 * p.Delta;
    CHECK_THROWS_AS(verify_rydberg(spec, fast, true), ValidationError);
}

TEST_SUITE_END();
