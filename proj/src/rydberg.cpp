#include "schwinger/rydberg.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include <Eigen/Dense>

#include "schwinger/solvers.hpp"

namespace schwinger {

void RydbergParams::validate() const {
    if (V <= 0 || Vprime <= 0) throw ValidationError("V and Vprime must be > 0");
    shell_table(shell_cutoff);  // throws on unsupported cutoff
}

bool RydbergParams::at_cancellation(double tol) const {
    return std::abs(Vprime / V - 125.0 / 64.0) <= tol;
}

std::vector<Shell> shell_table(int shell_cutoff) {
    static const std::array<int, 8> endpoints = {1, 2, 4, 5, 8, 9, 10, 13};
    if (std::find(endpoints.begin(), endpoints.end(), shell_cutoff) == endpoints.end())
        throw ValidationError("shell cutoff must be one of {1,2,4,5,8,9,10,13}");
    std::map<int, Shell> shells;
    for (int du = -3; du <= 3; ++du) {
        for (int dv = -3; dv <= 3; ++dv) {
            int r2 = du * du + dv * dv;
            if (r2 == 0 || r2 > shell_cutoff) continue;
            if (std::find(endpoints.begin(), endpoints.end(), r2) == endpoints.end()) continue;
            auto& s = shells[r2];
            s.r2 = r2;
            s.multiplicity += 1;
            s.odd_parity = ((du + dv) % 2 + 2) % 2 == 1;
            s.weight = 1.0 / (double(r2) * r2 * r2);
        }
    }
    std::vector<Shell> out;
    for (auto& [r2, s] : shells) out.push_back(s);
    return out;
}

double pair_coupling(int du, int dv, const RydbergParams& p) {
    int r2 = du * du + dv * dv;
    if (r2 == 0 || r2 > p.shell_cutoff) return 0.0;
    double w = 1.0 / (double(r2) * r2 * r2);
    bool odd = ((du + dv) % 2 + 2) % 2 == 1;
    return (odd ? p.Vprime : p.V) * w;
}

namespace {

// Occupation of atom (u, v) for a blockade-respecting interface with wall
// height y(u): same-parity atoms are excited below the wall, odd-parity
// atoms above it, and the wall atom itself is in the ground state.
bool wall_occupied(int u, int v, const std::function<int(int)>& y) {
    int yu = y(u);
    bool even = ((u + v) % 2 + 2) % 2 == 0;
    if (v == yu) return false;
    return (v > yu) ? !even : even;
}

// Interaction of a probe atom at (ux, vx) with every excited atom of the
// wall state, the probe itself excluded.
double wall_interaction_sum(int ux, int vx, const std::function<int(int)>& y,
                            const RydbergParams& p) {
    double s = 0.0;
    for (int du = -3; du <= 3; ++du) {
        for (int dv = -3; dv <= 3; ++dv) {
            if (du == 0 && dv == 0) continue;
            if (du * du + dv * dv > p.shell_cutoff) continue;
            if (wall_occupied(ux + du, vx + dv, y))
                s += pair_coupling(du, dv, p);
        }
    }
    return s;
}

// The four reference environments around a peak at vertex 1, given as
// heights at u = -2..4 (the flipped pair lives in column 1).
std::array<std::array<int, 7>, 4> reference_walls() {
    return {{
        {-2, -1, 0, 1, 0, -1, -2},  // a: straight peak
        {2, 1, 0, 1, 0, 1, 2},      // a': W-shaped
        {0, 1, 0, 1, 0, -1, 0},     // b
        {0, -1, 0, 1, 0, 1, 0},     // b'
    }};
}

std::function<int(int)> wall_fn(const std::array<int, 7>& w) {
    return [w](int u) {
        if (u < -2 || u > 4) throw ValidationError("wall queried outside its support");
        return w[u + 2];
    };
}

}  // namespace

StabilityReport bulk_gaps(const RydbergParams& p) {
    p.validate();
    StabilityReport r;
    double even_sum = 0.0, odd_sum = 0.0;
    for (const auto& s : shell_table(p.shell_cutoff))
        (s.odd_parity ? odd_sum : even_sum) += s.multiplicity * s.weight;
    r.DeltaBar = p.Delta - p.V * even_sum;
    r.DeltaBarPrime = -p.Delta + p.Vprime * odd_sum;
    r.DeltaBarDoublePrime =
        -p.Delta + p.Vprime + 2.0 * p.V / 8.0 + p.V / 64.0 + 2.0 * p.Vprime / 125.0;

    // Envelope of the omitted configuration-dependent tail from the same
    // enumeration that feeds the second-order denominators.
    double quoted = p.Vprime + 2.0 * p.V / 8.0 + p.V / 64.0 + 2.0 * p.Vprime / 125.0;
    double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
    for (const auto& w : reference_walls()) {
        auto y = wall_fn(w);
        double s = wall_interaction_sum(1, 0, y, p);
        lo = std::min(lo, s - quoted);
        hi = std::max(hi, s - quoted);
    }
    r.dpp_tail_lo = lo;
    r.dpp_tail_hi = hi;

    r.lower_margin = p.Delta - 0.5783 * p.V;
    r.upper_margin = 2.2953 * p.V - p.Delta;
    r.window_ok = r.lower_margin > 0 && r.upper_margin > 0;
    return r;
}

TailCouplings tail_couplings(const RydbergParams& p) {
    p.validate();
    TailCouplings t;
    t.nn_coefficient = -(p.V / 64.0 - p.Vprime / 125.0);
    t.residual_coefficient = p.Vprime * (1.0 / 729.0 + 1.0 / 2197.0) - 2.0 * p.V / 1000.0;
    return t;
}

DenominatorReport virtual_denominators(const RydbergParams& p) {
    p.validate();
    DenominatorReport r;
    r.at_cancellation = p.at_cancellation(1e-9);

    auto walls = reference_walls();
    std::array<double, 4> de{}, ex{};
    for (std::size_t i = 0; i < walls.size(); ++i) {
        auto y = wall_fn(walls[i]);
        // De-excitation channel: remove the excited atom of the flipped
        // pair, A(1, -1) for a peak at height one.
        de[i] = p.Delta - wall_interaction_sum(1, -1, y, p);
        // Blockade-violating channel: excite B(1, 0); the sum includes the
        // still-excited partner A(1, -1) one lattice unit below.
        ex[i] = -p.Delta + wall_interaction_sum(1, 0, y, p);
        if (de[i] <= 0 || ex[i] <= 0)
            throw ValidationError("non-positive virtual-state gap: outside the perturbative window");
    }
    r.deltaE_a = de[0];
    r.deltaE_a_prime = de[1];
    r.deltaE_b = de[2];
    r.deltaE_b_prime = de[3];
    r.excite_a = ex[0];
    r.excite_a_prime = ex[1];
    r.excite_b = ex[2];
    r.excite_b_prime = ex[3];

    r.region_A = -(2.0 * p.V / 8.0 + p.V / 64.0 + 2.0 * p.V / 512.0 + 2.0 * p.V / 1000.0);
    r.region_B = -(2.0 * p.Vprime / 125.0 + p.Vprime / 729.0 + 2.0 * p.Vprime / 2197.0);
    r.kappa_b = (p.Delta - r.deltaE_b) / p.V;
    r.kappa_excite_b = (r.excite_b + p.Delta) / p.V;

    r.DeltaTilde = p.Delta - 0.3422 * p.V;
    r.DeltaTildePrime = 2.2953 * p.V - p.Delta;

    double inv_ref = 1.0 / r.DeltaTilde;
    double m_a = 0.5 * (1.0 / r.deltaE_a + 1.0 / r.deltaE_a_prime);
    double m_b = 0.5 * (1.0 / r.deltaE_b + 1.0 / r.deltaE_b_prime);
    r.epsilon_spread =
        std::max(std::abs(m_a - inv_ref), std::abs(m_b - inv_ref)) / inv_ref;
    r.spread_ok = r.epsilon_spread <= 0.002;
    return r;
}

double effective_kinetic(const RydbergParams& p) {
    double dt = p.Delta - 0.3422 * p.V;
    double dtp = 2.2953 * p.V - p.Delta;
    if (dt <= 0 || dtp <= 0)
        throw ValidationError("detuning outside the perturbative window");
    double half = 0.5 * p.Omega;
    return half * half * (1.0 / dt + 1.0 / dtp);
}

RydbergDesign dictionary_solve(const LatticeParams& lattice, const DesignConstraints& c) {
    lattice.validate();
    if (c.V <= 0) throw ValidationError("V must be > 0");
    RydbergDesign d;
    d.params.V = c.V;
    d.params.Vprime = 125.0 / 64.0 * c.V;
    d.params.Delta = c.Delta;

    double dt = c.Delta - 0.3422 * c.V;
    double dtp = 2.2953 * c.V - c.Delta;
    if (dt <= 0 || dtp <= 0) throw ValidationError("Delta outside the stability window");

    double t_target = 0.5 / lattice.a;
    double omega = 2.0 * std::sqrt(t_target / (1.0 / dt + 1.0 / dtp));
    if (omega > c.Omega_max)
        throw ValidationError("required Rabi frequency exceeds Omega_max");
    d.params.Omega = omega;

    // Field amplitudes for the orientation with same-parity atoms excited
    // below the wall; fixed by the Omega -> 0 classical comparison.
    const double aq2 = lattice.a * lattice.q * lattice.q;
    d.params.h = aq2 * lattice.theta / (2.0 * std::numbers::pi);
    d.params.hprime = -aq2 / 2.0;
    d.params.mu = -2.0 * lattice.m;
    d.orientation_note =
        "same-parity species excited below the wall; h = a q^2 theta / 2 pi, "
        "h' = -a q^2 / 2, mu = -2 m reproduce the sector diagonal";

    TailCouplings tails = tail_couplings(d.params);
    double residual = std::abs(tails.residual_coefficient);
    double t_eff = effective_kinetic(d.params);
    double field_min = std::min(d.params.h == 0 ? 1e300 : std::abs(d.params.h),
                                d.params.hprime == 0 ? 1e300 : std::abs(d.params.hprime));
    double field_max = std::max(std::abs(d.params.h), std::abs(d.params.hprime));

    bool feasible = true;
    auto push_ratio = [&](const std::string& name, double num, double den) {
        if (den == 0 || num >= 1e300) return;  // rung not applicable
        double ratio = num / den;
        d.ratios.emplace_back(name, ratio);
        if (ratio < c.min_ratio) feasible = false;
    };
    push_ratio("fields_over_tail", field_min, residual);
    if (field_max > 0) push_ratio("mu_over_fields", std::abs(d.params.mu), field_max);
    if (d.params.mu != 0) push_ratio("kinetic_over_mu", 4.0 * t_eff, std::abs(d.params.mu));
    push_ratio("V_over_kinetic", c.V, 4.0 * t_eff);
    d.ratios.emplace_back("Delta_over_V", c.Delta / c.V);
    d.feasible = feasible && bulk_gaps(d.params).window_ok;

    // One atom per cell of the (L, W) window, wall rows centered on zero.
    int rows = 2 * lattice.W + 2;
    for (int u = 0; u <= 2 * lattice.L; ++u) {
        for (int v = -rows; v <= rows; ++v) {
            AtomSpec a;
            a.x = u;
            a.y = v;
            a.even_sublattice = ((u + v) % 2 + 2) % 2 == 0;
            a.detuning = d.params.Delta;
            if (a.even_sublattice) {
                a.detuning += d.params.h + d.params.hprime * (v + ((v % 2 + 2) % 2 == 0 ? 1 : 0)) +
                              d.params.mu * (((v % 2 + 2) % 2 == 0) ? 1 : -1);
            }
            a.omega = omega;
            if (c.rabi_modulation && a.even_sublattice) {
                double stag = (((v % 2 + 2) % 2 == 0) ? 1.0 : -1.0);
                a.omega = omega * (1.0 + stag * d.params.mu / c.V + v * d.params.hprime / c.V);
            }
            d.atoms.push_back(a);
        }
    }
    return d;
}

void PatchSpec::validate() const {
    if (n_moves < 2 || n_moves % 2 != 0)
        throw ValidationError("n_moves must be even and >= 2");
    if (height_max < 1) throw ValidationError("height_max must be >= 1");
    if (pad < 3) throw ValidationError("pad must be >= 3 to close the interaction shells");
    int free_atoms = (n_moves - 1) * (2 * height_max + 1);
    if (free_atoms > max_free_atoms)
        throw ValidationError("patch too large: " + std::to_string(free_atoms) + " free atoms");
}

namespace {

struct Patch {
    PatchSpec spec;
    std::vector<std::pair<int, int>> free_atoms;        // (u, v)
    std::vector<std::vector<int>> paths;                // wall heights, size n_moves+1
    std::vector<std::uint32_t> path_masks;              // free-atom occupation per path

    int clamp_height(int u) const {
        // Vacuum continuation outside the free window; also used for the
        // pinned endpoint columns.
        return (((u % 2) + 2) % 2 == 1) ? 1 : 0;
    }
};

// Heights of clamped columns and clamped rows follow the vacuum zigzag.
int patch_wall_height(const Patch& patch, const std::vector<int>& y, int u) {
    if (u >= 1 && u <= patch.spec.n_moves - 1) return y[u];
    return patch.clamp_height(u);
}

bool patch_occupied(const Patch& patch, const std::vector<int>& y, int u, int v) {
    auto fn = [&](int uu) { return patch_wall_height(patch, y, uu); };
    return wall_occupied(u, v, fn);
}

void enumerate_paths(int n_moves, int height_max, std::vector<int>& cur,
                     std::vector<std::vector<int>>& out) {
    int j = static_cast<int>(cur.size()) - 1;
    if (j == n_moves) {
        if (cur.back() == 0) out.push_back(cur);
        return;
    }
    for (int step : {1, -1}) {
        int ny = cur.back() + step;
        if (std::abs(ny) > height_max) continue;
        if (std::abs(ny) > n_moves - (j + 1)) continue;  // cannot return to zero
        cur.push_back(ny);
        enumerate_paths(n_moves, height_max, cur, out);
        cur.pop_back();
    }
}

Patch build_patch(const PatchSpec& spec) {
    spec.validate();
    Patch patch;
    patch.spec = spec;
    for (int u = 1; u <= spec.n_moves - 1; ++u)
        for (int v = -spec.height_max; v <= spec.height_max; ++v)
            patch.free_atoms.emplace_back(u, v);

    std::vector<int> cur{0};
    enumerate_paths(spec.n_moves, spec.height_max, cur, patch.paths);
    std::sort(patch.paths.begin(), patch.paths.end());

    for (const auto& y : patch.paths) {
        std::uint32_t mask = 0;
        for (std::size_t i = 0; i < patch.free_atoms.size(); ++i) {
            auto [u, v] = patch.free_atoms[i];
            if (patch_occupied(patch, y, u, v)) mask |= 1u << i;
        }
        patch.path_masks.push_back(mask);
    }

    // Clamped atoms in the free columns must be state independent.
    for (int u = 1; u <= spec.n_moves - 1; ++u) {
        for (int v = -(spec.height_max + spec.pad); v <= spec.height_max + spec.pad; ++v) {
            if (std::abs(v) <= spec.height_max) continue;
            bool first = patch_occupied(patch, patch.paths.front(), u, v);
            for (const auto& y : patch.paths) {
                if (patch_occupied(patch, y, u, v) != first)
                    throw ValidationError("clamped atom occupation varies across interface states");
            }
        }
    }
    return patch;
}

double even_pattern(const RydbergParams& p, int u, int v) {
    if (((u + v) % 2 + 2) % 2 != 0) return 0.0;
    int vpar = ((v % 2) + 2) % 2;
    return p.h + p.hprime * (v + (vpar == 0 ? 1 : 0)) + p.mu * (vpar == 0 ? 1.0 : -1.0);
}

}  // namespace

std::int64_t patch_interface_count(const PatchSpec& spec) {
    spec.validate();
    Patch patch = build_patch(spec);
    return static_cast<std::int64_t>(patch.paths.size());
}

RydbergVerifyReport verify_rydberg(const PatchSpec& spec, const RydbergParams& p,
                                   bool include_tail_terms) {
    p.validate();
    Patch patch = build_patch(spec);
    const int nfree = static_cast<int>(patch.free_atoms.size());
    const std::int64_t dim = std::int64_t(1) << nfree;
    const int npaths = static_cast<int>(patch.paths.size());

    RydbergVerifyReport rep;
    rep.free_atoms = nfree;
    rep.dim = dim;
    rep.n_interface_states = npaths;
    rep.omega_over_delta = p.Omega / p.Delta;
    if (p.Omega != 0 && rep.omega_over_delta > 0.05)
        throw ValidationError("Omega/Delta must be <= 0.05");

    // Geometry of the clamped environment.
    const int umin = -spec.pad, umax = spec.n_moves + spec.pad;
    const int vmax = spec.height_max + spec.pad;
    auto is_free = [&](int u, int v) {
        return u >= 1 && u <= spec.n_moves - 1 && std::abs(v) <= spec.height_max;
    };
    std::vector<std::pair<int, int>> clamped_occupied;
    for (int u = umin; u <= umax; ++u)
        for (int v = -vmax; v <= vmax; ++v)
            if (!is_free(u, v) && patch_occupied(patch, patch.paths.front(), u, v))
                clamped_occupied.emplace_back(u, v);

    // Per-atom static field: global detuning, pattern, and clamped shell.
    Eigen::VectorXd field(nfree);
    for (int i = 0; i < nfree; ++i) {
        auto [u, v] = patch.free_atoms[i];
        double f = -p.Delta - even_pattern(p, u, v);
        for (auto [cu, cv] : clamped_occupied) f += pair_coupling(cu - u, cv - v, p);
        field(i) = f;
    }
    Eigen::MatrixXd pair = Eigen::MatrixXd::Zero(nfree, nfree);
    for (int i = 0; i < nfree; ++i)
        for (int j = i + 1; j < nfree; ++j) {
            auto [ui, vi] = patch.free_atoms[i];
            auto [uj, vj] = patch.free_atoms[j];
            pair(i, j) = pair(j, i) = pair_coupling(uj - ui, vj - vi, p);
        }

    // Classical energies of every occupation pattern of the free atoms.
    Eigen::VectorXd diag(dim);
    diag(0) = 0.0;
    for (std::int64_t s = 1; s < dim; ++s) {
        int b = std::countr_zero(static_cast<std::uint64_t>(s));
        std::int64_t prev = s & (s - 1);
        double e = diag(prev) + field(b);
        std::int64_t rest = prev;
        while (rest) {
            int j = std::countr_zero(static_cast<std::uint64_t>(rest));
            e += pair(b, j);
            rest &= rest - 1;
        }
        diag(s) = e;
    }

    // Lowest band of the full patch.
    const int n_want = npaths + 2;
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;
    if (p.Omega == 0.0) {
        // Classical limit: the spectrum is the sorted diagonal.
        std::vector<std::int64_t> idx(dim);
        std::iota(idx.begin(), idx.end(), 0);
        std::partial_sort(idx.begin(), idx.begin() + n_want, idx.end(),
                          [&](std::int64_t a, std::int64_t b) { return diag(a) < diag(b); });
        evals.resize(n_want);
        evecs = Eigen::MatrixXd::Zero(dim, n_want);
        for (int i = 0; i < n_want; ++i) {
            evals(i) = diag(idx[i]);
            evecs(idx[i], i) = 1.0;
        }
    } else {
        const double half_omega = 0.5 * p.Omega;
        auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& yv) {
            yv.array() = diag.array() * x.array();
            for (int b = 0; b < nfree; ++b) {
                const std::int64_t bit = std::int64_t(1) << b;
                for (std::int64_t s = 0; s < dim; ++s)
                    yv(s) -= half_omega * x(s ^ bit);
            }
        };
        LanczosOptions opts;
        opts.n_eigs = n_want;
        opts.tol = 1e-9;
        opts.max_total_iter = 20000;
        auto pairs = lanczos_lowest<double>(apply, dim, opts);
        evals = pairs.values;
        evecs = pairs.vectors;
    }

    rep.full_band.assign(evals.data(), evals.data() + npaths);
    rep.gap_to_bulk = evals(npaths) - evals(npaths - 1);

    rep.min_band_overlap = 1.0;
    for (int i = 0; i < npaths; ++i) {
        double w = 0.0;
        for (int k = 0; k < npaths; ++k) w += evecs(patch.path_masks[k], i) * evecs(patch.path_masks[k], i);
        rep.min_band_overlap = std::min(rep.min_band_overlap, w);
    }

    // Effective interface model: dictionary diagonal plus tail terms plus
    // the second-order hopping.
    rep.t_eff = (p.Omega == 0.0) ? 0.0 : effective_kinetic(p);
    TailCouplings tails = tail_couplings(p);
    Eigen::MatrixXd heff = Eigen::MatrixXd::Zero(npaths, npaths);
    for (int i = 0; i < npaths; ++i) {
        const auto& y = patch.paths[i];
        rep.classical_energies.push_back(diag(patch.path_masks[i]));
        {
            auto move_at = [&](int u) {
                return patch_wall_height(patch, y, u + 1) - patch_wall_height(patch, y, u) > 0
                           ? 1
                           : 0;
            };
            int nn = 0, triples = 0;
            for (int u = -spec.pad; u <= spec.n_moves - 1 + spec.pad - 1; ++u) {
                if (move_at(u) == move_at(u + 1)) ++nn;
                if (u <= spec.n_moves - 1 + spec.pad - 2 && move_at(u) == move_at(u + 1) &&
                    move_at(u + 1) == move_at(u + 2))
                    ++triples;
            }
            rep.nn_counts.push_back(nn);
            rep.triple_counts.push_back(triples);
        }
        double e = 0.0;
        // Dictionary diagonal in terms of the encoded bond fields.
        for (int j = 1; j <= spec.n_moves - 1; ++j) {
            int l = (y[j] - (j % 2 + 2) % 2) / 2;
            double stag_l = ((j % 2) == 0) ? l : -l;
            e += -p.h * l - p.hprime * double(l) * l - p.mu * stag_l;
        }
        if (include_tail_terms) {
            // Moves over the padded window, clamped continuation included.
            auto move_at = [&](int u) {
                int y0 = patch_wall_height(patch, y, u);
                int y1 = patch_wall_height(patch, y, u + 1);
                return y1 - y0 > 0 ? 1 : 0;
            };
            for (int u = -spec.pad; u <= spec.n_moves - 1 + spec.pad - 1; ++u) {
                if (move_at(u) == move_at(u + 1)) e += tails.nn_coefficient;
                if (u <= spec.n_moves - 1 + spec.pad - 2 && move_at(u) == move_at(u + 1) &&
                    move_at(u + 1) == move_at(u + 2))
                    e += tails.residual_coefficient;
            }
        }
        heff(i, i) = e;
        for (int k = 0; k < npaths; ++k) {
            if (k == i) continue;
            int ndiff = 0, where = -1;
            for (int j = 1; j <= spec.n_moves - 1; ++j)
                if (patch.paths[i][j] != patch.paths[k][j]) {
                    ++ndiff;
                    where = j;
                }
            if (ndiff == 1 && std::abs(patch.paths[i][where] - patch.paths[k][where]) == 2)
                heff(i, k) = -rep.t_eff;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(heff);
    rep.eff_band.assign(es.eigenvalues().data(), es.eigenvalues().data() + npaths);

    double mean_full = 0.0, mean_eff = 0.0;
    for (int i = 0; i < npaths; ++i) {
        mean_full += rep.full_band[i];
        mean_eff += rep.eff_band[i];
    }
    mean_full /= npaths;
    mean_eff /= npaths;
    for (int i = 0; i < npaths; ++i) {
        double d = std::abs((rep.full_band[i] - mean_full) - (rep.eff_band[i] - mean_eff));
        rep.max_spectral_deviation = std::max(rep.max_spectral_deviation, d);
    }
    return rep;
}

}  // namespace schwinger
