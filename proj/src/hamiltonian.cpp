#include "schwinger/hamiltonian.hpp"

#include <cmath>
#include <numbers>

namespace schwinger {

namespace {

template <class Scalar, class HopAmp>
HamiltonianMatrix<Scalar> build_impl(const LatticeParams& params, const SectorBasis& basis,
                                     Gauge gauge, HopAmp&& amp) {
    params.validate();
    if (basis.params.L != params.L || basis.params.W != params.W)
        throw ValidationError("basis was enumerated for different (L, W)");
    const std::int64_t dim = basis.size();
    std::vector<Eigen::Triplet<Scalar>> trips;
    trips.reserve(static_cast<std::size_t>(dim) * (params.n_bonds() + 1));
    for (std::int64_t i = 0; i < dim; ++i) {
        GaugeConfig cfg = basis.config(i);
        trips.emplace_back(i, i, Scalar(diagonal_energy(params, cfg)));
        for_each_hop(params, cfg, [&](OccupationKey target, int bond, bool raised) {
            auto j = basis.index_of(target);
            if (!j) return;  // outside the truncated sector
            trips.emplace_back(*j, i, amp(bond, raised));
        });
    }
    HamiltonianMatrix<Scalar> h;
    h.params = params;
    h.gauge = gauge;
    h.mat.resize(dim, dim);
    h.mat.setFromTriplets(trips.begin(), trips.end());
    h.mat.makeCompressed();
    return h;
}

}  // namespace

double diagonal_energy(const LatticeParams& params, const GaugeConfig& config) {
    const double bg = params.theta / (2.0 * std::numbers::pi);
    double e = -params.m * config.staggered_occupation();
    double coup = params.a * params.q * params.q / 2.0;
    for (int l : config.fields) e += coup * (l - bg) * (l - bg);
    return e;
}

SparseHamiltonian build_hamiltonian(const LatticeParams& params, const SectorBasis& basis) {
    const std::complex<double> up(0.0, -0.5 / params.a);  // <moved| H |state>, field raised
    return build_impl<std::complex<double>>(
        params, basis, Gauge::Complex,
        [up](int /*bond*/, bool raised) { return raised ? up : std::conj(up); });
}

SparseHamiltonianReal build_hamiltonian_real(const LatticeParams& params,
                                             const SectorBasis& basis) {
    const double t = 0.5 / params.a;
    return build_impl<double>(params, basis, Gauge::RealStaggered,
                              [t](int bond, bool /*raised*/) {
                                  return (bond % 2 == 1) ? t : -t;  // (-1)^(k-1) t
                              });
}

namespace {

template <class Vec>
ObservableRecord measure_impl(const Vec& state, const SectorBasis& basis, Observable which) {
    const std::int64_t dim = basis.size();
    if (state.size() != dim) throw ValidationError("state dimension does not match basis");
    double norm2 = 0.0;
    for (std::int64_t i = 0; i < dim; ++i) norm2 += std::norm(state[i]);
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-8)
        throw ValidationError("state is not normalized");

    const int n_sites = basis.params.n_sites();
    const int n_bonds = basis.params.n_bonds();
    ObservableRecord rec;
    bool all = (which == Observable::All);
    if (all || which == Observable::FieldProfile) rec.field_profile.assign(n_bonds, 0.0);
    if (all || which == Observable::ChargeDensity) rec.charge_density.assign(n_sites, 0.0);
    if (all || which == Observable::Occupation) rec.occupation.assign(n_sites, 0.0);

    for (std::int64_t i = 0; i < dim; ++i) {
        double w = std::norm(state[i]);
        if (w == 0.0) continue;
        GaugeConfig cfg = basis.config(i);
        auto occ = cfg.occupations();
        if (!rec.field_profile.empty())
            for (int k = 0; k < n_bonds; ++k) rec.field_profile[k] += w * cfg.fields[k];
        if (!rec.charge_density.empty())
            for (int j = 0; j < n_sites; ++j)
                rec.charge_density[j] += w * site_charge(j, occ[j]);
        if (!rec.occupation.empty())
            for (int j = 0; j < n_sites; ++j) rec.occupation[j] += w * occ[j];
        if (all || which == Observable::FieldSquaredTotal)
            rec.field_squared_total += w * cfg.field_square_sum();
    }
    return rec;
}

}  // namespace

ObservableRecord measure(const Eigen::VectorXcd& state, const SectorBasis& basis,
                         Observable which) {
    return measure_impl(state, basis, which);
}

ObservableRecord measure(const Eigen::VectorXd& state, const SectorBasis& basis,
                         Observable which) {
    return measure_impl(state, basis, which);
}

}  // namespace schwinger
