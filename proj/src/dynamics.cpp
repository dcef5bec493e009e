#include "schwinger/dynamics.hpp"

#include <cmath>
#include <numbers>

#include "schwinger/interface_codec.hpp"
#include "schwinger/solvers.hpp"

namespace schwinger {

void EvolutionSpec::validate() const {
    if (t_final <= 0) throw ValidationError("t_final must be > 0");
    if (dt_out <= 0) throw ValidationError("dt_out must be > 0");
    if (krylov_dim < 2) throw ValidationError("krylov_dim must be >= 2");
    if (tol <= 0) throw ValidationError("tolerance must be > 0");
}

namespace {

// One Lanczos propagation substep. Returns the advanced time (<= dt_try).
double krylov_step(const ComplexMatVec& apply_h, Eigen::VectorXcd& psi, double dt_try,
                   int m, double tol) {
    const std::int64_t dim = psi.size();
    m = static_cast<int>(std::min<std::int64_t>(m, dim));
    Eigen::MatrixXcd V(dim, m);
    Eigen::VectorXd alpha(m), beta(m);  // beta(j) couples j and j+1
    Eigen::VectorXcd w(dim);

    double nrm = psi.norm();
    V.col(0) = psi / nrm;
    int built = 0;
    bool happy = false;
    for (int j = 0; j < m; ++j) {
        apply_h(V.col(j), w);
        alpha(j) = std::real(std::complex<double>(V.col(j).adjoint() * w));
        w -= std::complex<double>(alpha(j)) * V.col(j);
        if (j > 0) w -= std::complex<double>(beta(j - 1)) * V.col(j - 1);
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXcd h = V.leftCols(j + 1).adjoint() * w;
            w.noalias() -= V.leftCols(j + 1) * h;
        }
        built = j + 1;
        double b = w.norm();
        if (j + 1 < m) {
            if (b < 1e-12 * std::max(1.0, std::abs(alpha(j)))) {
                happy = true;  // invariant subspace: propagation exact
                break;
            }
            beta(j) = b;
            V.col(j + 1) = w / b;
        } else {
            beta(j) = b;  // residual coupling used for the error estimate
        }
    }

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(built, built);
    for (int j = 0; j < built; ++j) {
        t(j, j) = alpha(j);
        if (j + 1 < built) t(j, j + 1) = t(j + 1, j) = beta(j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);

    double dt = dt_try;
    while (true) {
        Eigen::VectorXcd phase(built);
        for (int i = 0; i < built; ++i)
            phase(i) = std::exp(std::complex<double>(0.0, -dt * es.eigenvalues()(i)));
        Eigen::VectorXcd u =
            es.eigenvectors().cast<std::complex<double>>() *
            (phase.array() * es.eigenvectors().row(0).transpose().cast<std::complex<double>>().array())
                .matrix();
        double err = happy ? 0.0 : std::abs(beta(built - 1)) * std::abs(u(built - 1)) * dt;
        if (err <= tol || dt < 1e-14) {
            psi = nrm * (V.leftCols(built) * u);
            return dt;
        }
        dt *= 0.5;  // halve until the local estimate passes
    }
}

}  // namespace

void krylov_evolve(const ComplexMatVec& apply_h, Eigen::VectorXcd& psi,
                   const EvolutionSpec& spec,
                   const std::function<void(double, const Eigen::VectorXcd&)>& observer) {
    spec.validate();
    if (std::abs(psi.norm() - 1.0) > 1e-10)
        throw ValidationError("initial state is not normalized");
    double t = 0.0;
    if (observer) observer(t, psi);
    std::int64_t steps = 0;
    while (t < spec.t_final - 1e-12) {
        double t_next = std::min(t + spec.dt_out, spec.t_final);
        while (t < t_next - 1e-12) {
            double advanced =
                krylov_step(apply_h, psi, t_next - t, spec.krylov_dim, spec.tol);
            t += advanced;
            if (++steps > spec.max_steps)
                throw ConvergenceError("time evolution exceeded max_steps");
        }
        if (observer) observer(t, psi);
    }
}

namespace {

template <class HMat>
TimeSeries evolve_impl(const HMat& h, const SectorBasis& basis, Eigen::VectorXcd psi,
                       const EvolutionSpec& spec) {
    using Scalar = typename std::decay_t<decltype(h.mat)>::Scalar;
    ComplexMatVec apply = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
        if constexpr (std::is_same_v<Scalar, double>) {
            y.real() = h.mat * x.real().eval();
            y.imag() = h.mat * x.imag().eval();
        } else {
            y.noalias() = h.mat * x;
        }
    };
    TimeSeries ts;
    Eigen::VectorXcd hv(psi.size());
    auto observer = [&](double t, const Eigen::VectorXcd& v) {
        ts.times.push_back(t);
        Eigen::VectorXcd vn = v / v.norm();
        ObservableRecord rec = measure(vn, basis);
        ts.field_profile.push_back(rec.field_profile);
        ts.charge_density.push_back(rec.charge_density);
        ts.field_squared_total.push_back(rec.field_squared_total);
        apply(v, hv);
        ts.energy.push_back(std::real(std::complex<double>(v.adjoint() * hv)));
        ts.norm.push_back(v.norm());
    };
    krylov_evolve(apply, psi, spec, observer);
    return ts;
}

}  // namespace

TimeSeries evolve_observables(const SparseHamiltonian& h, const SectorBasis& basis,
                              Eigen::VectorXcd psi0, const EvolutionSpec& spec) {
    return evolve_impl(h, basis, std::move(psi0), spec);
}

TimeSeries evolve_observables(const SparseHamiltonianReal& h, const SectorBasis& basis,
                              Eigen::VectorXcd psi0, const EvolutionSpec& spec) {
    return evolve_impl(h, basis, std::move(psi0), spec);
}

void QuenchScenario::validate(const LatticeParams& params) const {
    if (kind == Kind::String) {
        if (d < 1 || d % 2 == 0)
            throw ValidationError(
                "string separation d must be odd (even site to odd site)");
        if (d > 2 * params.L - 1) throw ValidationError("string does not fit the lattice");
        if (params.W < 1) throw ValidationError("string state needs W >= 1");
    } else if (kind == Kind::Custom) {
        if (static_cast<int>(occupations.size()) != 2 * params.L)
            throw ValidationError("custom occupations must have length 2L");
    }
}

GaugeConfig string_initial_config(const LatticeParams& params, int d) {
    std::vector<int> occ(2 * params.L);
    for (int j = 0; j < 2 * params.L; ++j) occ[j] = (j % 2 == 0) ? 1 : 0;
    int start = (2 * params.L - 1 - d) / 2;
    start -= start % 2;  // even source site, string roughly centered
    if (start < 0 || start + d > 2 * params.L - 1)
        throw ValidationError("string does not fit the lattice");
    occ[start] = 0;
    occ[start + d] = 1;
    return GaugeConfig::from_occupations(occ);
}

QuenchResult run_quench(const QuenchScenario& scenario, const LatticeParams& params,
                        const EvolutionSpec& spec) {
    params.validate();
    scenario.validate(params);
    SectorBasis basis = enumerate_basis(params);
    SparseHamiltonian h = build_hamiltonian(params, basis);

    QuenchResult qr;
    switch (scenario.kind) {
        case QuenchScenario::Kind::String:
            qr.initial = string_initial_config(params, scenario.d);
            break;
        case QuenchScenario::Kind::FreeCheck:
            qr.initial = string_initial_config(params, scenario.d);
            break;
        case QuenchScenario::Kind::Custom:
            qr.initial = GaugeConfig::from_occupations(scenario.occupations);
            break;
    }
    auto idx = basis.index_of(qr.initial.occ);
    if (!idx || qr.initial.max_abs_field() > params.W)
        throw ValidationError("initial state lies outside the truncated sector");

    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis.size());
    psi(*idx) = 1.0;
    qr.series = evolve_observables(h, basis, psi, spec);

    // Monitored bond: middle of the string for string quenches.
    if (scenario.kind == QuenchScenario::Kind::Custom) {
        qr.mid_bond = params.L;
    } else {
        int start = 0;
        auto occ = qr.initial.occupations();
        for (int j = 0; j < 2 * params.L; j += 2)
            if (occ[j] == 0) start = j;
        qr.mid_bond = start + (scenario.d + 1) / 2;
    }
    qr.conventions =
        "bare-string preparation (projective occupation flips); string-breaking "
        "thresholds are reporting conventions, not model constants";
    return qr;
}

SparseHamiltonianReal rydberg_effective_sector_hamiltonian(const LatticeParams& params,
                                                           const SectorBasis& basis,
                                                           const TailCouplings& tails,
                                                           bool include_tails) {
    params.validate();
    const std::int64_t dim = basis.size();
    const double t_eff = 0.5 / params.a;
    std::vector<Eigen::Triplet<double>> trips;
    for (std::int64_t i = 0; i < dim; ++i) {
        GaugeConfig cfg = basis.config(i);
        double e = diagonal_energy(params, cfg);
        if (include_tails) {
            auto occ = cfg.occupations();
            for (int j = 0; j + 1 < 2 * params.L; ++j) {
                if (occ[j] == occ[j + 1]) e += tails.nn_coefficient;
                if (j + 2 < 2 * params.L && occ[j] == occ[j + 1] && occ[j + 1] == occ[j + 2])
                    e += tails.residual_coefficient;
            }
        }
        trips.emplace_back(i, i, e);
        for_each_hop(params, cfg, [&](OccupationKey target, int, bool) {
            auto j = basis.index_of(target);
            if (!j) return;
            trips.emplace_back(*j, i, -t_eff);
        });
    }
    SparseHamiltonianReal h;
    h.params = params;
    h.gauge = Gauge::RealStaggered;
    h.mat.resize(dim, dim);
    h.mat.setFromTriplets(trips.begin(), trips.end());
    h.mat.makeCompressed();
    return h;
}

namespace {

double max_profile_deviation(const TimeSeries& a, const TimeSeries& b) {
    if (a.times.size() != b.times.size())
        throw ValidationError("time series have different lengths");
    double dev = 0.0;
    for (std::size_t t = 0; t < a.times.size(); ++t)
        for (std::size_t k = 0; k < a.field_profile[t].size(); ++k)
            dev = std::max(dev, std::abs(a.field_profile[t][k] - b.field_profile[t][k]));
    return dev;
}

}  // namespace

EncodedVsDirectReport encoded_vs_direct(const LatticeParams& params, const EvolutionSpec& spec,
                                        const QuenchScenario& scenario, double tail_V) {
    params.validate();
    scenario.validate(params);
    SectorBasis basis = enumerate_basis(params);
    if (basis.size() > 4096) throw ValidationError("sector dimension exceeds 4096");

    GaugeConfig init = (scenario.kind == QuenchScenario::Kind::Custom)
                           ? GaugeConfig::from_occupations(scenario.occupations)
                           : string_initial_config(params, scenario.d);
    auto idx = basis.index_of(init.occ);
    if (!idx) throw ValidationError("initial state lies outside the truncated sector");
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis.size());
    psi(*idx) = 1.0;

    SparseHamiltonian hs = build_hamiltonian(params, basis);
    TimeSeries direct = evolve_observables(hs, basis, psi, spec);

    // Interface assembly with the corner-flip operator and field patterns.
    RibbonGeometry geom = RibbonGeometry::make(params.L, params.W);
    const double aq2 = params.a * params.q * params.q;
    FieldPattern grad{FieldPattern::Kind::GradientHPrime, aq2 / 4.0};
    FieldPattern unif{FieldPattern::Kind::UniformH,
                      -aq2 * params.theta / (4.0 * std::numbers::pi) - geom.rho * grad.amplitude};
    FieldPattern stag{FieldPattern::Kind::StaggeredMu, params.m};
    auto k = projected_transverse(basis, 0.5 / params.a);
    std::vector<Eigen::Triplet<std::complex<double>>> dts;
    for (std::int64_t i = 0; i < basis.size(); ++i) {
        SpinConfig spin = spin_configuration(encode_path(basis.config(i)), geom);
        double e = pattern_energy(spin, unif, geom) + pattern_energy(spin, grad, geom) +
                   pattern_energy(spin, stag, geom);
        dts.emplace_back(i, i, e);
    }
    Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor> dmat(basis.size(), basis.size());
    dmat.setFromTriplets(dts.begin(), dts.end());
    SparseHamiltonian heff;
    heff.params = params;
    heff.mat = k + dmat;
    TimeSeries ising = evolve_observables(heff, basis, psi, spec);

    RydbergParams rp;
    rp.V = tail_V;
    rp.Vprime = 125.0 / 64.0 * tail_V;
    TailCouplings tails = tail_couplings(rp);
    SparseHamiltonianReal h_no_tail =
        rydberg_effective_sector_hamiltonian(params, basis, tails, false);
    SparseHamiltonianReal h_tail =
        rydberg_effective_sector_hamiltonian(params, basis, tails, true);
    TimeSeries ryd0 = evolve_observables(h_no_tail, basis, psi, spec);
    TimeSeries ryd1 = evolve_observables(h_tail, basis, psi, spec);

    EncodedVsDirectReport rep;
    rep.ising_deviation = max_profile_deviation(direct, ising);
    rep.rydberg_no_tail_deviation = max_profile_deviation(direct, ryd0);
    rep.rydberg_tail_deviation = max_profile_deviation(direct, ryd1);
    rep.tail_scale = std::abs(tails.residual_coefficient);
    return rep;
}

}  // namespace schwinger
