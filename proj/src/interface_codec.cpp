#include "schwinger/interface_codec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

#include "schwinger/solvers.hpp"

namespace schwinger {

InterfacePath InterfacePath::from_moves(const std::vector<std::uint8_t>& moves) {
    if (moves.empty() || moves.size() % 2 != 0)
        throw ValidationError("move sequence must have even positive length");
    InterfacePath p;
    p.L = static_cast<int>(moves.size()) / 2;
    p.moves = moves;
    p.heights.resize(moves.size() + 1);
    p.heights[0] = 0;
    for (std::size_t j = 0; j < moves.size(); ++j) {
        if (moves[j] > 1) throw ValidationError("moves must be 0 (SE) or 1 (NE)");
        p.heights[j + 1] = p.heights[j] + (moves[j] ? 1 : -1);
    }
    if (p.heights.back() != 0)
        throw ValidationError("path does not return to height zero (not half filled)");
    return p;
}

InterfacePath encode_path(const GaugeConfig& config) {
    auto occ = config.occupations();
    std::vector<std::uint8_t> moves(occ.begin(), occ.end());
    return InterfacePath::from_moves(moves);
}

std::optional<PathRejection> path_outside_ribbon(const InterfacePath& path, int W) {
    // Interior vertex j encodes bond j: l = (y_j - (j mod 2)) / 2.
    for (int j = 1; j <= 2 * path.L - 1; ++j) {
        int l = (path.heights[j] - (j % 2)) / 2;
        if (std::abs(l) > W) return PathRejection{j};
    }
    return std::nullopt;
}

GaugeConfig decode_path(const InterfacePath& path, int W) {
    if (auto rej = path_outside_ribbon(path, W))
        throw ValidationError("path leaves the ribbon at bond " + std::to_string(rej->bond));
    std::vector<int> occ(path.moves.begin(), path.moves.end());
    GaugeConfig cfg = GaugeConfig::from_occupations(occ);
    // Heights and fields are affinely related; double-check the round trip.
    for (int j = 1; j <= 2 * path.L - 1; ++j) {
        if (path.heights[j] != 2 * cfg.fields[j - 1] + (j % 2))
            throw ValidationError("inconsistent path heights");
    }
    return cfg;
}

int RibbonGeometry::wall_lo(int x) const {
    int reach = std::min(x, 2 * L - x);
    return std::max((x % 2 == 0) ? -2 * W : -(2 * W - 1), -reach);
}

int RibbonGeometry::wall_hi(int x) const {
    int reach = std::min(x, 2 * L - x);
    return std::min((x % 2 == 0) ? 2 * W : 2 * W + 1, reach);
}

RibbonGeometry RibbonGeometry::make(int L, int W) {
    if (L < 1 || W < 0) throw ValidationError("ribbon requires L >= 1, W >= 0");
    RibbonGeometry g;
    g.L = L;
    g.W = W;
    g.b0 = (L % 2 == 0) ? L + 1 : L + 2;
    g.rho = g.b0 - L - 1;
    g.col_begin.assign(2 * L + 2, 0);
    for (int x = 0; x <= 2 * L; ++x) {
        g.col_begin[x] = static_cast<int>(g.cells.size());
        int lo = g.zeta_lo(x);
        for (int zeta = lo; zeta <= -lo; zeta += 2) {
            Cell c;
            c.x = x;
            c.zeta = zeta;
            int z = zeta + g.b0;
            c.rx = (z + x) / 2;
            c.ry = (z - x) / 2;
            // Free only where some admissible wall passes on either side.
            c.boundary = !(zeta > g.wall_lo(x) && zeta < g.wall_hi(x));
            g.cells.push_back(c);
        }
    }
    g.col_begin[2 * L + 1] = static_cast<int>(g.cells.size());
    return g;
}

int RibbonGeometry::cell_index(int x, int zeta) const {
    if (x < 0 || x > 2 * L) return -1;
    int lo = zeta_lo(x);
    if (zeta < lo || zeta > -lo || (zeta - lo) % 2 != 0) return -1;
    return col_begin[x] + (zeta - lo) / 2;
}

std::int64_t RibbonGeometry::active_site_count() const {
    return std::count_if(cells.begin(), cells.end(),
                         [](const Cell& c) { return !c.boundary; });
}

SpinConfig spin_configuration(const InterfacePath& path, const RibbonGeometry& geom) {
    if (path.L != geom.L) throw ValidationError("path and geometry have different L");
    if (path_outside_ribbon(path, geom.W))
        throw ValidationError("geometry too small for this path");
    SpinConfig s;
    s.L = geom.L;
    s.W = geom.W;
    s.sigma.resize(geom.cells.size());
    for (std::size_t i = 0; i < geom.cells.size(); ++i) {
        const auto& c = geom.cells[i];
        s.sigma[i] = (c.zeta > path.heights[c.x]) ? 1 : -1;
    }
    return s;
}

int ising_cut_bonds(const SpinConfig& spin, const RibbonGeometry& geom) {
    if (spin.sigma.size() != geom.cells.size())
        throw ValidationError("spin configuration does not match geometry");
    int cut = 0;
    for (std::size_t i = 0; i < geom.cells.size(); ++i) {
        const auto& c = geom.cells[i];
        for (int dz : {-1, 1}) {
            int j = geom.cell_index(c.x + 1, c.zeta + dz);
            if (j >= 0 && spin.sigma[i] != spin.sigma[j]) ++cut;
        }
    }
    return cut;
}

std::int64_t ising_bond_count(const RibbonGeometry& geom) {
    std::int64_t n = 0;
    for (const auto& c : geom.cells)
        for (int dz : {-1, 1})
            if (geom.cell_index(c.x + 1, c.zeta + dz) >= 0) ++n;
    return n;
}

std::vector<int> recover_heights(const SpinConfig& spin, const RibbonGeometry& geom) {
    std::vector<int> y(geom.n_cols());
    for (int x = 0; x <= 2 * geom.L; ++x) {
        int below = std::numeric_limits<int>::min();
        int above = std::numeric_limits<int>::max();
        for (int i = geom.col_begin[x]; i < geom.col_begin[x + 1]; ++i) {
            if (spin.sigma[i] < 0)
                below = std::max(below, geom.cells[i].zeta);
            else
                above = std::min(above, geom.cells[i].zeta);
        }
        if (below > above) throw ValidationError("spin column is not a single domain wall");
        y[x] = (below + above) / 2;
    }
    return y;
}

int FieldPattern::coeff(Kind kind, int rx, int ry, int L) {
    int s = rx + ry;
    switch (kind) {
        case Kind::UniformH:
            return 1;
        case Kind::GradientHPrime:
            return s - L - 2 + ((s % 2 == 0) ? 1 : 0);
        case Kind::StaggeredMu:
            return (s % 2 == 0) ? 1 : -1;
    }
    return 0;
}

std::int64_t pattern_cell_sum(const SpinConfig& spin, FieldPattern::Kind kind,
                              const RibbonGeometry& geom) {
    if (spin.sigma.size() != geom.cells.size())
        throw ValidationError("spin configuration does not match geometry");
    std::int64_t s = 0;
    for (std::size_t i = 0; i < geom.cells.size(); ++i) {
        const auto& c = geom.cells[i];
        s += static_cast<std::int64_t>(FieldPattern::coeff(kind, c.rx, c.ry, geom.L)) *
             spin.sigma[i];
    }
    return s;
}

namespace {

InterfacePath vacuum_path(int L) {
    std::vector<std::uint8_t> moves(2 * L);
    for (int j = 0; j < 2 * L; ++j) moves[j] = (j % 2 == 0) ? 1 : 0;
    return InterfacePath::from_moves(moves);
}

}  // namespace

double pattern_energy(const SpinConfig& spin, const FieldPattern& pattern,
                      const RibbonGeometry& geom) {
    if (spin.L != geom.L || spin.W != geom.W)
        throw ValidationError("pattern/geometry mismatch");
    SpinConfig vac = spin_configuration(vacuum_path(geom.L), geom);
    std::int64_t s = pattern_cell_sum(spin, pattern.kind, geom);
    std::int64_t s0 = pattern_cell_sum(vac, pattern.kind, geom);
    return -pattern.amplitude * static_cast<double>(s - s0);
}

Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor> projected_transverse(
    const SectorBasis& basis, double g) {
    const std::int64_t dim = basis.size();
    std::vector<Eigen::Triplet<std::complex<double>>> trips;
    const std::complex<double> up(0.0, -g);  // <peak| Op |valley>
    for (std::int64_t i = 0; i < dim; ++i) {
        GaugeConfig cfg = basis.config(i);
        for_each_hop(basis.params, cfg, [&](OccupationKey target, int /*bond*/, bool raised) {
            auto j = basis.index_of(target);
            if (!j) return;
            trips.emplace_back(*j, i, raised ? up : std::conj(up));
        });
    }
    Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor> mat(dim, dim);
    mat.setFromTriplets(trips.begin(), trips.end());
    mat.makeCompressed();
    return mat;
}

EquivalenceReport verify_equivalence(const LatticeParams& params, double /*tolerance*/) {
    params.validate();
    if (params.L > 6) throw ValidationError("verify_equivalence requires L <= 6");
    SectorBasis basis = enumerate_basis(params);
    const std::int64_t dim = basis.size();
    if (dim > 4096) throw ValidationError("sector dimension exceeds 4096");

    SparseHamiltonian hs = build_hamiltonian(params, basis);
    auto k = projected_transverse(basis, 0.5 / params.a);

    RibbonGeometry geom = RibbonGeometry::make(params.L, params.W);
    const double aq2 = params.a * params.q * params.q;
    FieldPattern grad{FieldPattern::Kind::GradientHPrime, aq2 / 4.0};
    FieldPattern unif{FieldPattern::Kind::UniformH,
                      -aq2 * params.theta / (4.0 * std::numbers::pi) - geom.rho * grad.amplitude};
    FieldPattern stag{FieldPattern::Kind::StaggeredMu, params.m};

    Eigen::VectorXd diag_eff(dim), diag_s(dim);
    for (std::int64_t i = 0; i < dim; ++i) {
        GaugeConfig cfg = basis.config(i);
        SpinConfig spin = spin_configuration(encode_path(cfg), geom);
        diag_eff(i) = pattern_energy(spin, unif, geom) + pattern_energy(spin, grad, geom) +
                      pattern_energy(spin, stag, geom);
        diag_s(i) = diagonal_energy(params, cfg);
    }

    EquivalenceReport rep;
    rep.dimension = dim;
    rep.constant_offset = (diag_s - diag_eff).mean();

    for (std::int64_t i = 0; i < dim; ++i) {
        double d = std::abs(diag_s(i) - diag_eff(i) - rep.constant_offset);
        if (d > rep.max_abs_deviation) {
            rep.max_abs_deviation = d;
            rep.worst_row = rep.worst_col = i;
        }
    }
    Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor> off_diff = hs.mat - k;
    for (std::int64_t r = 0; r < off_diff.rows(); ++r) {
        for (decltype(off_diff)::InnerIterator it(off_diff, r); it; ++it) {
            if (it.row() == it.col()) continue;  // diagonal handled above
            double d = std::abs(it.value());
            if (d > rep.max_abs_deviation) {
                rep.max_abs_deviation = d;
                rep.worst_row = it.row();
                rep.worst_col = it.col();
            }
        }
    }
    if (rep.worst_row >= 0) {
        rep.worst_row_key = basis.keys[rep.worst_row];
        rep.worst_col_key = basis.keys[rep.worst_col];
    }

    if (dim <= 1024) {
        Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor> heff = k;
        std::vector<Eigen::Triplet<std::complex<double>>> dts;
        for (std::int64_t i = 0; i < dim; ++i) dts.emplace_back(i, i, diag_eff(i));
        Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor> dmat(dim, dim);
        dmat.setFromTriplets(dts.begin(), dts.end());
        heff = heff + dmat;
        Eigen::VectorXd es = dense_spectrum(hs.mat);
        Eigen::VectorXd ee = dense_spectrum(heff);
        rep.spectral_deviation =
            (es - ee.array().matrix() - Eigen::VectorXd::Constant(dim, rep.constant_offset))
                .cwiseAbs()
                .maxCoeff();
        rep.spectra_compared = true;
    }
    return rep;
}

GroundManifold ising_ground_manifold(const RibbonGeometry& geom) {
    const int ncols = geom.n_cols();
    // Per-column admissible patterns (boundary cells pinned to sign(zeta)).
    std::vector<std::vector<std::uint32_t>> patterns(ncols);
    std::vector<int> ncells(ncols);
    for (int x = 0; x < ncols; ++x) {
        int n = geom.cells_in_col(x);
        ncells[x] = n;
        std::uint32_t fixed_mask = 0, fixed_bits = 0;
        std::vector<int> free_pos;
        for (int i = 0; i < n; ++i) {
            const auto& c = geom.cells[geom.col_begin[x] + i];
            if (c.boundary) {
                fixed_mask |= 1u << i;
                if (c.zeta > geom.wall_hi(x)) fixed_bits |= 1u << i;
            } else {
                free_pos.push_back(i);
            }
        }
        for (std::uint32_t f = 0; f < (1u << free_pos.size()); ++f) {
            std::uint32_t p = fixed_bits;
            for (std::size_t b = 0; b < free_pos.size(); ++b)
                if ((f >> b) & 1) p |= 1u << free_pos[b];
            patterns[x].push_back(p);
        }
    }

    auto cut_between = [&](int x, std::uint32_t p, std::uint32_t q) {
        int cut = 0;
        for (int i = 0; i < ncells[x]; ++i) {
            int zeta = geom.cells[geom.col_begin[x] + i].zeta;
            for (int dz : {-1, 1}) {
                int j = geom.cell_index(x + 1, zeta + dz);
                if (j < 0) continue;
                int jp = j - geom.col_begin[x + 1];
                if (((p >> i) & 1) != ((q >> jp) & 1)) ++cut;
            }
        }
        return cut;
    };

    std::vector<std::int64_t> cost(patterns[0].size(), 0), cnt(patterns[0].size(), 1);
    for (int x = 0; x + 1 < ncols; ++x) {
        std::vector<std::int64_t> ncost(patterns[x + 1].size(),
                                        std::numeric_limits<std::int64_t>::max());
        std::vector<std::int64_t> ncnt(patterns[x + 1].size(), 0);
        for (std::size_t b = 0; b < patterns[x + 1].size(); ++b) {
            for (std::size_t a = 0; a < patterns[x].size(); ++a) {
                if (cnt[a] == 0) continue;
                std::int64_t c = cost[a] + cut_between(x, patterns[x][a], patterns[x + 1][b]);
                if (c < ncost[b]) {
                    ncost[b] = c;
                    ncnt[b] = cnt[a];
                } else if (c == ncost[b]) {
                    ncnt[b] += cnt[a];
                }
            }
        }
        cost = std::move(ncost);
        cnt = std::move(ncnt);
    }
    GroundManifold gm;
    gm.cut_bonds_min = *std::min_element(cost.begin(), cost.end());
    gm.count = 0;
    for (std::size_t a = 0; a < cost.size(); ++a)
        if (cost[a] == gm.cut_bonds_min) gm.count += cnt[a];
    return gm;
}

}  // namespace schwinger
