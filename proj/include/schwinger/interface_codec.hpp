#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "schwinger/hamiltonian.hpp"
#include "schwinger/lattice.hpp"

namespace schwinger {

// Domain-wall path of 2L moves. Move j is NE (up) when n_j = 1 and SE
// (down) when n_j = 0. Integer heights: y_0 = 0, y_{j+1} = y_j +- 1, so
// y_j = 2 l_{j-1/2} + (j mod 2) at interior vertices and y_{2L} = 0.
struct InterfacePath {
    int L = 0;
    std::vector<std::uint8_t> moves;  // 1 = NE, 0 = SE, size 2L
    std::vector<int> heights;         // size 2L+1

    static InterfacePath from_moves(const std::vector<std::uint8_t>& moves);
};

InterfacePath encode_path(const GaugeConfig& config);

// Inverse map; rejects paths whose field profile leaves |l| <= W, reporting
// the first offending bond (1-based).
struct PathRejection {
    int bond = 0;
};
GaugeConfig decode_path(const InterfacePath& path, int W);
std::optional<PathRejection> path_outside_ribbon(const InterfacePath& path, int W);

// Ribbon of Ising cells around the interface, in the rotated frame.
// Columns x = 0..2L carry one path vertex each; cells in column x sit at
// heights zeta of opposite parity to the vertex heights, |zeta| <= 2W+2.
// Lattice coordinates: z = zeta + b0, r_x = (z+x)/2, r_y = (z-x)/2, with
// b0 the z-position of the path endpoints (odd by construction; b0 = L+1
// for even L, else L+2). For odd L the vertical gradient pattern picks up
// an extra uniform-field piece 2*rho*amp*sum(l) with rho = b0-L-1; the
// dictionary assembly compensates it exactly.
struct RibbonGeometry {
    int L = 0;
    int W = 0;
    int b0 = 0;
    int rho = 0;

    struct Cell {
        int x;
        int zeta;
        int rx;
        int ry;
        bool boundary;  // spin fixed for every admissible path
    };
    std::vector<Cell> cells;
    std::vector<int> col_begin;  // size 2L+2, cells stored by column, ascending zeta

    static RibbonGeometry make(int L, int W);

    int n_cols() const { return 2 * L + 1; }
    int zeta_lo(int x) const { return (x % 2 == 0) ? -(2 * W + 1) : -(2 * W + 2); }
    int cells_in_col(int x) const { return col_begin[x + 1] - col_begin[x]; }
    int cell_index(int x, int zeta) const;  // -1 when absent
    // Achievable wall-height range at column x: the cutoff window (even
    // vertices |l| <= W, odd vertices l in [-W, W] at height 2l+1) further
    // clamped by the pinned endpoints.
    int wall_lo(int x) const;
    int wall_hi(int x) const;
    std::int64_t site_count() const { return static_cast<std::int64_t>(cells.size()); }
    std::int64_t active_site_count() const;
};

// +1 above the interface, -1 below.
struct SpinConfig {
    int L = 0;
    int W = 0;
    std::vector<std::int8_t> sigma;  // one entry per geometry cell
};

SpinConfig spin_configuration(const InterfacePath& path, const RibbonGeometry& geom);

// Nearest-neighbor bonds of the original square lattice are diagonal cell
// adjacencies here. Returns the number of unsatisfied bonds; the Ising
// energy is -J * (n_bonds - 2 * cut).
int ising_cut_bonds(const SpinConfig& spin, const RibbonGeometry& geom);
std::int64_t ising_bond_count(const RibbonGeometry& geom);

// Reconstructs the interface heights column by column.
std::vector<int> recover_heights(const SpinConfig& spin, const RibbonGeometry& geom);

struct FieldPattern {
    enum class Kind { UniformH, GradientHPrime, StaggeredMu };
    Kind kind = Kind::UniformH;
    double amplitude = 0.0;

    // Per-cell integer coefficient.
    static int coeff(Kind kind, int rx, int ry, int L);
};

// Integer sum of coeff * sigma over all cells.
std::int64_t pattern_cell_sum(const SpinConfig& spin, FieldPattern::Kind kind,
                              const RibbonGeometry& geom);

// E(config) - E(vacuum) for the field term -amplitude * sum coeff * sigma.
double pattern_energy(const SpinConfig& spin, const FieldPattern& pattern,
                      const RibbonGeometry& geom);

// Corner-flip operator -i g sum_j (|peak><valley| - |valley><peak|) acting
// at interior vertices; with g = 1/(2a) it equals the kinetic part of the
// sector Hamiltonian in the same basis (this fixes the sign convention the
// transverse-field form leaves open).
Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor> projected_transverse(
    const SectorBasis& basis, double g);

struct EquivalenceReport {
    double max_abs_deviation = 0.0;
    double constant_offset = 0.0;
    double spectral_deviation = 0.0;
    std::int64_t worst_row = -1;
    std::int64_t worst_col = -1;
    OccupationKey worst_row_key = 0;
    OccupationKey worst_col_key = 0;
    std::int64_t dimension = 0;
    bool spectra_compared = false;
};

// Assembles the interface Hamiltonian (corner flips at g = 1/(2a) plus the
// three field patterns with amplitudes h = -a q^2 theta/(4 pi) - rho h',
// h' = a q^2 / 4, mu = m) and compares it entrywise against the sector
// Hamiltonian after removing one fitted constant.
EquivalenceReport verify_equivalence(const LatticeParams& params, double tolerance = 1e-12);

// Minimum Ising energy and minimizer count over all boundary-compatible
// spin assignments of the ribbon (exact column DP; free cells are the
// non-boundary ones). Used to check that the ground manifold is exactly
// the set of interface configurations.
struct GroundManifold {
    std::int64_t cut_bonds_min = 0;
    std::int64_t count = 0;
};
GroundManifold ising_ground_manifold(const RibbonGeometry& geom);

}  // namespace schwinger
