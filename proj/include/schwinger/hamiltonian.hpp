#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "schwinger/lattice.hpp"

namespace schwinger {

// Basis-ordering convention: states are labelled by the occupation key
// (bit j = n_j) and sorted ascending. Creation operators are ordered by
// ascending site index, so nearest-neighbor hops carry no fermionic string
// sign. A hop moving a fermion from site j to j-1 raises the intervening
// bond field by one; the matrix element is -i/(2a), its reverse +i/(2a).
// Hops that would push |l| beyond W are absent (projected Hamiltonian).
enum class Gauge {
    Complex,        // matrix elements as above
    RealStaggered,  // after c_j -> exp(i (-1)^j pi/4) c_j: hop on bond k is (-1)^(k-1)/(2a), real
};

template <class Scalar>
struct HamiltonianMatrix {
    Eigen::SparseMatrix<Scalar, Eigen::RowMajor> mat;
    LatticeParams params;
    Gauge gauge = Gauge::Complex;

    std::int64_t dim() const { return mat.rows(); }
};

using SparseHamiltonian = HamiltonianMatrix<std::complex<double>>;
using SparseHamiltonianReal = HamiltonianMatrix<double>;

// Visit every allowed hop out of a configuration. cb(target_key, bond_k,
// raised) is called once per move that stays inside the cutoff; raised is
// true when the bond field goes up (fermion moved left across bond k).
template <class Callback>
inline void for_each_hop(const LatticeParams& p, const GaugeConfig& cfg, Callback&& cb) {
    int n_sites = 2 * p.L;
    for (int k = 1; k <= n_sites - 1; ++k) {
        int nl = int((cfg.occ >> (k - 1)) & 1);
        int nr = int((cfg.occ >> k) & 1);
        if (nl == nr) continue;
        OccupationKey flipped = cfg.occ ^ (OccupationKey(3) << (k - 1));
        if (nl == 0) {
            if (std::abs(cfg.fields[k - 1] + 1) <= p.W) cb(flipped, k, true);
        } else {
            if (std::abs(cfg.fields[k - 1] - 1) <= p.W) cb(flipped, k, false);
        }
    }
}

SparseHamiltonian build_hamiltonian(const LatticeParams& params, const SectorBasis& basis);
SparseHamiltonianReal build_hamiltonian_real(const LatticeParams& params, const SectorBasis& basis);

// Diagonal part only: -m sum (-1)^j n_j + (a q^2/2) sum (l - theta/2pi)^2.
double diagonal_energy(const LatticeParams& params, const GaugeConfig& config);

struct ObservableRecord {
    std::vector<double> field_profile;   // <L_k>, k = 1..2L-1
    std::vector<double> charge_density;  // <Q_j>, j = 0..2L-1
    std::vector<double> occupation;      // <n_j>
    double field_squared_total = 0.0;    // sum_k <L_k^2>
};

enum class Observable { FieldProfile, ChargeDensity, FieldSquaredTotal, Occupation, All };

ObservableRecord measure(const Eigen::VectorXcd& state, const SectorBasis& basis,
                         Observable which = Observable::All);
ObservableRecord measure(const Eigen::VectorXd& state, const SectorBasis& basis,
                         Observable which = Observable::All);

}  // namespace schwinger
