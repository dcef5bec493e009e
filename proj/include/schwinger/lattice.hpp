#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "schwinger/common.hpp"

namespace schwinger {

// Staggered lattice with 2L sites (j = 0..2L-1) and 2L-1 interior bonds.
// Bond k (k = 1..2L-1) sits between sites k-1 and k and carries the integer
// electric field l_k. Units: a = 1 internally; callers pass dimensionless
// couplings a*m, a*q through m and q with a = 1.
struct LatticeParams {
    int L = 1;
    int W = 0;               // electric-field cutoff, |l| <= W
    double a = 1.0;
    double m = 0.0;
    double q = 0.0;
    double theta = 0.0;
    std::int64_t max_states = std::int64_t(1) << 26;

    int n_sites() const { return 2 * L; }
    int n_bonds() const { return 2 * L - 1; }
    double am() const { return a * m; }
    double aq() const { return a * q; }
    void validate() const;
};

// Occupations packed as bits, bit j = n_j. Basis order is ascending key.
using OccupationKey = std::uint64_t;

OccupationKey pack_occupations(const std::vector<int>& occ);
std::vector<int> unpack_occupations(OccupationKey key, int n_sites);

// Site charge Q_j = n_j - 1 on even sites, Q_j = n_j on odd sites.
inline int site_charge(int j, int n) { return (j % 2 == 0) ? n - 1 : n; }

// Fields from the charge constraint l_{k} = sum_{j<k} Q_j with l_0 = 0.
// Returns nullopt when the string is not half filled (last partial sum != 0).
std::optional<std::vector<int>> gauss_fields(const std::vector<int>& occupations, int L);

// One gauge-invariant, charge-neutral configuration.
struct GaugeConfig {
    int L = 0;
    OccupationKey occ = 0;
    std::vector<int> fields;  // size 2L-1

    std::vector<int> occupations() const { return unpack_occupations(occ, 2 * L); }
    int max_abs_field() const;
    int staggered_occupation() const;      // sum_j (-1)^j n_j
    int field_sum() const;                 // sum_k l_k
    int field_square_sum() const;          // sum_k l_k^2
    bool check_invariants(std::string* why = nullptr) const;

    static GaugeConfig from_occupations(const std::vector<int>& occ);
    static GaugeConfig from_key(OccupationKey key, int L);
};

// Truncated charge-neutral sector, keys sorted ascending.
struct SectorBasis {
    LatticeParams params;
    std::vector<OccupationKey> keys;

    std::int64_t size() const { return static_cast<std::int64_t>(keys.size()); }
    std::optional<std::int64_t> index_of(OccupationKey key) const;
    GaugeConfig config(std::int64_t i) const { return GaugeConfig::from_key(keys[i], params.L); }
};

SectorBasis enumerate_basis(const LatticeParams& params);

// C(2L, L), used as the unclipped sector count.
std::int64_t binomial(int n, int k);

}  // namespace schwinger
