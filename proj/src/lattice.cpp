#include "schwinger/lattice.hpp"

#include <algorithm>
#include <cstdlib>

namespace schwinger {

void LatticeParams::validate() const {
    if (L < 1) throw ValidationError("L must be >= 1");
    if (L > 31) throw ValidationError("L must be <= 31 (occupations are packed in 64 bits)");
    if (W < 0) throw ValidationError("W must be >= 0");
    if (a <= 0) throw ValidationError("a must be > 0");
    if (m < 0) throw ValidationError("m must be >= 0");
    if (q < 0) throw ValidationError("q must be >= 0");
    if (max_states < 1) throw ValidationError("max_states must be >= 1");
}

OccupationKey pack_occupations(const std::vector<int>& occ) {
    OccupationKey key = 0;
    for (std::size_t j = 0; j < occ.size(); ++j) {
        if (occ[j] != 0 && occ[j] != 1) throw ValidationError("occupations must be 0/1");
        if (occ[j]) key |= OccupationKey(1) << j;
    }
    return key;
}

std::vector<int> unpack_occupations(OccupationKey key, int n_sites) {
    std::vector<int> occ(n_sites);
    for (int j = 0; j < n_sites; ++j) occ[j] = int((key >> j) & 1);
    return occ;
}

std::optional<std::vector<int>> gauss_fields(const std::vector<int>& occupations, int L) {
    if (static_cast<int>(occupations.size()) != 2 * L)
        throw ValidationError("occupation string must have length 2L");
    std::vector<int> fields(2 * L - 1);
    int l = 0;
    for (int j = 0; j < 2 * L; ++j) {
        if (occupations[j] != 0 && occupations[j] != 1)
            throw ValidationError("occupations must be 0/1");
        l += site_charge(j, occupations[j]);
        if (j < 2 * L - 1) fields[j] = l;
    }
    if (l != 0) return std::nullopt;  // not half filled: boundary field would not close
    return fields;
}

int GaugeConfig::max_abs_field() const {
    int w = 0;
    for (int l : fields) w = std::max(w, std::abs(l));
    return w;
}

int GaugeConfig::staggered_occupation() const {
    int s = 0;
    auto occ = occupations();
    for (int j = 0; j < 2 * L; ++j) s += (j % 2 == 0 ? occ[j] : -occ[j]);
    return s;
}

int GaugeConfig::field_sum() const {
    int s = 0;
    for (int l : fields) s += l;
    return s;
}

int GaugeConfig::field_square_sum() const {
    int s = 0;
    for (int l : fields) s += l * l;
    return s;
}

bool GaugeConfig::check_invariants(std::string* why) const {
    auto occ = occupations();
    int filled = 0;
    for (int n : occ) filled += n;
    if (filled != L) {
        if (why) *why = "not half filled";
        return false;
    }
    auto f = gauss_fields(occ, L);
    if (!f || *f != fields) {
        if (why) *why = "stored fields do not match charge partial sums";
        return false;
    }
    return true;
}

GaugeConfig GaugeConfig::from_occupations(const std::vector<int>& occ) {
    int L = static_cast<int>(occ.size()) / 2;
    if (static_cast<int>(occ.size()) != 2 * L || L < 1)
        throw ValidationError("occupation string must have even length >= 2");
    auto fields = gauss_fields(occ, L);
    if (!fields) throw ValidationError("occupation string is not half filled");
    GaugeConfig c;
    c.L = L;
    c.occ = pack_occupations(occ);
    c.fields = std::move(*fields);
    return c;
}

GaugeConfig GaugeConfig::from_key(OccupationKey key, int L) {
    return from_occupations(unpack_occupations(key, 2 * L));
}

std::optional<std::int64_t> SectorBasis::index_of(OccupationKey key) const {
    auto it = std::lower_bound(keys.begin(), keys.end(), key);
    if (it == keys.end() || *it != key) return std::nullopt;
    return static_cast<std::int64_t>(it - keys.begin());
}

namespace {

// Depth-first enumeration over sites, pruning on the cutoff and on
// reachability of the neutral endpoint.
void enumerate_rec(int j, int l, OccupationKey partial, const LatticeParams& p,
                   std::vector<OccupationKey>& out) {
    int n_sites = 2 * p.L;
    if (j == n_sites) {
        if (l == 0) out.push_back(partial);
        return;
    }
    // Remaining even sites can lower l by one each, odd sites raise it.
    int evens_left = (n_sites - j + (j % 2 == 0 ? 1 : 0)) / 2;
    int odds_left = (n_sites - j) - evens_left;
    if (l > evens_left || l < -odds_left) return;
    for (int n = 0; n <= 1; ++n) {
        int l_next = l + site_charge(j, n);
        // The final partial sum is the boundary and must be zero; interior
        // sums are the stored bonds and obey the cutoff.
        if (j < n_sites - 1 && std::abs(l_next) > p.W) continue;
        if (j == n_sites - 1 && l_next != 0) continue;
        enumerate_rec(j + 1, l_next, partial | (OccupationKey(n) << j), p, out);
        if (out.size() > static_cast<std::size_t>(p.max_states))
            throw CapacityError("sector size exceeds max_states");
    }
}

}  // namespace

SectorBasis enumerate_basis(const LatticeParams& params) {
    params.validate();
    SectorBasis basis;
    basis.params = params;
    enumerate_rec(0, 0, 0, params, basis.keys);
    std::sort(basis.keys.begin(), basis.keys.end());
    return basis;
}

std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace schwinger
