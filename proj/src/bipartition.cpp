#include "entomo/bipartition.hpp"

#include "entomo/errors.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <set>
#include <string>

namespace entomo {

namespace {
Mask full_mask(int L) { return (Mask{1} << L) - 1; }
} // namespace

int CrossedBondVector::total() const noexcept { return std::accumulate(n.begin(), n.end(), 0); }

CrossedBondVector crossed_bond_vector(Mask mask, int L) {
    check_chain_length(L);
    const int half = L / 2;
    CrossedBondVector v{std::vector<int>(static_cast<std::size_t>(half), 0)};
    for (int j = 1; j <= half; ++j) {
        const int starts = j == half ? half : L;
        int count = 0;
        for (int i = 0; i < starts; ++i) count += ((mask >> i) ^ (mask >> ((i + j) % L))) & 1u;
        v.n[static_cast<std::size_t>(j - 1)] = count;
    }
    return v;
}

Mask rotate_mask(Mask mask, int L, int shift) {
    shift = ((shift % L) + L) % L;
    if (shift == 0) return mask & full_mask(L);
    return ((mask << shift) | (mask >> (L - shift))) & full_mask(L);
}

Mask reflect_mask(Mask mask, int L) {
    Mask out = 0;
    for (int i = 0; i < L; ++i)
        if ((mask >> i) & 1u) out |= Mask{1} << (L - 1 - i);
    return out;
}

Mask complement_mask(Mask mask, int L) { return ~mask & full_mask(L); }

Mask half_chain_mask(int L) { return (Mask{1} << (L / 2)) - 1; }

namespace {

template <class Visit> void for_each_image(Mask mask, int L, Visit &&visit) {
    const bool with_complement = std::popcount(mask) * 2 == L;
    const Mask seeds[2] = {mask, complement_mask(mask, L)};
    for (int s = 0; s < (with_complement ? 2 : 1); ++s) {
        const Mask reflected = reflect_mask(seeds[s], L);
        for (int r = 0; r < L; ++r) {
            visit(rotate_mask(seeds[s], L, r));
            visit(rotate_mask(reflected, L, r));
        }
    }
}

} // namespace

Mask canonicalize(Mask mask, int L) {
    check_chain_length(L);
    Mask best = mask & full_mask(L);
    for_each_image(best, L, [&](Mask m) { best = std::min(best, m); });
    return best;
}

std::vector<Mask> symmetry_orbit(Mask mask, int L) {
    check_chain_length(L);
    std::set<Mask> seen;
    for_each_image(mask & full_mask(L), L, [&](Mask m) { seen.insert(m); });
    return {seen.begin(), seen.end()};
}

std::size_t RepresentativeSet::unique_geometries() const {
    return std::set<CrossedBondVector>(geometry.begin(), geometry.end()).size();
}

RepresentativeSet enumerate_representatives(int L, int n0) {
    check_chain_length(L);
    if (n0 < 1 || n0 > L / 2)
        throw ParameterError("subsystem size must be in [1, L/2], got " + std::to_string(n0));
    RepresentativeSet set;
    set.L = L;
    set.n0 = n0;
    // Gosper's hack walks the weight-n0 masks in ascending order.
    const Mask limit = Mask{1} << L;
    for (Mask m = (Mask{1} << n0) - 1; m < limit;) {
        if (canonicalize(m, L) == m) {
            set.reps.push_back({m, n0});
            set.geometry.push_back(crossed_bond_vector(m, L));
        }
        const Mask low = m & (~m + 1);
        const Mask ripple = m + low;
        m = ripple | (((m ^ ripple) >> 2) / low);
    }
    return set;
}

int geometry_degeneracy(const RepresentativeSet &set) {
    std::map<CrossedBondVector, int> counts;
    int worst = 0;
    for (const auto &g : set.geometry) worst = std::max(worst, ++counts[g]);
    return worst;
}

} // namespace entomo
