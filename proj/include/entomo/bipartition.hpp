#pragma once

#include "entomo/spin_basis.hpp"

#include <compare>
#include <vector>

namespace entomo {

/// Numbers of crossed bonds (n_1, ..., n_{L/2}) of a bipartition on a ring.
/// Each antipodal pair (distance L/2) is counted once.
struct CrossedBondVector {
    std::vector<int> n;

    int order() const noexcept { return static_cast<int>(n.size()); }
    int operator[](int j) const { return n[static_cast<std::size_t>(j - 1)]; } ///< 1-based bond order
    int total() const noexcept;

    friend auto operator<=>(const CrossedBondVector &, const CrossedBondVector &) = default;
};

CrossedBondVector crossed_bond_vector(Mask mask, int L);

Mask rotate_mask(Mask mask, int L, int shift);
Mask reflect_mask(Mask mask, int L);
Mask complement_mask(Mask mask, int L);
/// Contiguous block of the first L/2 sites.
Mask half_chain_mask(int L);

/// Smallest mask over rotations and reflections; at popcount L/2 the complement's orbit is included.
Mask canonicalize(Mask mask, int L);
/// All distinct masks equivalent to `mask` under the same group.
std::vector<Mask> symmetry_orbit(Mask mask, int L);

struct Bipartition {
    Mask mask;
    int n0;
};

/// One canonical representative per symmetry orbit of size-n0 subsystems, ascending by mask.
struct RepresentativeSet {
    int L = 0;
    int n0 = 0;
    std::vector<Bipartition> reps;
    std::vector<CrossedBondVector> geometry; ///< parallel to reps

    std::size_t size() const noexcept { return reps.size(); }
    /// Number of distinct crossed-bond vectors among the representatives.
    std::size_t unique_geometries() const;
};

RepresentativeSet enumerate_representatives(int L, int n0);

/// Largest number of representatives sharing one crossed-bond vector.
int geometry_degeneracy(const RepresentativeSet &set);

} // namespace entomo
