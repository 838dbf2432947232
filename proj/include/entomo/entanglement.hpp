#pragma once

#include "entomo/spin_basis.hpp"

#include <optional>
#include <span>
#include <vector>

namespace entomo {

/// Eigenvalues of the reduced density matrix, nonincreasing, summing to one.
struct SchmidtSpectrum {
    std::vector<double> lambdas;
};

/// Squared singular values of the amplitude matrix whose rows are the
/// configurations of the sites in `mask` and whose columns are the rest.
/// Sector states are split into blocks of fixed up-count inside the mask.
SchmidtSpectrum schmidt_spectrum(const StateVector &psi, Mask mask);

/// -sum lambda log2 lambda, ignoring lambda < 1e-12.
double entropy_bits(const SchmidtSpectrum &s);

/// Von Neumann entropy (bits) of the sites in `mask`.
double entanglement_entropy(const StateVector &psi, Mask mask);

/// I_j = S({0}) + S({j}) - S({0, j}) for 1 <= j <= L/2.
double mutual_information(const StateVector &psi, int j);

/// Haar-average entropy (bits) of a dimA x dimB bipartite pure state.
double page_entropy_bits(long dim_a, long dim_b);

struct MeanWithError {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Sample mean and standard error of the mean.
MeanWithError mean_with_error(std::span<const double> xs);

/// Mean entropy of Haar-random states for each mask, with standard errors.
/// With `n_up` set the states are uniform on that magnetization sector, otherwise on the full space.
std::vector<MeanWithError> haar_entropy_mc(int L, std::optional<int> n_up, std::span<const Mask> masks,
                                           int n_samples, Rng &rng);
MeanWithError haar_sector_entropy_mc(int L, std::optional<int> n_up, Mask mask, int n_samples, Rng &rng);

/// Haar-random state (normalized i.i.d. complex Gaussian amplitudes) on a sector or the full space.
StateVector haar_random_state(int L, std::optional<int> n_up, Rng &rng);

} // namespace entomo
