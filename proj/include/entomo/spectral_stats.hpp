#pragma once

#include "entomo/spin_basis.hpp"

#include <span>
#include <vector>

namespace entomo {

struct Histogram {
    std::vector<double> edges;   ///< bins + 1 edges
    std::vector<double> density; ///< integrates to one over [edges.front(), edges.back()]
};

struct RatioStats {
    std::vector<double> ratios; ///< r_k in [0, 1]
    double mean_r = 0.0;
    Histogram histogram;
    std::size_t dropped = 0; ///< ratios touching a degenerate spacing
};

/// Spacing ratios r_k = min(d_k, d_{k+1}) / max(d_k, d_{k+1}) of a sorted spectrum.
/// Ratios that involve a spacing below 1e-12 are dropped and counted.
RatioStats level_spacing_ratios(std::span<const double> energies);

/// Slice [floor(D/3), floor(2D/3)) of a sorted spectrum of size D.
std::vector<double> middle_third(std::span<const double> energies);

struct ReferenceMeans {
    double goe;
    double coe;
    double poisson;
};

/// <r> for GOE (4 - 2 sqrt 3), COE (0.527) and Poisson (2 ln 2 - 1) statistics.
ReferenceMeans reference_means();

/// 50-bin density histogram on [0, 1].
Histogram ratio_histogram(std::span<const double> ratios, int bins = 50);

/// Pools the ratios of several spectra into one set of statistics.
RatioStats pool_ratios(std::span<const RatioStats> parts);

/// Middle-third ratios of `n_samples` real symmetric Gaussian matrices of size `dim`.
RatioStats goe_surrogate_ratios(int dim, int n_samples, Rng &rng);

/// Surmise densities on r in [0, 1] (folded from r in [0, inf)).
double goe_ratio_density(double r);
double poisson_ratio_density(double r);

} // namespace entomo
