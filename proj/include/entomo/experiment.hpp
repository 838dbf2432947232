#pragma once

#include "entomo/bipartition.hpp"
#include "entomo/config.hpp"
#include "entomo/entanglement.hpp"
#include "entomo/spectral_stats.hpp"
#include "entomo/tomography.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace entomo {

/// Ensemble-averaged entropy of one representative bipartition, one entry per time point.
struct ResultRecord {
    Mask mask = 0;
    CrossedBondVector geometry;
    std::vector<MeanWithError> entropy;
};

/// All representatives of one subsystem size.
struct SliceRecords {
    int n0 = 0;
    std::vector<ResultRecord> records;
};

/// Worst-case conservation violations seen over every sample and time point.
struct ConservationAudit {
    double max_norm_drift = 0.0;
    double max_energy_drift = 0.0;      ///< |<H>_t - <H>_0|, absolute
    double max_relative_energy_drift = 0.0; ///< divided by the spectral norm of H
    double max_out_of_sector_weight = 0.0;
    bool energy_checked = false;
    bool sector_checked = false;
};

struct RunResult {
    ExperimentConfig config;
    std::vector<double> times;
    std::vector<SliceRecords> slices;
    std::vector<std::vector<MeanWithError>> mutual_information; ///< [time][j - 1], j = 1..L/2
    std::vector<MeanWithError> half_chain;                      ///< per time
    ConservationAudit audit;
    std::vector<std::uint64_t> sample_seeds;
    std::string started_at;
    double wall_seconds = 0.0;
};

/// Runs every sample of the configured protocol and averages entropies of all
/// representative bipartitions, mutual informations and the half-chain entropy.
/// Output depends only on the configuration (including the master seed), not on
/// the thread count.
RunResult run_protocol(const ExperimentConfig &cfg);

struct SliceFit {
    int L = 0;
    int n0 = 0;
    double time = 0.0;
    FitResult fit;
    double hierarchy = 0.0; ///< omega_1 / max_{j>1} omega_j
};

/// One bond-additive fit per (time, n0) slice.
std::vector<SliceFit> run_tomography(int L, const std::vector<double> &times, const std::vector<SliceRecords> &slices);
std::vector<SliceFit> run_tomography(const RunResult &run);

struct RealizationStats {
    std::uint64_t seed = 0;
    double mean_r = 0.0;
    std::size_t n_ratios = 0;
};

struct SpectralResult {
    ExperimentConfig config;
    std::vector<RealizationStats> realizations;
    RatioStats aggregate;
};

/// Level statistics for `n_samples` disorder realizations: middle third of the
/// half-filling spectrum for U(1) Hamiltonians, the full-space spectrum for the
/// mixed-field model, all quasienergies for the Floquet drive.
SpectralResult run_spectral_diagnostics(const ExperimentConfig &cfg);

/// Semantic version baked in at build time.
std::string code_version();

} // namespace entomo
