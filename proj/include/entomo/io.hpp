#pragma once

#include "entomo/experiment.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace entomo {

/// Records CSV: time,rep_id,mask,n1..n{L/2},mean_S,stderr (one row per time and representative).
void write_records_csv(std::ostream &out, int L, const std::vector<double> &times, const SliceRecords &slice);
/// Inverse of write_records_csv. Throws ParameterError naming the offending line or column.
SliceRecords read_records_csv(std::istream &in, int L, int n0, std::vector<double> &times);

/// Writes every artifact of a run into `dir` and returns the paths written:
///   <protocol>_n0_<n0>.csv, <protocol>_mutual_information.csv, <protocol>_hcee.csv,
///   <protocol>_manifest.json.
std::vector<std::filesystem::path> write_run(const RunResult &run, const std::filesystem::path &dir);

/// Reads a run back from its manifest and records files (entropy data and config only).
RunResult read_run(const std::filesystem::path &manifest_path);

/// <protocol>_fits.json: [{L, n0, protocol, time, S0, omega[], r2, rank_flag, hierarchy}, ...].
std::filesystem::path write_fits(const std::vector<SliceFit> &fits, Protocol protocol, const std::filesystem::path &dir);

/// <protocol>_spectral.csv (seed,mean_r) and <protocol>_spectral.json (aggregate and histogram).
std::vector<std::filesystem::path> write_spectral(const SpectralResult &res, const std::filesystem::path &dir);

struct HaarReferenceRow {
    int n0 = 0;
    Mask mask = 0;
    CrossedBondVector geometry;
    MeanWithError sector;   ///< half-filling sector states
    double page_bits = 0.0; ///< full-space Page value for the same n0
};

/// haar_reference.csv: n0,rep_id,mask,n1..n{L/2},mean_S,stderr,page_S
std::filesystem::path write_haar_reference(int L, const std::vector<HaarReferenceRow> &rows,
                                           const std::filesystem::path &dir);

/// Bipartition counts table: n0,N,M.
void write_counts_csv(std::ostream &out, int L);
/// Representatives of one slice: rep_id,mask,sites,n1..n{L/2}.
void write_representatives_csv(std::ostream &out, const RepresentativeSet &set);

} // namespace entomo
