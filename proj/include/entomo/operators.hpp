#pragma once

#include "entomo/spin_basis.hpp"

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace entomo {

/// Model constants. Spin operators are S = sigma / 2 throughout.
struct CouplingParams {
    double Jz = 0.5;
    double gamma = 24.0 / 25.0; ///< next-nearest-neighbour strength
    double W = 0.5;             ///< longitudinal disorder half-width
    double W_g = 0.5;           ///< transverse disorder half-width
};

/// On-site fields of one disorder sample. `g` is empty unless a transverse field was drawn.
struct DisorderRealization {
    std::vector<double> h;
    std::vector<double> g;
};

/// h_i ~ U[-W, W] i.i.d.; g_i ~ U[-W_g, W_g] i.i.d. and independent of h when W_g is given.
DisorderRealization sample_disorder(double W, std::optional<double> W_g, int L, Rng &rng);

struct MatrixEntry {
    Eigen::Index row;
    Eigen::Index col;
    Complex value;
};

/// Hermitian matrix stored as its upper triangle (row <= col), sorted, one entry per position.
class SparseHermitianOperator {
  public:
    SparseHermitianOperator(Basis basis, std::vector<MatrixEntry> upper);

    const Basis &basis() const noexcept { return basis_; }
    Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(basis_.dim()); }
    std::span<const MatrixEntry> entries() const noexcept { return entries_; }

    /// Matrix element (row, col) of the full implied matrix.
    Complex element(Eigen::Index row, Eigen::Index col) const;
    Eigen::VectorXd diagonal() const;
    bool is_real() const noexcept { return real_; }
    bool is_diagonal() const noexcept;

    /// H v, expanding the stored triangle symmetrically.
    Eigen::VectorXcd apply(const Eigen::VectorXcd &v) const;
    Eigen::MatrixXcd to_dense() const;
    /// Max absolute row sum; an upper bound on the spectral norm.
    double norm_bound() const;
    /// <v|H|v> for a vector in this operator's basis.
    double expectation(const Eigen::VectorXcd &v) const;

  private:
    Basis basis_;
    std::vector<MatrixEntry> entries_;
    bool real_ = true;
};

/// Disordered XXZ chain with nearest-neighbour exchange, PBC. Conserves total Sz,
/// so `basis` may be the full space or any magnetization sector.
SparseHermitianOperator build_h_nn(int L, const CouplingParams &params, const DisorderRealization &disorder,
                                   const Basis &basis);

/// build_h_nn plus gamma-weighted distance-2 XXZ terms (no extra field). Requires L >= 6.
SparseHermitianOperator build_h_nnn(int L, const CouplingParams &params, const DisorderRealization &disorder,
                                    const Basis &basis);

/// build_h_nn plus sum_i g_i Sx_i. Full basis only.
SparseHermitianOperator build_h_mf(int L, const CouplingParams &params, const DisorderRealization &disorder,
                                   const Basis &basis);

/// Two halves of the driven chain: H0 = sum (Sz Sz + h Sz) (diagonal), H1 = sum (Sx Sx + Sy Sy).
std::pair<SparseHermitianOperator, SparseHermitianOperator>
build_floquet_parts(int L, const DisorderRealization &disorder, const Basis &basis);

/// True when no stored entry couples masks of different Hamming weight.
bool conserves_magnetization(const SparseHermitianOperator &op);

} // namespace entomo
