#pragma once

#include "entomo/operators.hpp"
#include "entomo/spin_basis.hpp"

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

namespace entomo {

/// Dense diagonalization refuses bases larger than this unless told otherwise.
inline constexpr long kDefaultDiagonalizationCap = 16384;

struct SpectralDecomposition {
    Basis basis;
    Eigen::VectorXd eigenvalues;   ///< ascending
    Eigen::MatrixXcd eigenvectors; ///< orthonormal columns

    double spectral_norm() const {
        return eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
    }
};

SpectralDecomposition diagonalize(const SparseHermitianOperator &H, long cap = kDefaultDiagonalizationCap);
/// Ascending eigenvalues without eigenvectors (cheaper; used for level statistics).
Eigen::VectorXd eigenvalues(const SparseHermitianOperator &H, long cap = kDefaultDiagonalizationCap);

/// e^{-iHt} psi0 through the eigenbasis. Phases E t are reduced modulo 2 pi in
/// long double, so very long times (t ~ 1e12) keep a bounded phase error.
StateVector evolve_spectral(const SpectralDecomposition &d, const StateVector &psi0, double t);
std::vector<StateVector> evolve_spectral(const SpectralDecomposition &d, const StateVector &psi0,
                                         std::span<const double> times);

/// e^{-iHt} psi0 by adaptive Lanczos steps. The result is accepted once a rerun
/// with halved step sizes agrees within `tol`; otherwise ConvergenceError.
StateVector evolve_krylov(const SparseHermitianOperator &H, const StateVector &psi0, double t, double tol = 1e-10);

/// 4x4 unitary on an ordered site pair (a, b) in the local basis
/// {up-up, up-down, down-up, down-down} (first letter = site a).
struct TwoQubitGate {
    Eigen::Matrix4cd u;
};

/// exp(-i pi (SxSx + SySy) / 2) exp(-i pi SzSz), in closed form.
TwoQubitGate build_two_qubit_gate();

/// Applies `gate` in place to sites (a, b). Sector vectors require a gate that is
/// block diagonal in the two-site magnetization.
void apply_two_qubit_gate(StateVector &psi, const TwoQubitGate &gate, int site_a, int site_b);

/// One circuit step: a uniformly chosen pair (i, i+1 mod L) receives `gate`. Returns i.
int rqc_step(StateVector &psi, const TwoQubitGate &gate, Rng &rng);
StateVector rqc_step(const StateVector &psi, Rng &rng);

/// Period map F = exp(-i T0 H0) exp(-i T1 H1) with diagonal H0. The H1 propagator
/// is disorder free and shared between samples.
struct FloquetMap {
    double T0 = 1.0;
    double T1 = 2.5;
    Basis basis;
    Eigen::VectorXd h0_diagonal;
    std::shared_ptr<const Eigen::MatrixXcd> h1_propagator; ///< exp(-i T1 H1)
};

/// exp(-i t H) as a dense matrix from a decomposition.
Eigen::MatrixXcd dense_propagator(const SpectralDecomposition &d, double t);

FloquetMap make_floquet_map(const SparseHermitianOperator &H0, const SpectralDecomposition &h1, double T0 = 1.0,
                            double T1 = 2.5);
FloquetMap make_floquet_map(const SparseHermitianOperator &H0, std::shared_ptr<const Eigen::MatrixXcd> h1_propagator,
                            double T0 = 1.0, double T1 = 2.5);

/// exp(-i T1 H1) first, then the diagonal exp(-i T0 H0) phase.
void floquet_step(StateVector &psi, const FloquetMap &map);

struct FloquetSpectrum {
    Eigen::MatrixXcd unitary;
    Eigen::VectorXcd eigenvalues;
    Eigen::VectorXd quasienergies; ///< theta with eigenvalue e^{-i theta}, in [-pi, pi), ascending
};

FloquetSpectrum materialize_floquet_unitary(const FloquetMap &map, long cap = kDefaultDiagonalizationCap);

/// Phase angle of e^{-i theta} mapped to [-pi, pi).
double quasienergy(Complex eigenvalue);

} // namespace entomo
