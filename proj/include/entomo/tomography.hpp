#pragma once

#include "entomo/bipartition.hpp"

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace entomo {

/// Regression design for one (L, n0) slice: a row [1, n_1, ..., n_{L/2-1}] per
/// representative. The n_{L/2} column is dropped because the crossed-bond
/// counts of a row sum to n0 (L - n0).
struct DesignMatrix {
    int L = 0;
    int n0 = 0;
    Eigen::MatrixXd x;
    std::vector<CrossedBondVector> geometry; ///< full vectors, kept for audit

    Eigen::Index rows() const noexcept { return x.rows(); }
    Eigen::Index cols() const noexcept { return x.cols(); }
};

DesignMatrix build_design_matrix(const RepresentativeSet &set);

/// Least-squares solution of the bond-additive ansatz S = S0 + sum_j omega_j n_j.
struct FitResult {
    double S0 = 0.0;
    std::vector<double> omega; ///< omega_1 .. omega_{L/2-1}, bits per crossed bond
    double r2 = 0.0;
    Eigen::VectorXd predicted;
    Eigen::VectorXd residuals; ///< y - predicted
    int rank = 0;
    bool rank_deficient = false; ///< minimum-norm solution returned
};

/// Fits via a complete orthogonal decomposition. R^2 = 1 - SS_res / SS_tot, with R^2 = 1
/// when both vanish.
FitResult fit_bond_tensions(const DesignMatrix &design, std::span<const double> y);
FitResult fit_linear(const Eigen::MatrixXd &x, std::span<const double> y);

/// S0 + sum over j < L/2 of omega_j n_j.
double predict(const FitResult &fit, const CrossedBondVector &geometry);

/// omega_1 / max_{j>1} omega_j; +inf when no longer-range tension is positive.
double hierarchy_ratio(const FitResult &fit);

} // namespace entomo
