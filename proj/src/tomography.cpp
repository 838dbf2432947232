#include "entomo/tomography.hpp"

#include "entomo/errors.hpp"

#include <algorithm>
#include <limits>

namespace entomo {

DesignMatrix build_design_matrix(const RepresentativeSet &set) {
    if (set.reps.empty()) throw ParameterError("design matrix needs at least one representative");
    const int cols = set.L / 2;
    DesignMatrix d;
    d.L = set.L;
    d.n0 = set.n0;
    d.geometry = set.geometry;
    d.x.resize(static_cast<Eigen::Index>(set.size()), cols);
    for (std::size_t r = 0; r < set.size(); ++r) {
        const auto row = static_cast<Eigen::Index>(r);
        d.x(row, 0) = 1.0;
        for (int j = 1; j < cols; ++j) d.x(row, j) = set.geometry[r][j];
    }
    return d;
}

FitResult fit_linear(const Eigen::MatrixXd &x, std::span<const double> y) {
    if (static_cast<Eigen::Index>(y.size()) != x.rows())
        throw ParameterError("response length differs from design row count");
    if (x.rows() == 0 || x.cols() == 0) throw ParameterError("empty design matrix");
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), x.rows());

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
    const Eigen::VectorXd beta = cod.solve(yv);

    FitResult f;
    f.rank = static_cast<int>(cod.rank());
    f.rank_deficient = f.rank < x.cols();
    f.S0 = beta(0);
    f.omega.assign(beta.data() + 1, beta.data() + beta.size());
    f.predicted = x * beta;
    f.residuals = yv - f.predicted;

    const double ss_res = f.residuals.squaredNorm();
    const double ss_tot = (yv.array() - yv.mean()).square().sum();
    const double scale = std::max(yv.squaredNorm(), std::numeric_limits<double>::min());
    if (ss_tot <= 1e-28 * scale)
        f.r2 = ss_res <= 1e-28 * scale ? 1.0 : 0.0;
    else
        f.r2 = 1.0 - ss_res / ss_tot;
    return f;
}

FitResult fit_bond_tensions(const DesignMatrix &design, std::span<const double> y) {
    return fit_linear(design.x, y);
}

double predict(const FitResult &fit, const CrossedBondVector &geometry) {
    if (geometry.order() < static_cast<int>(fit.omega.size()))
        throw ParameterError("geometry vector shorter than the fitted bond orders");
    double s = fit.S0;
    for (std::size_t j = 0; j < fit.omega.size(); ++j) s += fit.omega[j] * geometry.n[j];
    return s;
}

double hierarchy_ratio(const FitResult &fit) {
    if (fit.omega.empty()) throw ParameterError("fit has no bond tensions");
    double longer = 0.0;
    for (std::size_t j = 1; j < fit.omega.size(); ++j) longer = std::max(longer, fit.omega[j]);
    return longer > 0.0 ? fit.omega[0] / longer : std::numeric_limits<double>::infinity();
}

} // namespace entomo
