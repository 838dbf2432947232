#include "entomo/spectral_stats.hpp"

#include "entomo/errors.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace entomo {

RatioStats level_spacing_ratios(std::span<const double> energies) {
    if (energies.size() < 3) throw ParameterError("level spacing ratios need at least three levels");
    if (!std::is_sorted(energies.begin(), energies.end())) throw ParameterError("spectrum must be sorted ascending");
    constexpr double kDegenerate = 1e-12;
    RatioStats st;
    st.ratios.reserve(energies.size() - 2);
    for (std::size_t k = 0; k + 2 < energies.size(); ++k) {
        const double a = energies[k + 1] - energies[k];
        const double b = energies[k + 2] - energies[k + 1];
        if (a < kDegenerate || b < kDegenerate) {
            ++st.dropped;
            continue;
        }
        st.ratios.push_back(std::min(a, b) / std::max(a, b));
    }
    double sum = 0.0;
    for (double r : st.ratios) sum += r;
    st.mean_r = st.ratios.empty() ? 0.0 : sum / static_cast<double>(st.ratios.size());
    st.histogram = ratio_histogram(st.ratios);
    return st;
}

std::vector<double> middle_third(std::span<const double> energies) {
    const std::size_t d = energies.size();
    return {energies.begin() + static_cast<std::ptrdiff_t>(d / 3),
            energies.begin() + static_cast<std::ptrdiff_t>(2 * d / 3)};
}

ReferenceMeans reference_means() {
    return {4.0 - 2.0 * std::sqrt(3.0), 0.527, 2.0 * std::numbers::ln2 - 1.0};
}

Histogram ratio_histogram(std::span<const double> ratios, int bins) {
    if (bins < 1) throw ParameterError("histogram needs at least one bin");
    Histogram h;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) h.edges[b] = static_cast<double>(b) / bins;
    h.density.assign(static_cast<std::size_t>(bins), 0.0);
    if (ratios.empty()) return h;
    for (double r : ratios) {
        const int b = std::clamp(static_cast<int>(r * bins), 0, bins - 1);
        h.density[b] += 1.0;
    }
    const double norm = static_cast<double>(ratios.size()) / bins;
    for (auto &d : h.density) d /= norm;
    return h;
}

RatioStats pool_ratios(std::span<const RatioStats> parts) {
    RatioStats st;
    for (const auto &p : parts) {
        st.ratios.insert(st.ratios.end(), p.ratios.begin(), p.ratios.end());
        st.dropped += p.dropped;
    }
    double sum = 0.0;
    for (double r : st.ratios) sum += r;
    st.mean_r = st.ratios.empty() ? 0.0 : sum / static_cast<double>(st.ratios.size());
    st.histogram = ratio_histogram(st.ratios);
    return st;
}

RatioStats goe_surrogate_ratios(int dim, int n_samples, Rng &rng) {
    if (dim < 50) throw ParameterError("GOE surrogate needs dim >= 50");
    if (n_samples < 1) throw ParameterError("GOE surrogate needs at least one sample");
    std::normal_distribution<double> normal;
    std::vector<RatioStats> parts;
    parts.reserve(static_cast<std::size_t>(n_samples));
    for (int s = 0; s < n_samples; ++s) {
        Eigen::MatrixXd a(dim, dim);
        for (Eigen::Index c = 0; c < dim; ++c)
            for (Eigen::Index r = 0; r < dim; ++r) a(r, c) = normal(rng);
        const Eigen::MatrixXd sym = (a + a.transpose()) / 2.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd &ev = es.eigenvalues();
        parts.push_back(level_spacing_ratios(middle_third({ev.data(), static_cast<std::size_t>(ev.size())})));
    }
    return pool_ratios(parts);
}

double goe_ratio_density(double r) {
    // Wigner-like surmise for 3x3 GOE matrices, folded onto [0, 1].
    const double z = 1.0 + r + r * r;
    return 2.0 * (27.0 / 8.0) * (r + r * r) / std::pow(z, 2.5);
}

double poisson_ratio_density(double r) { return 2.0 / ((1.0 + r) * (1.0 + r)); }

} // namespace entomo
