#include "entomo/entanglement.hpp"

#include "entomo/errors.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numbers>

namespace entomo {

namespace {

/// Gathers the bits of `m` selected by `select` into the low bits.
Mask compress_bits(Mask m, Mask select) {
    Mask out = 0;
    int k = 0;
    for (; select; select &= select - 1, ++k) {
        const int bit = std::countr_zero(select);
        out |= ((m >> bit) & 1u) << k;
    }
    return out;
}

/// rank[x] = position of x among the n-bit numbers of equal popcount, ascending.
std::vector<int> popcount_ranks(int n) {
    std::vector<int> rank(std::size_t{1} << n);
    std::vector<int> next(static_cast<std::size_t>(n) + 1, 0);
    for (std::size_t x = 0; x < rank.size(); ++x) rank[x] = next[std::popcount(x)]++;
    return rank;
}

long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

void append_squared_singular_values(const Eigen::MatrixXcd &block, std::vector<double> &out) {
    if (block.size() == 0) return;
    if (block.rows() == 1 || block.cols() == 1) {
        out.push_back(block.squaredNorm());
        return;
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(block);
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
        const double s = svd.singularValues()(k);
        out.push_back(s * s);
    }
}

Eigen::VectorXcd gaussian_unit_vector(Eigen::Index dim, Rng &rng) {
    std::normal_distribution<double> normal;
    Eigen::VectorXcd amp(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double re = normal(rng);
        const double im = normal(rng);
        amp(k) = {re, im};
    }
    return amp / amp.norm();
}

} // namespace

SchmidtSpectrum schmidt_spectrum(const StateVector &psi, Mask mask) {
    const int L = psi.L();
    const Mask all = (Mask{1} << L) - 1;
    if ((mask & ~all) != 0) throw ParameterError("mask has bits beyond the chain");
    const int n_a = std::popcount(mask), n_b = L - n_a;
    if (n_a == 0 || n_b == 0) throw ParameterError("subsystem must be a nonempty proper subset of the chain");
    const Mask rest = all & ~mask;
    const Basis &basis = psi.basis;
    const auto &amp = psi.amplitudes;

    SchmidtSpectrum out;
    if (basis.is_full()) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(Eigen::Index{1} << n_a, Eigen::Index{1} << n_b);
        for (Eigen::Index k = 0; k < amp.size(); ++k) {
            const auto km = static_cast<Mask>(k);
            m(compress_bits(km, mask), compress_bits(km, rest)) = amp(k);
        }
        append_squared_singular_values(m, out.lambdas);
    } else {
        const int n_up = basis.n_up();
        const auto rank_a = popcount_ranks(n_a), rank_b = popcount_ranks(n_b);
        std::vector<Eigen::MatrixXcd> blocks(static_cast<std::size_t>(n_a) + 1);
        for (int p = 0; p <= n_a; ++p)
            blocks[p] = Eigen::MatrixXcd::Zero(binomial(n_a, p), binomial(n_b, n_up - p));
        for (std::size_t k = 0; k < basis.dim(); ++k) {
            const Mask m = basis.mask(k);
            const Mask ra = compress_bits(m, mask), rb = compress_bits(m, rest);
            blocks[std::popcount(ra)](rank_a[ra], rank_b[rb]) = amp(static_cast<Eigen::Index>(k));
        }
        for (const auto &b : blocks) append_squared_singular_values(b, out.lambdas);
    }
    std::sort(out.lambdas.begin(), out.lambdas.end(), std::greater<>());
    return out;
}

double entropy_bits(const SchmidtSpectrum &s) {
    double h = 0.0;
    for (double l : s.lambdas)
        if (l >= 1e-12) h -= l * std::log2(l);
    return h;
}

double entanglement_entropy(const StateVector &psi, Mask mask) { return entropy_bits(schmidt_spectrum(psi, mask)); }

double mutual_information(const StateVector &psi, int j) {
    const int L = psi.L();
    if (j < 1 || j > L / 2) throw ParameterError("mutual information distance must be in [1, L/2]");
    const Mask a = 1u, b = Mask{1} << j;
    return entanglement_entropy(psi, a) + entanglement_entropy(psi, b) - entanglement_entropy(psi, a | b);
}

double page_entropy_bits(long dim_a, long dim_b) {
    if (dim_a < 1 || dim_b < 1) throw ParameterError("subsystem dimensions must be positive");
    if (dim_a > dim_b) std::swap(dim_a, dim_b);
    double harmonic = 0.0;
    for (long k = dim_a * dim_b; k > dim_b; --k) harmonic += 1.0 / static_cast<double>(k);
    return (harmonic - static_cast<double>(dim_a - 1) / (2.0 * static_cast<double>(dim_b))) / std::numbers::ln2;
}

MeanWithError mean_with_error(std::span<const double> xs) {
    MeanWithError r;
    const auto n = static_cast<double>(xs.size());
    if (xs.empty()) return r;
    for (double x : xs) r.mean += x;
    r.mean /= n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - r.mean) * (x - r.mean);
        r.std_error = std::sqrt(ss / (n - 1) / n);
    }
    return r;
}

StateVector haar_random_state(int L, std::optional<int> n_up, Rng &rng) {
    check_chain_length(L);
    Basis basis = n_up ? Basis::sector(build_sector_basis(L, *n_up)) : Basis::full(L);
    Eigen::VectorXcd amp = gaussian_unit_vector(static_cast<Eigen::Index>(basis.dim()), rng);
    return {std::move(basis), std::move(amp)};
}

std::vector<MeanWithError> haar_entropy_mc(int L, std::optional<int> n_up, std::span<const Mask> masks,
                                           int n_samples, Rng &rng) {
    if (n_samples < 100) throw ParameterError("Haar Monte Carlo needs at least 100 samples");
    check_chain_length(L);
    Basis basis = n_up ? Basis::sector(build_sector_basis(L, *n_up)) : Basis::full(L);
    std::vector<std::vector<double>> values(masks.size());
    for (auto &v : values) v.reserve(static_cast<std::size_t>(n_samples));
    for (int s = 0; s < n_samples; ++s) {
        const StateVector psi{basis, gaussian_unit_vector(static_cast<Eigen::Index>(basis.dim()), rng)};
        for (std::size_t i = 0; i < masks.size(); ++i) values[i].push_back(entanglement_entropy(psi, masks[i]));
    }
    std::vector<MeanWithError> out;
    out.reserve(masks.size());
    for (const auto &v : values) out.push_back(mean_with_error(v));
    return out;
}

MeanWithError haar_sector_entropy_mc(int L, std::optional<int> n_up, Mask mask, int n_samples, Rng &rng) {
    return haar_entropy_mc(L, n_up, std::span<const Mask>(&mask, 1), n_samples, rng).front();
}

} // namespace entomo
