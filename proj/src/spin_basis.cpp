#include "entomo/spin_basis.hpp"

#include "entomo/errors.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace entomo {

void check_chain_length(int L) {
    if (L < 2 || L > kMaxSites || L % 2 != 0)
        throw ParameterError("chain length must be even and in [2, " + std::to_string(kMaxSites) +
                             "], got " + std::to_string(L));
}

SectorBasis::SectorBasis(int L, int n_up) : L_(L), n_up_(n_up) {
    check_chain_length(L);
    if (n_up < 0 || n_up > L)
        throw ParameterError("n_up must be in [0, L], got " + std::to_string(n_up));
    const Mask dim = Mask{1} << L;
    index_.assign(dim, -1);
    for (Mask m = 0; m < dim; ++m) {
        if (std::popcount(m) == n_up) {
            index_[m] = static_cast<std::int32_t>(states_.size());
            states_.push_back(m);
        }
    }
}

std::shared_ptr<const SectorBasis> build_sector_basis(int L, int n_up) {
    return std::make_shared<const SectorBasis>(L, n_up);
}

Basis Basis::full(int L) {
    check_chain_length(L);
    return Basis(L, nullptr);
}

Basis Basis::sector(std::shared_ptr<const SectorBasis> s) {
    if (!s) throw ParameterError("null sector basis");
    const int L = s->L();
    return Basis(L, std::move(s));
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}
} // namespace

std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t sample) {
    return splitmix64(master_seed ^ splitmix64(sample));
}

Rng stream_from_seed(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Rng(seq);
}

Rng sample_stream(std::uint64_t master_seed, std::uint64_t sample) {
    return stream_from_seed(sample_seed(master_seed, sample));
}

StateVector sample_basis_state(const std::shared_ptr<const SectorBasis> &sector, Rng &rng) {
    std::uniform_int_distribution<std::size_t> pick(0, sector->size() - 1);
    StateVector v{Basis::sector(sector), Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sector->size()))};
    v.amplitudes(static_cast<Eigen::Index>(pick(rng))) = 1.0;
    return v;
}

StateVector sample_half_filling_state(int L, Rng &rng) {
    check_chain_length(L);
    return sample_basis_state(build_sector_basis(L, L / 2), rng);
}

ProductStateAngles sample_product_angles(int L, Rng &rng) {
    std::uniform_real_distribution<double> cos_theta(-1.0, 1.0);
    std::uniform_real_distribution<double> phi(0.0, 2.0 * std::numbers::pi);
    ProductStateAngles a;
    a.thetas.reserve(L);
    a.phis.reserve(L);
    for (int i = 0; i < L; ++i) {
        a.thetas.push_back(std::acos(cos_theta(rng)));
        a.phis.push_back(phi(rng));
    }
    return a;
}

StateVector product_state(const ProductStateAngles &angles) {
    const int L = static_cast<int>(angles.thetas.size());
    if (angles.phis.size() != angles.thetas.size())
        throw ParameterError("theta and phi sequences differ in length");
    check_chain_length(L);

    std::vector<Complex> up(L), down(L);
    for (int i = 0; i < L; ++i) {
        up[i] = std::cos(angles.thetas[i] / 2);
        down[i] = std::polar(std::sin(angles.thetas[i] / 2), angles.phis[i]);
    }
    // Build the tensor product site by site: amplitudes for the first `i` sites
    // occupy the low 2^i entries.
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(Eigen::Index{1} << L);
    amp(0) = 1.0;
    for (int i = 0; i < L; ++i) {
        const Eigen::Index half = Eigen::Index{1} << i;
        for (Eigen::Index k = 0; k < half; ++k) {
            amp(k + half) = amp(k) * up[i];
            amp(k) *= down[i];
        }
    }
    return {Basis::full(L), std::move(amp)};
}

StateVector sample_random_product_state(int L, Rng &rng) {
    return product_state(sample_product_angles(L, rng));
}

StateVector embed_sector_state(const StateVector &v) {
    if (v.basis.is_full()) return v;
    const int L = v.L();
    StateVector out{Basis::full(L), Eigen::VectorXcd::Zero(Eigen::Index{1} << L)};
    const auto &sector = *v.basis.sector_basis();
    for (std::size_t k = 0; k < sector.size(); ++k)
        out.amplitudes(sector.state(k)) = v.amplitudes(static_cast<Eigen::Index>(k));
    return out;
}

StateVector project_to_sector(const StateVector &full, std::shared_ptr<const SectorBasis> sector) {
    if (!full.basis.is_full() || full.L() != sector->L())
        throw BasisMismatch("project_to_sector expects a full-space vector of matching length");
    StateVector out{Basis::sector(sector), Eigen::VectorXcd(static_cast<Eigen::Index>(sector->size()))};
    for (std::size_t k = 0; k < sector->size(); ++k)
        out.amplitudes(static_cast<Eigen::Index>(k)) = full.amplitudes(sector->state(k));
    return out;
}

double out_of_sector_weight(const StateVector &v, int n_up) {
    if (!v.basis.is_full()) return v.basis.n_up() == n_up ? 0.0 : v.amplitudes.squaredNorm();
    double w = 0.0;
    for (Eigen::Index k = 0; k < v.amplitudes.size(); ++k)
        if (std::popcount(static_cast<Mask>(k)) != n_up) w += std::norm(v.amplitudes(k));
    return w;
}

} // namespace entomo
