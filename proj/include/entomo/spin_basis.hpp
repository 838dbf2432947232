#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace entomo {

using Mask = std::uint32_t;
using Complex = std::complex<double>;
using Rng = std::mt19937_64;

/// Largest supported chain. Masks and the dense index table assume L <= 16.
inline constexpr int kMaxSites = 16;

/// Throws ParameterError unless L is even and 2 <= L <= kMaxSites.
void check_chain_length(int L);

/// All L-site masks with exactly n_up set bits, ascending, with an O(1) inverse lookup.
class SectorBasis {
  public:
    SectorBasis(int L, int n_up);

    int L() const noexcept { return L_; }
    int n_up() const noexcept { return n_up_; }
    std::size_t size() const noexcept { return states_.size(); }
    Mask state(std::size_t k) const { return states_[k]; }
    std::span<const Mask> states() const noexcept { return states_; }

    /// Position of mask in the sector, or -1 when its weight differs.
    long find(Mask m) const noexcept {
        return m < index_.size() ? index_[m] : -1;
    }

  private:
    int L_;
    int n_up_;
    std::vector<Mask> states_;
    std::vector<std::int32_t> index_;
};

std::shared_ptr<const SectorBasis> build_sector_basis(int L, int n_up);

/// Either the full 2^L computational basis or a fixed-magnetization sector.
class Basis {
  public:
    static Basis full(int L);
    static Basis sector(std::shared_ptr<const SectorBasis> s);

    int L() const noexcept { return L_; }
    bool is_full() const noexcept { return sector_ == nullptr; }
    std::size_t dim() const noexcept { return is_full() ? (std::size_t{1} << L_) : sector_->size(); }
    Mask mask(std::size_t k) const { return is_full() ? static_cast<Mask>(k) : sector_->state(k); }
    long find(Mask m) const noexcept {
        if (is_full()) return m < (Mask{1} << L_) ? static_cast<long>(m) : -1;
        return sector_->find(m);
    }
    const std::shared_ptr<const SectorBasis> &sector_basis() const noexcept { return sector_; }
    /// Up-spin count of the sector, or -1 for the full space.
    int n_up() const noexcept { return is_full() ? -1 : sector_->n_up(); }

    friend bool operator==(const Basis &a, const Basis &b) noexcept {
        return a.L_ == b.L_ && a.n_up() == b.n_up();
    }

  private:
    Basis(int L, std::shared_ptr<const SectorBasis> s) : L_(L), sector_(std::move(s)) {}
    int L_;
    std::shared_ptr<const SectorBasis> sector_;
};

struct StateVector {
    Basis basis;
    Eigen::VectorXcd amplitudes;

    int L() const noexcept { return basis.L(); }
    double norm() const { return amplitudes.norm(); }
};

/// Bloch-sphere angles of a product state, one (theta, phi) per site.
struct ProductStateAngles {
    std::vector<double> thetas;
    std::vector<double> phis;
};

/// Seed of ensemble sample `sample` under `master_seed`; depends only on the pair.
std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t sample);
Rng stream_from_seed(std::uint64_t seed);
/// stream_from_seed(sample_seed(master_seed, sample)).
Rng sample_stream(std::uint64_t master_seed, std::uint64_t sample);

/// Uniformly chosen basis state of the given sector.
StateVector sample_basis_state(const std::shared_ptr<const SectorBasis> &sector, Rng &rng);
/// Uniformly chosen basis state with L/2 up spins, expressed in the half-filling sector.
StateVector sample_half_filling_state(int L, Rng &rng);

/// cos(theta) ~ U[-1, 1], phi ~ U[0, 2pi) per site (uniform on the Bloch sphere).
ProductStateAngles sample_product_angles(int L, Rng &rng);
/// Full-space product of cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>.
StateVector product_state(const ProductStateAngles &angles);
StateVector sample_random_product_state(int L, Rng &rng);

/// Sector vector placed into the full 2^L space, zero elsewhere.
StateVector embed_sector_state(const StateVector &v);
/// Left inverse of embed_sector_state: keeps only the sector's amplitudes.
StateVector project_to_sector(const StateVector &full, std::shared_ptr<const SectorBasis> sector);

/// Total probability outside the `n_up` sector for a full-space vector
/// (zero by construction for a sector-basis vector of that sector).
double out_of_sector_weight(const StateVector &v, int n_up);

} // namespace entomo
