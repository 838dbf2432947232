#include "entomo/entanglement.hpp"
#include "entomo/errors.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <doctest.h>
#include <numbers>

using namespace entomo;

namespace {

StateVector full_state(int L, const Eigen::VectorXcd &a) { return {Basis::full(L), a}; }

std::vector<double> padded_desc(std::vector<double> v, std::size_t n) {
    v.resize(std::max(v.size(), n), 0.0);
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

// Bell pair (|up down> - |down up>) / sqrt 2 on sites a, b; all other sites up.
StateVector bell_state(int L, int a, int b) {
    const Mask rest = ((Mask{1} << L) - 1) & ~(Mask{1} << a) & ~(Mask{1} << b);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << L);
    v(rest | Mask{1} << a) = std::sqrt(0.5);
    v(rest | Mask{1} << b) = -std::sqrt(0.5);
    return full_state(L, v);
}

// Relabels sites: new site perm[i] carries old site i.
Eigen::VectorXcd permute_sites(const Eigen::VectorXcd &v, int L, const std::vector<int> &perm) {
    Eigen::VectorXcd out(v.size());
    for (Mask m = 0; m < (Mask{1} << L); ++m) {
        Mask p = 0;
        for (int i = 0; i < L; ++i)
            if (m >> i & 1u) p |= Mask{1} << perm[i];
        out(p) = v(m);
    }
    return out;
}

} // namespace

TEST_CASE("entropy of simple spectra") {
    CHECK(entropy_bits({{1.0}}) == 0.0);
    CHECK(entropy_bits({{0.5, 0.5}}) == doctest::Approx(1.0));
    CHECK(entropy_bits({{0.25, 0.25, 0.25, 0.25}}) == doctest::Approx(2.0));
    CHECK(entropy_bits({{1.0, 1e-13, -1e-17}}) == 0.0);
}

TEST_CASE("Schmidt spectra of product and Bell states") {
    Rng rng(1);
    const StateVector prod = sample_random_product_state(6, rng);
    for (Mask m = 1; m < 63; ++m) {
        const auto s = schmidt_spectrum(prod, m);
        CHECK(s.lambdas.front() == doctest::Approx(1.0));
        CHECK(entanglement_entropy(prod, m) == doctest::Approx(0.0).epsilon(1e-9));
    }
    const StateVector bell = bell_state(6, 1, 4);
    const auto s = schmidt_spectrum(bell, 0b000010);
    CHECK(s.lambdas[0] == doctest::Approx(0.5));
    CHECK(s.lambdas[1] == doctest::Approx(0.5));
    CHECK(entanglement_entropy(bell, 0b000011) == doctest::Approx(1.0));
    CHECK(entanglement_entropy(bell, 0b010010) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("SVD path matches the dense partial trace at L = 6") {
    std::mt19937_64 rng(2024);
    const int L = 6;
    double worst = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const StateVector psi = full_state(L, oracle::random_state(64, rng));
        for (Mask m = 1; m < 63; ++m) {
            const Eigen::MatrixXcd rho = oracle::partial_trace(psi.amplitudes, L, m);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
            std::vector<double> ref(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
            const auto got = schmidt_spectrum(psi, m).lambdas;
            const std::size_t n = std::max(ref.size(), got.size());
            const auto a = padded_desc(got, n), b = padded_desc(ref, n);
            for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
            worst = std::max(worst, std::abs(entanglement_entropy(psi, m) - oracle::entropy_from_density(rho)));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("sector states give the same spectra as their embedding") {
    std::mt19937_64 rng(7);
    const auto s = build_sector_basis(8, 4);
    const StateVector sec{Basis::sector(s), oracle::random_state(static_cast<Eigen::Index>(s->size()), rng)};
    const StateVector full = embed_sector_state(sec);
    for (Mask m = 1; m < 255; ++m) {
        const auto a = schmidt_spectrum(sec, m).lambdas, b = schmidt_spectrum(full, m).lambdas;
        const std::size_t n = std::max(a.size(), b.size());
        const auto pa = padded_desc(a, n), pb = padded_desc(b, n);
        for (std::size_t k = 0; k < n; ++k) REQUIRE(std::abs(pa[k] - pb[k]) < 1e-12);
        double sum = 0;
        for (double x : a) sum += x;
        REQUIRE(std::abs(sum - 1.0) < 1e-10);
        REQUIRE(std::is_sorted(a.begin(), a.end(), std::greater<>()));
    }
}

TEST_CASE("complement symmetry, bounds and relabeling invariance") {
    std::mt19937_64 rng(8);
    const int L = 8;
    const Mask all = 255;
    const StateVector psi = full_state(L, oracle::random_state(256, rng));
    for (Mask m = 1; m < all; ++m) {
        const double s = entanglement_entropy(psi, m);
        REQUIRE(std::abs(s - entanglement_entropy(psi, all ^ m)) < 1e-10);
        const int n0 = std::popcount(m);
        REQUIRE(s >= -1e-12);
        REQUIRE(s <= std::min(n0, L - n0) + 1e-12);
    }
    // Swap sites 0 <-> 2 (inside A) and 5 <-> 7 (inside the complement).
    const std::vector<int> perm{2, 1, 0, 3, 4, 7, 6, 5};
    const StateVector moved = full_state(L, permute_sites(psi.amplitudes, L, perm));
    const Mask a = 0b00000111;
    const auto x = schmidt_spectrum(psi, a).lambdas, y = schmidt_spectrum(moved, a).lambdas;
    REQUIRE(x.size() == y.size());
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(x[k] - y[k]) < 1e-12);
}

TEST_CASE("trivial masks are rejected") {
    Rng rng(1);
    const StateVector psi = sample_random_product_state(4, rng);
    CHECK_THROWS_AS(schmidt_spectrum(psi, 0), ParameterError);
    CHECK_THROWS_AS(schmidt_spectrum(psi, 0b1111), ParameterError);
    CHECK_THROWS_AS(schmidt_spectrum(psi, 0b10000), ParameterError);
}

TEST_CASE("mutual information") {
    Rng rng(3);
    const StateVector prod = sample_random_product_state(8, rng);
    for (int j = 1; j <= 4; ++j) CHECK(std::abs(mutual_information(prod, j)) < 1e-9);
    for (int j = 1; j <= 4; ++j) CHECK(mutual_information(bell_state(8, 0, j), j) == doctest::Approx(2.0));
    CHECK(std::abs(mutual_information(bell_state(8, 0, 3), 1)) < 1e-9);

    std::mt19937_64 srng(4);
    for (int rep = 0; rep < 20; ++rep) {
        const StateVector psi = full_state(8, oracle::random_state(256, srng));
        for (int j = 1; j <= 4; ++j) CHECK(mutual_information(psi, j) >= -1e-9);
    }
    CHECK_THROWS_AS(mutual_information(prod, 0), ParameterError);
    CHECK_THROWS_AS(mutual_information(prod, 5), ParameterError);
}

TEST_CASE("Page values") {
    CHECK(page_entropy_bits(1, 64) == 0.0);
    CHECK(page_entropy_bits(2, 2) == doctest::Approx((1.0 / 3.0) / std::numbers::ln2).epsilon(1e-14));
    CHECK(page_entropy_bits(2, 2) == doctest::Approx(0.4809).epsilon(1e-4));
    CHECK(page_entropy_bits(8, 2) == page_entropy_bits(2, 8));
    // Direct evaluation of the series at dimA = dimB = 2^8.
    double sum = 0;
    for (long k = 257; k <= 65536; ++k) sum += 1.0 / static_cast<double>(k);
    CHECK(page_entropy_bits(256, 256) == doctest::Approx((sum - 255.0 / 512.0) / std::numbers::ln2).epsilon(1e-12));
}

TEST_CASE("Haar Monte Carlo references") {
    Rng rng(5);
    const auto two_site = haar_sector_entropy_mc(2, 1, 0b01, 40000, rng);
    CHECK(std::abs(two_site.mean - 1.0 / (2.0 * std::numbers::ln2)) < 3 * two_site.std_error);

    const auto full2 = haar_sector_entropy_mc(2, std::nullopt, 0b01, 40000, rng);
    CHECK(std::abs(full2.mean - page_entropy_bits(2, 2)) < 3 * full2.std_error);

    const auto full6 = haar_sector_entropy_mc(6, std::nullopt, 0b000111, 4000, rng);
    CHECK(std::abs(full6.mean - page_entropy_bits(8, 8)) < 3 * full6.std_error);

    const auto small = haar_sector_entropy_mc(6, 3, 0b000111, 400, rng);
    const auto large = haar_sector_entropy_mc(6, 3, 0b000111, 6400, rng);
    CHECK(small.std_error / large.std_error == doctest::Approx(4.0).epsilon(0.2));

    const std::vector<Mask> masks{0b000111, 0b010101};
    const auto both = haar_entropy_mc(6, 3, masks, 200, rng);
    CHECK(both.size() == 2);
    CHECK_THROWS_AS(haar_sector_entropy_mc(6, 3, 0b000111, 99, rng), ParameterError);

    const StateVector h = haar_random_state(8, 4, rng);
    CHECK(h.basis.n_up() == 4);
    CHECK(std::abs(h.norm() - 1.0) < 1e-12);
}

TEST_CASE("mean and standard error") {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const auto m = mean_with_error(xs);
    CHECK(m.mean == 2.5);
    CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}
