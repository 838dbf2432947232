#include "entomo/errors.hpp"
#include "entomo/spin_basis.hpp"

#include "oracles.hpp"

#include <bit>
#include <cmath>
#include <doctest.h>
#include <map>
#include <numbers>

using namespace entomo;

TEST_CASE("sector basis lists masks of fixed weight in ascending order") {
    const auto s = build_sector_basis(4, 2);
    const std::vector<Mask> expected{0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100};
    REQUIRE(s->size() == expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) CHECK(s->state(k) == expected[k]);

    const auto empty = build_sector_basis(4, 0);
    REQUIRE(empty->size() == 1);
    CHECK(empty->state(0) == 0u);

    CHECK(build_sector_basis(16, 8)->size() == static_cast<std::size_t>(oracle::binomial(16, 8)));
}

TEST_CASE("sector index is the exact inverse of the state list") {
    for (int L : {4, 8, 16})
        for (int n_up = 0; n_up <= L; ++n_up) {
            const auto s = build_sector_basis(L, n_up);
            CHECK(s->size() == static_cast<std::size_t>(oracle::binomial(L, n_up)));
            for (std::size_t k = 0; k < s->size(); ++k) {
                REQUIRE(s->find(s->state(k)) == static_cast<long>(k));
                if (k > 0) REQUIRE(s->state(k - 1) < s->state(k));
            }
            for (Mask m = 0; m < (Mask{1} << L); ++m)
                if (std::popcount(m) != n_up) REQUIRE(s->find(m) == -1);
        }
}

TEST_CASE("invalid chain lengths and fillings are rejected") {
    CHECK_THROWS_AS(build_sector_basis(5, 2), ParameterError);
    CHECK_THROWS_AS(build_sector_basis(18, 9), ParameterError);
    CHECK_THROWS_AS(build_sector_basis(4, 5), ParameterError);
    CHECK_THROWS_AS(build_sector_basis(4, -1), ParameterError);
    Rng rng(1);
    CHECK_THROWS_AS(sample_half_filling_state(7, rng), ParameterError);
}

TEST_CASE("half-filling samples are basis states of weight L/2") {
    Rng rng(7);
    for (int rep = 0; rep < 200; ++rep) {
        const StateVector v = sample_half_filling_state(10, rng);
        int nonzero = 0;
        for (Eigen::Index k = 0; k < v.amplitudes.size(); ++k)
            if (std::abs(v.amplitudes(k)) > 0) {
                ++nonzero;
                CHECK(std::abs(v.amplitudes(k)) == doctest::Approx(1.0).epsilon(1e-15));
                CHECK(std::popcount(v.basis.mask(static_cast<std::size_t>(k))) == 5);
            }
        CHECK(nonzero == 1);
    }
}

TEST_CASE("half-filling sampling is uniform over the 70 masks at L = 8") {
    Rng rng(20240601);
    const int draws = 100000;
    std::map<Mask, int> counts;
    for (int i = 0; i < draws; ++i) {
        const StateVector v = sample_half_filling_state(8, rng);
        Eigen::Index k;
        v.amplitudes.cwiseAbs().maxCoeff(&k);
        ++counts[v.basis.mask(static_cast<std::size_t>(k))];
    }
    REQUIRE(counts.size() == 70);
    const double expected = draws / 70.0;
    double chi2 = 0;
    for (const auto &[m, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
    // Wilson-Hilferty upper 1% point of chi-square with 69 degrees of freedom.
    const double df = 69, z = 2.3263478740408408;
    const double crit = df * std::pow(1 - 2 / (9 * df) + z * std::sqrt(2 / (9 * df)), 3);
    CHECK(chi2 < crit);
}

namespace {

// <Sz_i> from the full-space amplitudes.
double site_sz(const StateVector &v, int site) {
    double s = 0;
    for (Eigen::Index k = 0; k < v.amplitudes.size(); ++k)
        s += std::norm(v.amplitudes(k)) * ((k >> site & 1) ? 0.5 : -0.5);
    return s;
}

} // namespace

TEST_CASE("random product states are normalized and isotropic") {
    Rng rng(99);
    const int L = 4, draws = 100000;
    std::vector<double> sum(L, 0.0), sum_sq(L, 0.0);
    for (int i = 0; i < draws; ++i) {
        const StateVector v = sample_random_product_state(L, rng);
        REQUIRE(std::abs(v.norm() - 1.0) < 1e-12);
        for (int site = 0; site < L; ++site) {
            const double m = site_sz(v, site);
            sum[site] += m;
            sum_sq[site] += m * m;
        }
    }
    // E[<Sz>^2] over the Bloch sphere by midpoint quadrature in theta.
    const int nq = 20000;
    double quad = 0;
    for (int q = 0; q < nq; ++q) {
        const double theta = (q + 0.5) * std::numbers::pi / nq;
        quad += 0.25 * std::cos(theta) * std::cos(theta) * std::sin(theta) * 0.5 * std::numbers::pi / nq;
    }
    CHECK(quad == doctest::Approx(1.0 / 12.0).epsilon(1e-6));
    for (int site = 0; site < L; ++site) {
        const double mean = sum[site] / draws;
        const double var = sum_sq[site] / draws - mean * mean;
        CHECK(std::abs(mean) < 3 * std::sqrt(var / draws));
        // Fourth moment of cos(theta)/2 is 1/80, so Var(<Sz>^2) = 1/80 - 1/144.
        const double sigma_sq = std::sqrt((1.0 / 80 - 1.0 / 144) / draws);
        CHECK(std::abs(sum_sq[site] / draws - quad) < 4 * sigma_sq);
    }
}

TEST_CASE("product state factors follow the Bloch parameterization") {
    ProductStateAngles a{{0.0, std::numbers::pi}, {0.0, 0.0}};
    const StateVector v = product_state(a);
    // Site 0 up, site 1 down.
    CHECK(std::abs(v.amplitudes(0b01) - Complex(1, 0)) < 1e-15);
    CHECK(v.amplitudes.norm() == doctest::Approx(1.0));

    ProductStateAngles b{{std::numbers::pi / 2}, {std::numbers::pi / 2}};
    CHECK_THROWS_AS(product_state(b), ParameterError);

    ProductStateAngles c{{std::numbers::pi / 2, 0.0}, {std::numbers::pi / 2, 0.0}};
    const StateVector w = product_state(c);
    CHECK(std::abs(w.amplitudes(0b11) - std::sqrt(0.5)) < 1e-15);
    CHECK(std::abs(w.amplitudes(0b10) - Complex(0, std::sqrt(0.5))) < 1e-15);
}

TEST_CASE("embedding and projection between sector and full space") {
    const auto s = build_sector_basis(4, 2);
    StateVector e0{Basis::sector(s), Eigen::VectorXcd::Zero(6)};
    e0.amplitudes(0) = 1.0;
    const StateVector full = embed_sector_state(e0);
    REQUIRE(full.basis.is_full());
    CHECK(full.amplitudes(0b0011) == Complex(1.0));
    CHECK(full.amplitudes.norm() == doctest::Approx(1.0));

    std::mt19937_64 rng(3);
    const auto big = build_sector_basis(10, 5);
    StateVector r{Basis::sector(big), oracle::random_state(static_cast<Eigen::Index>(big->size()), rng)};
    const StateVector emb = embed_sector_state(r);
    CHECK(std::abs(emb.norm() - r.norm()) < 1e-15);
    CHECK(out_of_sector_weight(emb, 5) < 1e-30);
    CHECK(out_of_sector_weight(emb, 4) == doctest::Approx(1.0));
    const StateVector back = project_to_sector(emb, big);
    CHECK((back.amplitudes - r.amplitudes).norm() == 0.0);
}

TEST_CASE("sample seeds depend only on (master, index)") {
    CHECK(sample_seed(5, 3) == sample_seed(5, 3));
    CHECK(sample_seed(5, 3) != sample_seed(5, 4));
    CHECK(sample_seed(5, 3) != sample_seed(6, 3));
    Rng a = sample_stream(11, 2), b = sample_stream(11, 2);
    for (int i = 0; i < 10; ++i) CHECK(a() == b());
}
