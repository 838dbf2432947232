#include "entomo/errors.hpp"
#include "entomo/evolution.hpp"

#include "oracles.hpp"

#include <bit>
#include <doctest.h>
#include <numbers>
#include <quadmath.h>
#include <set>
#include <unsupported/Eigen/MatrixFunctions>

using namespace entomo;
using namespace std::complex_literals;

namespace {

SparseHermitianOperator diagonal_operator(int L, const std::vector<double> &diag) {
    std::vector<MatrixEntry> e;
    for (std::size_t k = 0; k < diag.size(); ++k)
        e.push_back({static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k), Complex(diag[k])});
    return {Basis::full(L), e};
}

SparseHermitianOperator random_h_nn(int L, Rng &rng, const Basis &basis, double W = 0.5) {
    return build_h_nn(L, CouplingParams{}, sample_disorder(W, std::nullopt, L, rng), basis);
}

StateVector random_state(const Basis &b, std::mt19937_64 &rng) {
    return {b, oracle::random_state(static_cast<Eigen::Index>(b.dim()), rng)};
}

// Local (up, down) ordering for the two-site gate oracle.
Eigen::Matrix4cd two_site(const Eigen::Matrix2cd &a, const Eigen::Matrix2cd &b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

} // namespace

TEST_CASE("diagonalization of simple operators") {
    const std::vector<double> diag{3.0, -1.0, 2.0, 0.5};
    const auto d = diagonalize(diagonal_operator(2, diag));
    CHECK(d.eigenvalues(0) == -1.0);
    CHECK(d.eigenvalues(1) == 0.5);
    CHECK(d.eigenvalues(2) == 2.0);
    CHECK(d.eigenvalues(3) == 3.0);

    // sigma_x / 2 on site 0 of a two-site chain.
    const SparseHermitianOperator sx(Basis::full(2), {{0, 1, Complex(0.5)}, {2, 3, Complex(0.5)}});
    const Eigen::VectorXd ev = eigenvalues(sx);
    CHECK(ev(0) == doctest::Approx(-0.5));
    CHECK(ev(1) == doctest::Approx(-0.5));
    CHECK(ev(2) == doctest::Approx(0.5));
    CHECK(ev(3) == doctest::Approx(0.5));
}

TEST_CASE("eigenpairs of H_NN at L = 10 half filling") {
    Rng rng(11);
    const auto H = random_h_nn(10, rng, Basis::sector(build_sector_basis(10, 5)));
    const auto d = diagonalize(H);
    const double norm = d.spectral_norm();
    const Eigen::MatrixXcd dense = H.to_dense();
    const Eigen::MatrixXcd residual = dense * d.eigenvectors - d.eigenvectors * d.eigenvalues.asDiagonal();
    CHECK(residual.colwise().norm().maxCoeff() <= 1e-8 * norm);
    const auto n = d.eigenvectors.cols();
    CHECK((d.eigenvectors.adjoint() * d.eigenvectors - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-8);
    for (Eigen::Index k = 1; k < n; ++k) CHECK(d.eigenvalues(k - 1) <= d.eigenvalues(k));
}

TEST_CASE("complex Hermitian operators use the complex solver") {
    const SparseHermitianOperator sy(Basis::full(2), {{0, 1, Complex(0, -0.5)}, {2, 3, Complex(0, -0.5)}});
    const auto d = diagonalize(sy);
    CHECK(d.eigenvalues(0) == doctest::Approx(-0.5));
    CHECK(d.eigenvalues(3) == doctest::Approx(0.5));
    CHECK((sy.to_dense() * d.eigenvectors - d.eigenvectors * d.eigenvalues.asDiagonal()).norm() < 1e-14);
}

TEST_CASE("capacity cap") {
    Rng rng(1);
    const auto H = random_h_nn(8, rng, Basis::full(8));
    CHECK_THROWS_AS(diagonalize(H, 100), CapacityError);
    try {
        diagonalize(H, 100);
    } catch (const CapacityError &e) {
        CHECK(e.dim() == 256);
        CHECK(std::string(e.what()).find("Krylov") != std::string::npos);
    }
}

TEST_CASE("spectral evolution basics") {
    Rng rng(12);
    std::mt19937_64 srng(12);
    const Basis b = Basis::sector(build_sector_basis(8, 4));
    const auto H = random_h_nn(8, rng, b);
    const auto d = diagonalize(H);
    const StateVector psi0 = random_state(b, srng);

    const StateVector same = evolve_spectral(d, psi0, 0.0);
    CHECK((same.amplitudes - psi0.amplitudes).norm() == 0.0);

    const StateVector eig{b, d.eigenvectors.col(7)};
    for (double t : {0.3, 17.0, 1e6}) {
        const StateVector e = evolve_spectral(d, eig, t);
        CHECK(std::abs(eig.amplitudes.dot(e.amplitudes)) == doctest::Approx(1.0).epsilon(1e-12));
    }

    const double norm_h = d.spectral_norm(), e0 = H.expectation(psi0.amplitudes);
    for (double t : {0.1, 2.0, 1000.0, 1e12}) {
        const StateVector psi = evolve_spectral(d, psi0, t);
        CHECK(std::abs(psi.norm() - 1.0) <= 1e-10);
        CHECK(std::abs(H.expectation(psi.amplitudes) - e0) <= 1e-8 * norm_h);
    }

    const StateVector a = evolve_spectral(d, evolve_spectral(d, psi0, 1.3), 2.1);
    const StateVector c = evolve_spectral(d, psi0, 3.4);
    CHECK((a.amplitudes - c.amplitudes).norm() < 1e-8);

    CHECK_THROWS_AS(evolve_spectral(d, random_state(Basis::full(8), srng), 1.0), BasisMismatch);
}

TEST_CASE("spectral evolution matches the dense matrix exponential") {
    Rng rng(13);
    std::mt19937_64 srng(13);
    const Basis b = Basis::full(6);
    const auto H = build_h_mf(6, CouplingParams{}, sample_disorder(0.5, 0.5, 6, rng), b);
    const StateVector psi0 = random_state(b, srng);
    const Eigen::MatrixXcd U = (Complex(0, -1.7) * H.to_dense()).exp();
    CHECK((evolve_spectral(diagonalize(H), psi0, 1.7).amplitudes - U * psi0.amplitudes).norm() < 1e-10);
}

TEST_CASE("long-time phases are reduced in extended precision") {
    // Dyadic energies make E t exact; the reference reduces it modulo 2 pi in quad precision.
    const std::vector<double> energies{0.8125, -1.375, 2.0625, -0.25};
    const auto d = diagonalize(diagonal_operator(2, energies));
    StateVector psi0{Basis::full(2), Eigen::VectorXcd::Constant(4, 0.5)};
    const double t = 1e12;
    const StateVector psi = evolve_spectral(d, psi0, t);
    for (Eigen::Index k = 0; k < 4; ++k) {
        const __float128 phase = fmodq(static_cast<__float128>(d.eigenvalues(k)) * t, 2 * M_PIq);
        const Complex ref = 0.5 * std::polar(1.0, -static_cast<double>(phase));
        const Eigen::Index row = static_cast<Eigen::Index>(std::find(energies.begin(), energies.end(), d.eigenvalues(k)) -
                                                           energies.begin());
        CHECK(std::abs(psi.amplitudes(row) - ref) < 1e-6);
    }
}

TEST_CASE("Krylov propagation agrees with the spectral path") {
    Rng rng(14);
    std::mt19937_64 srng(14);
    for (int L : {8, 10}) {
        const Basis b = Basis::sector(build_sector_basis(L, L / 2));
        const auto H = random_h_nn(L, rng, b);
        const auto d = diagonalize(H);
        const StateVector psi0 = random_state(b, srng);
        for (double t : {0.1, 2.0, 25.0}) {
            const StateVector k = evolve_krylov(H, psi0, t, 1e-10);
            const StateVector s = evolve_spectral(d, psi0, t);
            CHECK((k.amplitudes - s.amplitudes).norm() < (L == 8 ? 1e-6 : 1e-9));
            CHECK(std::abs(k.norm() - 1.0) < 1e-10);
        }
    }
    // Full space with transverse fields.
    const Basis full = Basis::full(8);
    const auto H = build_h_mf(8, CouplingParams{}, sample_disorder(0.5, 0.5, 8, rng), full);
    const StateVector psi0 = random_state(full, srng);
    CHECK((evolve_krylov(H, psi0, 3.0).amplitudes - evolve_spectral(diagonalize(H), psi0, 3.0).amplitudes).norm() <
          1e-9);
}

TEST_CASE("Krylov edge cases") {
    std::mt19937_64 srng(15);
    const Basis b = Basis::full(4);
    const StateVector psi0 = random_state(b, srng);
    const SparseHermitianOperator zero(b, {});
    CHECK((evolve_krylov(zero, psi0, 5.0).amplitudes - psi0.amplitudes).norm() < 1e-14);
    CHECK((evolve_krylov(zero, psi0, 0.0).amplitudes - psi0.amplitudes).norm() == 0.0);
    // An eigenstate of a tiny invariant subspace stops the Lanczos recursion early.
    const auto H = diagonal_operator(2, {1.0, 2.0, 3.0, 4.0});
    StateVector e{Basis::full(2), Eigen::VectorXcd::Zero(4)};
    e.amplitudes(2) = 1.0;
    CHECK(std::abs(evolve_krylov(H, e, 2.0).amplitudes(2) - std::exp(Complex(0, -6.0))) < 1e-12);
    CHECK_THROWS_AS(evolve_krylov(zero, psi0, 1.0, 0.0), ParameterError);
}

TEST_CASE("two-qubit gate matches the matrix-exponential oracle") {
    Eigen::Matrix2cd sx, sy, sz;
    sx << 0, 0.5, 0.5, 0;
    sy << 0, -0.5i, 0.5i, 0;
    sz << 0.5, 0, 0, -0.5;
    const Eigen::Matrix4cd xy = two_site(sx, sx) + two_site(sy, sy), zz = two_site(sz, sz);
    const Eigen::Matrix4cd oracle_u =
        (Complex(0, -std::numbers::pi / 2) * xy).exp() * (Complex(0, -std::numbers::pi) * zz).exp();
    const auto g = build_two_qubit_gate();
    CHECK((g.u - oracle_u).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((g.u.adjoint() * g.u - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(g.u(0, 0) - std::polar(1.0, -std::numbers::pi / 4)) < 1e-15);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            const bool same_block = r == c || (r == 1 && c == 2) || (r == 2 && c == 1);
            if (!same_block) CHECK(g.u(r, c) == Complex(0));
        }
}

TEST_CASE("gate kernel on two sites equals the dense gate") {
    const auto g = build_two_qubit_gate();
    // Local order {up-up, up-down, down-up, down-down} with site 0 first, as full-space masks.
    const Mask local[4] = {0b11, 0b01, 0b10, 0b00};
    std::mt19937_64 srng(16);
    const StateVector psi0 = random_state(Basis::full(2), srng);
    Eigen::Vector4cd v;
    for (int k = 0; k < 4; ++k) v(k) = psi0.amplitudes(local[k]);
    const Eigen::Vector4cd expected = g.u * g.u * v;
    StateVector psi = psi0;
    apply_two_qubit_gate(psi, g, 0, 1);
    apply_two_qubit_gate(psi, g, 0, 1);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(psi.amplitudes(local[k]) - expected(k)) < 1e-14);
}

TEST_CASE("sector and full-space gate kernels agree") {
    const auto g = build_two_qubit_gate();
    std::mt19937_64 srng(17);
    const auto s = build_sector_basis(8, 4);
    StateVector sec = random_state(Basis::sector(s), srng);
    StateVector full = embed_sector_state(sec);
    Rng a(5), b(5);
    for (int step = 0; step < 200; ++step) {
        const int i = rqc_step(sec, g, a);
        CHECK(rqc_step(full, g, b) == i);
    }
    CHECK((embed_sector_state(sec).amplitudes - full.amplitudes).norm() < 1e-12);
    CHECK(std::abs(sec.norm() - 1.0) < 1e-12);
    CHECK(out_of_sector_weight(full, 4) < 1e-24);

    TwoQubitGate mixing{Eigen::Matrix4cd::Identity()};
    mixing.u(0, 3) = 1;
    CHECK_THROWS_AS(apply_two_qubit_gate(sec, mixing, 0, 1), BasisMismatch);
    CHECK_THROWS_AS(apply_two_qubit_gate(sec, g, 2, 2), ParameterError);
}

TEST_CASE("random circuit picks every adjacent pair") {
    const auto g = build_two_qubit_gate();
    Rng rng(3);
    StateVector psi = sample_half_filling_state(6, rng);
    std::set<int> seen;
    for (int k = 0; k < 300; ++k) seen.insert(rqc_step(psi, g, rng));
    CHECK(seen.size() == 6);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
    const StateVector next = rqc_step(psi, rng);
    CHECK(std::abs(next.norm() - 1.0) < 1e-12);
}

TEST_CASE("Floquet period map equals the dense product of exponentials") {
    Rng rng(18);
    std::mt19937_64 srng(18);
    const int L = 6;
    const auto s = build_sector_basis(L, 3);
    const Basis b = Basis::sector(s);
    const auto [H0, H1] = build_floquet_parts(L, sample_disorder(5.0, std::nullopt, L, rng), b);
    const FloquetMap map = make_floquet_map(H0, diagonalize(H1), 1.0, 2.5);
    const Eigen::MatrixXcd F = (Complex(0, -1.0) * H0.to_dense()).exp() * (Complex(0, -2.5) * H1.to_dense()).exp();

    StateVector psi = random_state(b, srng);
    const Eigen::VectorXcd expected = F * psi.amplitudes;
    floquet_step(psi, map);
    CHECK((psi.amplitudes - expected).norm() < 1e-8);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-10);

    const FloquetSpectrum spec = materialize_floquet_unitary(map);
    CHECK((spec.unitary - F).norm() < 1e-8);
    const auto n = spec.unitary.rows();
    CHECK((spec.unitary.adjoint() * spec.unitary - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-8);
    for (Eigen::Index k = 0; k < n; ++k) {
        CHECK(std::abs(std::abs(spec.eigenvalues(k)) - 1.0) < 1e-8);
        CHECK(spec.quasienergies(k) >= -std::numbers::pi);
        CHECK(spec.quasienergies(k) < std::numbers::pi);
        if (k > 0) CHECK(spec.quasienergies(k - 1) <= spec.quasienergies(k));
    }

    const FloquetMap identity = make_floquet_map(H0, diagonalize(H1), 0.0, 0.0);
    StateVector phi = random_state(b, srng);
    const Eigen::VectorXcd before = phi.amplitudes;
    floquet_step(phi, identity);
    CHECK((phi.amplitudes - before).norm() < 1e-12);
}

TEST_CASE("Floquet quasienergies of a purely diagonal drive") {
    Rng rng(19);
    const int L = 6;
    const Basis b = Basis::sector(build_sector_basis(L, 3));
    const auto [H0, H1] = build_floquet_parts(L, sample_disorder(5.0, std::nullopt, L, rng), b);
    const double T0 = 1.0;
    const FloquetSpectrum spec = materialize_floquet_unitary(make_floquet_map(H0, diagonalize(H1), T0, 0.0));
    std::vector<double> expected;
    const Eigen::VectorXd diag = H0.diagonal();
    for (Eigen::Index k = 0; k < diag.size(); ++k) {
        double th = std::remainder(T0 * diag(k), 2 * std::numbers::pi);
        if (th >= std::numbers::pi) th -= 2 * std::numbers::pi;
        expected.push_back(th);
    }
    std::sort(expected.begin(), expected.end());
    for (std::size_t k = 0; k < expected.size(); ++k) CHECK(spec.quasienergies(k) == doctest::Approx(expected[k]).epsilon(1e-9));

    CHECK(quasienergy(Complex(-1, 0)) == doctest::Approx(-std::numbers::pi));
    CHECK(quasienergy(std::polar(1.0, -0.3)) == doctest::Approx(0.3));
    CHECK_THROWS_AS(materialize_floquet_unitary(make_floquet_map(H0, diagonalize(H1), T0, 0.0), 5), CapacityError);
}
