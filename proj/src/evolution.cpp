#include "entomo/evolution.hpp"

#include "entomo/errors.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace entomo {

namespace {

void check_cap(const SparseHermitianOperator &H, long cap, const char *what) {
    if (H.dim() > cap) throw CapacityError(what, H.dim(), cap);
}

/// Symmetric/Hermitian dense eigensolve. `want_vectors` selects jobz = 'V'.
void dense_eigensolve(const SparseHermitianOperator &H, bool want_vectors, Eigen::VectorXd &values,
                      Eigen::MatrixXcd *vectors) {
    const lapack_int n = static_cast<lapack_int>(H.dim());
    values.resize(n);
    if (n == 0) {
        if (vectors) vectors->resize(0, 0);
        return;
    }
    const char jobz = want_vectors ? 'V' : 'N';
    lapack_int info = 0;
    if (H.is_real()) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (const auto &e : H.entries()) a(e.row, e.col) = e.value.real();
        info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'U', n, a.data(), n, values.data());
        if (info == 0 && vectors) *vectors = a.cast<Complex>();
    } else {
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
        for (const auto &e : H.entries()) a(e.row, e.col) = e.value;
        info = LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'U', n, a.data(), n, values.data());
        if (info == 0 && vectors) *vectors = std::move(a);
    }
    if (info != 0) throw ConvergenceError("dense eigensolver failed, LAPACK info", static_cast<double>(info));
}

Complex phase_factor(double energy, double t) {
    // Reduce E t modulo 2 pi in extended precision before exponentiating.
    constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const long double phase = std::fmod(static_cast<long double>(energy) * static_cast<long double>(t), two_pi);
    return std::polar(1.0, -static_cast<double>(phase));
}

} // namespace

SpectralDecomposition diagonalize(const SparseHermitianOperator &H, long cap) {
    check_cap(H, cap, "diagonalize");
    SpectralDecomposition d{H.basis(), {}, {}};
    dense_eigensolve(H, true, d.eigenvalues, &d.eigenvectors);
    return d;
}

Eigen::VectorXd eigenvalues(const SparseHermitianOperator &H, long cap) {
    check_cap(H, cap, "eigenvalues");
    Eigen::VectorXd values;
    dense_eigensolve(H, false, values, nullptr);
    return values;
}

std::vector<StateVector> evolve_spectral(const SpectralDecomposition &d, const StateVector &psi0,
                                         std::span<const double> times) {
    if (!(psi0.basis == d.basis)) throw BasisMismatch("state and decomposition bases differ");
    const Eigen::VectorXcd coeffs = d.eigenvectors.adjoint() * psi0.amplitudes;
    std::vector<StateVector> out;
    out.reserve(times.size());
    for (double t : times) {
        if (t == 0.0) {
            out.push_back(psi0);
            continue;
        }
        Eigen::VectorXcd rotated(coeffs.size());
        for (Eigen::Index k = 0; k < coeffs.size(); ++k) rotated(k) = phase_factor(d.eigenvalues(k), t) * coeffs(k);
        out.push_back({psi0.basis, d.eigenvectors * rotated});
    }
    return out;
}

StateVector evolve_spectral(const SpectralDecomposition &d, const StateVector &psi0, double t) {
    return std::move(evolve_spectral(d, psi0, std::span<const double>(&t, 1)).front());
}

namespace {

struct LanczosBasis {
    Eigen::MatrixXcd vectors;   // columns span the Krylov space
    Eigen::VectorXd ritz;       // eigenvalues of the tridiagonal projection
    Eigen::MatrixXd rotation;   // its eigenvectors
    double residual_coupling;   // beta_m; zero on invariant-subspace breakdown
};

LanczosBasis lanczos(const SparseHermitianOperator &H, const Eigen::VectorXcd &start, int max_dim, double scale) {
    const Eigen::Index n = start.size();
    const int m_max = static_cast<int>(std::min<Eigen::Index>(max_dim, n));
    Eigen::MatrixXcd v(n, m_max);
    std::vector<double> alpha, beta;
    v.col(0) = start;
    double coupling = 0.0;
    int m = 0;
    for (int j = 0; j < m_max; ++j) {
        Eigen::VectorXcd w = H.apply(v.col(j));
        alpha.push_back(v.col(j).dot(w).real());
        // Full reorthogonalization, twice.
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i <= j; ++i) w -= v.col(i).dot(w) * v.col(i);
        const double b = w.norm();
        m = j + 1;
        if (b <= 1e-13 * std::max(scale, 1.0)) {
            coupling = 0.0;
            break;
        }
        if (j == m_max - 1) {
            // Exhausting the space makes the projection exact.
            coupling = m_max == n ? 0.0 : b;
            break;
        }
        beta.push_back(b);
        v.col(j + 1) = w / b;
    }
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) t(j, j) = alpha[j];
    for (int j = 0; j + 1 < m; ++j) t(j, j + 1) = t(j + 1, j) = beta[j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    return {v.leftCols(m), es.eigenvalues(), es.eigenvectors(), coupling};
}

Eigen::VectorXcd small_propagator_column(const LanczosBasis &lb, double dt) {
    Eigen::VectorXcd y(lb.ritz.size());
    for (Eigen::Index k = 0; k < y.size(); ++k) y(k) = std::polar(1.0, -lb.ritz(k) * dt) * lb.rotation(0, k);
    return lb.rotation.cast<Complex>() * y;
}

/// Adaptive Lanczos propagation; `max_step` bounds every substep. Returns the largest step taken.
double krylov_propagate(const SparseHermitianOperator &H, Eigen::VectorXcd &psi, double t, double tol,
                        double max_step) {
    constexpr int kKrylovDim = 30;
    const double scale = H.norm_bound();
    const double total = std::abs(t);
    const double sign = t < 0 ? -1.0 : 1.0;
    double done = 0.0, trial = std::min(total, max_step), largest = 0.0;
    while (done < total) {
        const double nrm = psi.norm();
        if (nrm == 0.0) break;
        const LanczosBasis lb = lanczos(H, psi / nrm, kKrylovDim, scale);
        double dt = std::min(trial, total - done);
        for (;;) {
            const Eigen::VectorXcd col = small_propagator_column(lb, sign * dt);
            const double err = lb.residual_coupling * std::abs(col(col.size() - 1));
            if (err <= tol * dt / total || dt < 1e-12 * total) {
                psi = nrm * (lb.vectors * col);
                break;
            }
            dt *= 0.5;
        }
        done += dt;
        largest = std::max(largest, dt);
        trial = std::min(1.5 * dt, max_step);
    }
    return largest;
}

} // namespace

StateVector evolve_krylov(const SparseHermitianOperator &H, const StateVector &psi0, double t, double tol) {
    if (!(psi0.basis == H.basis())) throw BasisMismatch("state and operator bases differ");
    if (!(tol > 0.0)) throw ParameterError("Krylov tolerance must be positive");
    if (t == 0.0) return psi0;

    Eigen::VectorXcd coarse = psi0.amplitudes;
    double step = krylov_propagate(H, coarse, t, tol / 4, std::abs(t));
    double diff = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::VectorXcd fine = psi0.amplitudes;
        const double fine_step = krylov_propagate(H, fine, t, tol / 4, step / 2);
        diff = (fine - coarse).norm();
        if (diff <= tol) return {psi0.basis, std::move(fine)};
        coarse = std::move(fine);
        step = fine_step;
    }
    throw ConvergenceError("Krylov propagation did not converge under step halving", diff);
}

TwoQubitGate build_two_qubit_gate() {
    using namespace std::complex_literals;
    const double pi = std::numbers::pi;
    // Sz Sz = +1/4 on aligned and -1/4 on antiparallel pairs.
    const Complex aligned = std::polar(1.0, -pi / 4), anti = std::polar(1.0, pi / 4);
    // SxSx + SySy acts as sigma_x / 2 on {up-down, down-up}, zero elsewhere:
    // exp(-i pi/4 sigma_x) = (1 - i sigma_x) / sqrt 2.
    const double c = std::cos(pi / 4), s = std::sin(pi / 4);
    TwoQubitGate g;
    g.u.setZero();
    g.u(0, 0) = aligned;
    g.u(3, 3) = aligned;
    g.u(1, 1) = c * anti;
    g.u(2, 2) = c * anti;
    g.u(1, 2) = -1i * s * anti;
    g.u(2, 1) = -1i * s * anti;
    return g;
}

namespace {

int local_index(Mask m, Mask bit_a, Mask bit_b) {
    return ((m & bit_a) ? 0 : 2) + ((m & bit_b) ? 0 : 1);
}

bool magnetization_block_diagonal(const Eigen::Matrix4cd &u) {
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            const bool same_block = r == c || (r + c == 3 && r != 0 && r != 3);
            if (!same_block && u(r, c) != Complex{}) return false;
        }
    return true;
}

} // namespace

void apply_two_qubit_gate(StateVector &psi, const TwoQubitGate &gate, int site_a, int site_b) {
    const int L = psi.L();
    if (site_a < 0 || site_b < 0 || site_a >= L || site_b >= L || site_a == site_b)
        throw ParameterError("gate sites must be distinct sites of the chain");
    const Mask bit_a = Mask{1} << site_a, bit_b = Mask{1} << site_b;
    auto &amp = psi.amplitudes;
    const auto &u = gate.u;

    if (psi.basis.is_full()) {
        const Mask dim = Mask{1} << L;
        for (Mask base = 0; base < dim; ++base) {
            if (base & (bit_a | bit_b)) continue;
            const Mask idx[4] = {base | bit_a | bit_b, base | bit_a, base | bit_b, base};
            Complex in[4];
            for (int k = 0; k < 4; ++k) in[k] = amp(idx[k]);
            for (int r = 0; r < 4; ++r) amp(idx[r]) = u(r, 0) * in[0] + u(r, 1) * in[1] + u(r, 2) * in[2] + u(r, 3) * in[3];
        }
        return;
    }

    if (!magnetization_block_diagonal(u)) throw BasisMismatch("gate mixes magnetization sectors");
    const auto &sector = *psi.basis.sector_basis();
    for (std::size_t k = 0; k < sector.size(); ++k) {
        const Mask m = sector.state(k);
        const int l = local_index(m, bit_a, bit_b);
        const auto ek = static_cast<Eigen::Index>(k);
        if (l == 0 || l == 3) {
            amp(ek) *= u(l, l);
        } else if (l == 1) {
            const auto partner = static_cast<Eigen::Index>(sector.find(m ^ (bit_a | bit_b)));
            const Complex x = amp(ek), y = amp(partner);
            amp(ek) = u(1, 1) * x + u(1, 2) * y;
            amp(partner) = u(2, 1) * x + u(2, 2) * y;
        }
    }
}

int rqc_step(StateVector &psi, const TwoQubitGate &gate, Rng &rng) {
    const int L = psi.L();
    std::uniform_int_distribution<int> pick(0, L - 1);
    const int i = pick(rng);
    apply_two_qubit_gate(psi, gate, i, (i + 1) % L);
    return i;
}

StateVector rqc_step(const StateVector &psi, Rng &rng) {
    static const TwoQubitGate gate = build_two_qubit_gate();
    StateVector out = psi;
    rqc_step(out, gate, rng);
    return out;
}

Eigen::MatrixXcd dense_propagator(const SpectralDecomposition &d, double t) {
    Eigen::VectorXcd phases(d.eigenvalues.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = phase_factor(d.eigenvalues(k), t);
    return d.eigenvectors * phases.asDiagonal() * d.eigenvectors.adjoint();
}

FloquetMap make_floquet_map(const SparseHermitianOperator &H0, std::shared_ptr<const Eigen::MatrixXcd> h1_propagator,
                            double T0, double T1) {
    if (!H0.is_diagonal()) throw ParameterError("Floquet H0 must be diagonal in the computational basis");
    if (!h1_propagator || h1_propagator->rows() != H0.dim() || h1_propagator->cols() != H0.dim())
        throw BasisMismatch("H1 propagator dimension differs from H0");
    return {T0, T1, H0.basis(), H0.diagonal(), std::move(h1_propagator)};
}

FloquetMap make_floquet_map(const SparseHermitianOperator &H0, const SpectralDecomposition &h1, double T0,
                            double T1) {
    if (!(h1.basis == H0.basis())) throw BasisMismatch("H0 and H1 bases differ");
    return make_floquet_map(H0, std::make_shared<const Eigen::MatrixXcd>(dense_propagator(h1, T1)), T0, T1);
}

void floquet_step(StateVector &psi, const FloquetMap &map) {
    if (!(psi.basis == map.basis)) throw BasisMismatch("state and Floquet map bases differ");
    psi.amplitudes = (*map.h1_propagator) * psi.amplitudes;
    for (Eigen::Index k = 0; k < psi.amplitudes.size(); ++k)
        psi.amplitudes(k) *= phase_factor(map.h0_diagonal(k), map.T0);
}

double quasienergy(Complex eigenvalue) {
    double theta = -std::arg(eigenvalue);
    if (theta >= std::numbers::pi) theta -= 2 * std::numbers::pi;
    return theta;
}

FloquetSpectrum materialize_floquet_unitary(const FloquetMap &map, long cap) {
    const auto n = static_cast<Eigen::Index>(map.basis.dim());
    if (n > cap) throw CapacityError("materialize_floquet_unitary", n, cap);
    Eigen::VectorXcd phase0(n);
    for (Eigen::Index k = 0; k < n; ++k) phase0(k) = phase_factor(map.h0_diagonal(k), map.T0);

    FloquetSpectrum out;
    out.unitary = phase0.asDiagonal() * (*map.h1_propagator);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(out.unitary, false);
    if (es.info() != Eigen::Success) throw ConvergenceError("Floquet eigensolver failed", 0.0);
    out.eigenvalues = es.eigenvalues();
    std::vector<double> theta(n);
    for (Eigen::Index k = 0; k < n; ++k) theta[k] = quasienergy(out.eigenvalues(k));
    std::sort(theta.begin(), theta.end());
    out.quasienergies = Eigen::Map<Eigen::VectorXd>(theta.data(), n);
    return out;
}

} // namespace entomo
