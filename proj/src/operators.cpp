#include "entomo/operators.hpp"

#include "entomo/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <string>

namespace entomo {

DisorderRealization sample_disorder(double W, std::optional<double> W_g, int L, Rng &rng) {
    if (!(W >= 0.0)) throw ParameterError("disorder strength W must be >= 0");
    if (W_g && !(*W_g >= 0.0)) throw ParameterError("transverse disorder strength must be >= 0");
    DisorderRealization d;
    d.h.resize(L);
    std::uniform_real_distribution<double> uh(-W, W);
    for (auto &x : d.h) x = W == 0.0 ? 0.0 : uh(rng);
    if (W_g) {
        d.g.resize(L);
        std::uniform_real_distribution<double> ug(-*W_g, *W_g);
        for (auto &x : d.g) x = *W_g == 0.0 ? 0.0 : ug(rng);
    }
    return d;
}

SparseHermitianOperator::SparseHermitianOperator(Basis basis, std::vector<MatrixEntry> upper)
    : basis_(std::move(basis)), entries_(std::move(upper)) {
    const Eigen::Index n = dim();
    std::sort(entries_.begin(), entries_.end(), [](const MatrixEntry &a, const MatrixEntry &b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const auto &e = entries_[k];
        if (e.row < 0 || e.col >= n || e.row > e.col)
            throw ParameterError("operator entry outside the stored upper triangle");
        if (e.row == e.col && e.value.imag() != 0.0)
            throw ParameterError("diagonal entry of a Hermitian operator must be real");
        if (k > 0 && entries_[k - 1].row == e.row && entries_[k - 1].col == e.col)
            throw ParameterError("duplicate operator entry");
        if (e.value.imag() != 0.0) real_ = false;
    }
}

Complex SparseHermitianOperator::element(Eigen::Index row, Eigen::Index col) const {
    const bool swap = row > col;
    const Eigen::Index r = swap ? col : row, c = swap ? row : col;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{r, c},
                               [](const MatrixEntry &e, const std::pair<Eigen::Index, Eigen::Index> &key) {
                                   return e.row != key.first ? e.row < key.first : e.col < key.second;
                               });
    if (it == entries_.end() || it->row != r || it->col != c) return 0.0;
    return swap ? std::conj(it->value) : it->value;
}

Eigen::VectorXd SparseHermitianOperator::diagonal() const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(dim());
    for (const auto &e : entries_)
        if (e.row == e.col) d(e.row) = e.value.real();
    return d;
}

bool SparseHermitianOperator::is_diagonal() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(), [](const MatrixEntry &e) { return e.row == e.col; });
}

Eigen::VectorXcd SparseHermitianOperator::apply(const Eigen::VectorXcd &v) const {
    if (v.size() != dim()) throw BasisMismatch("vector dimension does not match operator");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim());
    for (const auto &e : entries_) {
        out(e.row) += e.value * v(e.col);
        if (e.row != e.col) out(e.col) += std::conj(e.value) * v(e.row);
    }
    return out;
}

Eigen::MatrixXcd SparseHermitianOperator::to_dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim(), dim());
    for (const auto &e : entries_) {
        m(e.row, e.col) = e.value;
        m(e.col, e.row) = std::conj(e.value);
    }
    return m;
}

double SparseHermitianOperator::norm_bound() const {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(dim());
    for (const auto &e : entries_) {
        rows(e.row) += std::abs(e.value);
        if (e.row != e.col) rows(e.col) += std::abs(e.value);
    }
    return dim() == 0 ? 0.0 : rows.maxCoeff();
}

double SparseHermitianOperator::expectation(const Eigen::VectorXcd &v) const {
    return v.dot(apply(v)).real();
}

namespace {

/// Accumulates matrix elements keyed by (row, col), keeping row <= col.
class TermAccumulator {
  public:
    explicit TermAccumulator(Basis basis) : basis_(std::move(basis)), diag_(basis_.dim(), 0.0) {}

    const Basis &basis() const { return basis_; }
    void add_diagonal(std::size_t k, double v) { diag_[k] += v; }
    void add_offdiagonal(Eigen::Index a, Eigen::Index b, Complex v) {
        if (a < b) off_[{a, b}] += v;
    }

    SparseHermitianOperator finish() && {
        std::vector<MatrixEntry> entries;
        entries.reserve(off_.size() + diag_.size());
        for (std::size_t k = 0; k < diag_.size(); ++k)
            if (diag_[k] != 0.0) entries.push_back({Eigen::Index(k), Eigen::Index(k), diag_[k]});
        for (const auto &[key, v] : off_)
            if (v != Complex{}) entries.push_back({key.first, key.second, v});
        return {basis_, std::move(entries)};
    }

  private:
    Basis basis_;
    std::vector<double> diag_;
    std::map<std::pair<Eigen::Index, Eigen::Index>, Complex> off_;
};

double sz(Mask m, int site) { return (m >> site) & 1u ? 0.5 : -0.5; }

/// coupling * sum_i (Sx_i Sx_{i+d} + Sy_i Sy_{i+d} + Jz Sz_i Sz_{i+d}), i = 0..L-1.
void add_xxz_bonds(TermAccumulator &acc, int L, int distance, double coupling, double Jz) {
    const Basis &basis = acc.basis();
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        const Mask m = basis.mask(k);
        for (int i = 0; i < L; ++i) {
            const int j = (i + distance) % L;
            acc.add_diagonal(k, coupling * Jz * sz(m, i) * sz(m, j));
            if (((m >> i) ^ (m >> j)) & 1u) {
                // (S+S- + S-S+)/2 swaps antiparallel spins with amplitude 1/2.
                const long target = basis.find(m ^ ((Mask{1} << i) | (Mask{1} << j)));
                acc.add_offdiagonal(Eigen::Index(k), target, 0.5 * coupling);
            }
        }
    }
}

void add_longitudinal_fields(TermAccumulator &acc, std::span<const double> h) {
    const Basis &basis = acc.basis();
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        const Mask m = basis.mask(k);
        double v = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) v += h[i] * sz(m, static_cast<int>(i));
        acc.add_diagonal(k, v);
    }
}

void add_transverse_fields(TermAccumulator &acc, std::span<const double> g) {
    const Basis &basis = acc.basis();
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        const Mask m = basis.mask(k);
        for (std::size_t i = 0; i < g.size(); ++i)
            acc.add_offdiagonal(Eigen::Index(k), basis.find(m ^ (Mask{1} << i)), 0.5 * g[i]);
    }
}

void check_model_inputs(int L, const DisorderRealization &disorder, const Basis &basis, int min_L) {
    check_chain_length(L);
    if (L < min_L) throw ParameterError("model requires L >= " + std::to_string(min_L));
    if (basis.L() != L) throw BasisMismatch("basis chain length differs from operator chain length");
    if (static_cast<int>(disorder.h.size()) != L)
        throw ParameterError("disorder realization has " + std::to_string(disorder.h.size()) +
                             " fields for L = " + std::to_string(L));
}

} // namespace

SparseHermitianOperator build_h_nn(int L, const CouplingParams &params, const DisorderRealization &disorder,
                                   const Basis &basis) {
    check_model_inputs(L, disorder, basis, 4);
    TermAccumulator acc(basis);
    add_xxz_bonds(acc, L, 1, 1.0, params.Jz);
    add_longitudinal_fields(acc, disorder.h);
    return std::move(acc).finish();
}

SparseHermitianOperator build_h_nnn(int L, const CouplingParams &params, const DisorderRealization &disorder,
                                    const Basis &basis) {
    // Distance-2 bonds double count at L = 4.
    check_model_inputs(L, disorder, basis, 6);
    TermAccumulator acc(basis);
    add_xxz_bonds(acc, L, 1, 1.0, params.Jz);
    add_xxz_bonds(acc, L, 2, params.gamma, params.Jz);
    add_longitudinal_fields(acc, disorder.h);
    return std::move(acc).finish();
}

SparseHermitianOperator build_h_mf(int L, const CouplingParams &params, const DisorderRealization &disorder,
                                   const Basis &basis) {
    check_model_inputs(L, disorder, basis, 4);
    if (!basis.is_full()) throw BasisMismatch("transverse field leaves any magnetization sector; use the full basis");
    if (static_cast<int>(disorder.g.size()) != L) throw ParameterError("mixed-field model needs L transverse fields");
    TermAccumulator acc(basis);
    add_xxz_bonds(acc, L, 1, 1.0, params.Jz);
    add_longitudinal_fields(acc, disorder.h);
    add_transverse_fields(acc, disorder.g);
    return std::move(acc).finish();
}

std::pair<SparseHermitianOperator, SparseHermitianOperator>
build_floquet_parts(int L, const DisorderRealization &disorder, const Basis &basis) {
    check_model_inputs(L, disorder, basis, 4);
    TermAccumulator h0(basis);
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        const Mask m = basis.mask(k);
        for (int i = 0; i < L; ++i) h0.add_diagonal(k, sz(m, i) * sz(m, (i + 1) % L));
    }
    add_longitudinal_fields(h0, disorder.h);

    TermAccumulator h1(basis);
    add_xxz_bonds(h1, L, 1, 1.0, 0.0);
    return {std::move(h0).finish(), std::move(h1).finish()};
}

bool conserves_magnetization(const SparseHermitianOperator &op) {
    const Basis &b = op.basis();
    return std::all_of(op.entries().begin(), op.entries().end(), [&](const MatrixEntry &e) {
        return std::popcount(b.mask(e.row)) == std::popcount(b.mask(e.col));
    });
}

} // namespace entomo
