#include "entomo/experiment.hpp"

#include "entomo/errors.hpp"
#include "entomo/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#ifndef ENTOMO_VERSION
#define ENTOMO_VERSION "0.0.0"
#endif

namespace entomo {

std::string code_version() { return ENTOMO_VERSION; }

namespace {

/// Raw per-sample measurements, reduced in sample order afterwards.
struct SampleOutput {
    std::vector<std::vector<std::vector<double>>> entropy; // [slice][rep][time]
    std::vector<std::vector<double>> mutual_information;   // [time][j - 1]
    std::vector<double> half_chain;                        // [time]
    ConservationAudit audit;
};

struct RunContext {
    const ExperimentConfig &cfg;
    std::vector<RepresentativeSet> sets;
    std::shared_ptr<const SectorBasis> half_filling;
    std::shared_ptr<const Eigen::MatrixXcd> floquet_h1;
    TwoQubitGate gate;
};

void init_output(const RunContext &ctx, SampleOutput &out) {
    const std::size_t n_times = ctx.cfg.time_points.size();
    out.entropy.resize(ctx.sets.size());
    for (std::size_t s = 0; s < ctx.sets.size(); ++s)
        out.entropy[s].assign(ctx.sets[s].size(), std::vector<double>(n_times, 0.0));
    out.mutual_information.assign(n_times, std::vector<double>(static_cast<std::size_t>(ctx.cfg.L / 2), 0.0));
    out.half_chain.assign(n_times, 0.0);
}

void measure(const RunContext &ctx, const StateVector &psi, std::size_t ti, SampleOutput &out) {
    const int L = ctx.cfg.L;
    out.audit.max_norm_drift = std::max(out.audit.max_norm_drift, std::abs(psi.norm() - 1.0));
    if (is_u1_sector_protocol(ctx.cfg.protocol)) {
        out.audit.sector_checked = true;
        out.audit.max_out_of_sector_weight =
            std::max(out.audit.max_out_of_sector_weight, out_of_sector_weight(psi, L / 2));
    }
    for (std::size_t s = 0; s < ctx.sets.size(); ++s)
        for (std::size_t r = 0; r < ctx.sets[s].size(); ++r)
            out.entropy[s][r][ti] = entanglement_entropy(psi, ctx.sets[s].reps[r].mask);
    for (int j = 1; j <= L / 2; ++j) out.mutual_information[ti][j - 1] = mutual_information(psi, j);
    out.half_chain[ti] = entanglement_entropy(psi, half_chain_mask(L));
}

void record_energy(SampleOutput &out, double e0, double et, double norm_h) {
    const double drift = std::abs(et - e0);
    out.audit.energy_checked = true;
    out.audit.max_energy_drift = std::max(out.audit.max_energy_drift, drift);
    out.audit.max_relative_energy_drift =
        std::max(out.audit.max_relative_energy_drift, norm_h > 0.0 ? drift / norm_h : drift);
}

/// Evolves under one time-independent H, measuring at every configured time.
void evolve_and_measure(const RunContext &ctx, const SparseHermitianOperator &H, const StateVector &psi0,
                        SampleOutput &out) {
    const auto &cfg = ctx.cfg;
    const double e0 = H.expectation(psi0.amplitudes);
    if (cfg.propagator == Propagator::spectral) {
        const SpectralDecomposition d = diagonalize(H, cfg.diag_cap);
        const auto states = evolve_spectral(d, psi0, cfg.time_points);
        for (std::size_t ti = 0; ti < states.size(); ++ti) {
            record_energy(out, e0, H.expectation(states[ti].amplitudes), d.spectral_norm());
            measure(ctx, states[ti], ti, out);
        }
    } else {
        const double norm_h = H.norm_bound();
        for (std::size_t ti = 0; ti < cfg.time_points.size(); ++ti) {
            const StateVector psi = evolve_krylov(H, psi0, cfg.time_points[ti], cfg.krylov_tol);
            record_energy(out, e0, H.expectation(psi.amplitudes), norm_h);
            measure(ctx, psi, ti, out);
        }
    }
}

/// H_NN conserves Sz, so a full-space product state is propagated sector by sector.
void evolve_sectorwise_and_measure(const RunContext &ctx, const DisorderRealization &disorder,
                                   const StateVector &psi0, SampleOutput &out) {
    const auto &cfg = ctx.cfg;
    const int L = cfg.L;
    const SparseHermitianOperator h_full = build_h_nn(L, cfg.params, disorder, Basis::full(L));
    if (cfg.propagator == Propagator::krylov) {
        evolve_and_measure(ctx, h_full, psi0, out);
        return;
    }
    const std::size_t n_times = cfg.time_points.size();
    std::vector<StateVector> states(n_times, StateVector{Basis::full(L), Eigen::VectorXcd::Zero(Eigen::Index{1} << L)});
    double norm_h = 0.0;
    for (int n_up = 0; n_up <= L; ++n_up) {
        auto sector = build_sector_basis(L, n_up);
        const StateVector part = project_to_sector(psi0, sector);
        if (part.amplitudes.squaredNorm() == 0.0) continue;
        const SparseHermitianOperator h = build_h_nn(L, cfg.params, disorder, Basis::sector(sector));
        const SpectralDecomposition d = diagonalize(h, cfg.diag_cap);
        norm_h = std::max(norm_h, d.spectral_norm());
        const auto evolved = evolve_spectral(d, part, cfg.time_points);
        for (std::size_t ti = 0; ti < n_times; ++ti)
            for (std::size_t k = 0; k < sector->size(); ++k)
                states[ti].amplitudes(sector->state(k)) = evolved[ti].amplitudes(static_cast<Eigen::Index>(k));
    }
    const double e0 = h_full.expectation(psi0.amplitudes);
    for (std::size_t ti = 0; ti < n_times; ++ti) {
        record_energy(out, e0, h_full.expectation(states[ti].amplitudes), norm_h);
        measure(ctx, states[ti], ti, out);
    }
}

/// Applies `advance` (one gate or one period) until each requested step count, measuring on the way.
template <class Advance>
void step_and_measure(const RunContext &ctx, StateVector psi, Advance &&advance, SampleOutput &out) {
    const auto &times = ctx.cfg.time_points;
    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
    long done = 0;
    for (std::size_t ti : order) {
        const auto target = static_cast<long>(times[ti]);
        for (; done < target; ++done) advance(psi);
        measure(ctx, psi, ti, out);
    }
}

SampleOutput run_sample(const RunContext &ctx, std::uint64_t seed) {
    const auto &cfg = ctx.cfg;
    const int L = cfg.L;
    Rng rng = stream_from_seed(seed);
    SampleOutput out;
    init_output(ctx, out);
    const Basis sector = Basis::sector(ctx.half_filling);

    switch (cfg.protocol) {
    case Protocol::nn_thermal:
    case Protocol::mbl:
    case Protocol::nnn_thermal: {
        const DisorderRealization disorder = sample_disorder(cfg.params.W, std::nullopt, L, rng);
        const StateVector psi0 = sample_basis_state(ctx.half_filling, rng);
        const SparseHermitianOperator H = cfg.protocol == Protocol::nnn_thermal
                                              ? build_h_nnn(L, cfg.params, disorder, sector)
                                              : build_h_nn(L, cfg.params, disorder, sector);
        evolve_and_measure(ctx, H, psi0, out);
        break;
    }
    case Protocol::nn_random_product: {
        const DisorderRealization disorder = sample_disorder(cfg.params.W, std::nullopt, L, rng);
        const StateVector psi0 = sample_random_product_state(L, rng);
        evolve_sectorwise_and_measure(ctx, disorder, psi0, out);
        break;
    }
    case Protocol::mixed_field: {
        const DisorderRealization disorder = sample_disorder(cfg.params.W, cfg.params.W_g, L, rng);
        const StateVector psi0 = sample_random_product_state(L, rng);
        evolve_and_measure(ctx, build_h_mf(L, cfg.params, disorder, Basis::full(L)), psi0, out);
        break;
    }
    case Protocol::rqc: {
        StateVector psi0 = sample_basis_state(ctx.half_filling, rng);
        step_and_measure(ctx, std::move(psi0), [&](StateVector &psi) { rqc_step(psi, ctx.gate, rng); }, out);
        break;
    }
    case Protocol::floquet: {
        const DisorderRealization disorder = sample_disorder(cfg.params.W, std::nullopt, L, rng);
        StateVector psi0 = sample_basis_state(ctx.half_filling, rng);
        const auto parts = build_floquet_parts(L, disorder, sector);
        const FloquetMap map = make_floquet_map(parts.first, ctx.floquet_h1, cfg.T0, cfg.T1);
        step_and_measure(ctx, std::move(psi0), [&](StateVector &psi) { floquet_step(psi, map); }, out);
        break;
    }
    }
    return out;
}

/// Runs `task(i)` for i in [0, n) on `threads` workers, rethrowing the first failure.
template <class Task> void parallel_for(std::size_t n, int threads, Task &&task) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
            }
        }
    };
    const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n));
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto &t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::shared_ptr<const Eigen::MatrixXcd> floquet_h1_propagator(const ExperimentConfig &cfg,
                                                              const std::shared_ptr<const SectorBasis> &sector) {
    // H1 carries no disorder, so any realization gives the same operator.
    const DisorderRealization none{std::vector<double>(static_cast<std::size_t>(cfg.L), 0.0), {}};
    const auto parts = build_floquet_parts(cfg.L, none, Basis::sector(sector));
    return std::make_shared<const Eigen::MatrixXcd>(dense_propagator(diagonalize(parts.second, cfg.diag_cap), cfg.T1));
}

} // namespace

RunResult run_protocol(const ExperimentConfig &cfg) {
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    result.config = cfg;
    result.times = cfg.time_points;
    result.started_at = utc_timestamp();

    RunContext ctx{cfg, {}, build_sector_basis(cfg.L, cfg.L / 2), nullptr, build_two_qubit_gate()};
    for (int n0 : cfg.subsystem_sizes()) ctx.sets.push_back(enumerate_representatives(cfg.L, n0));
    if (cfg.protocol == Protocol::floquet) ctx.floquet_h1 = floquet_h1_propagator(cfg, ctx.half_filling);

    const auto n = static_cast<std::size_t>(cfg.n_samples);
    result.sample_seeds.resize(n);
    for (std::size_t s = 0; s < n; ++s) result.sample_seeds[s] = sample_seed(cfg.master_seed, s);

    std::vector<SampleOutput> outputs(n);
    parallel_for(n, cfg.threads, [&](std::size_t s) { outputs[s] = run_sample(ctx, result.sample_seeds[s]); });

    // Ordered reduction over sample index.
    const std::size_t n_times = cfg.time_points.size();
    std::vector<double> column(n);
    auto reduce = [&](auto &&pick) {
        for (std::size_t s = 0; s < n; ++s) column[s] = pick(outputs[s]);
        return mean_with_error(column);
    };
    for (std::size_t si = 0; si < ctx.sets.size(); ++si) {
        SliceRecords slice;
        slice.n0 = ctx.sets[si].n0;
        for (std::size_t r = 0; r < ctx.sets[si].size(); ++r) {
            ResultRecord rec{ctx.sets[si].reps[r].mask, ctx.sets[si].geometry[r], {}};
            for (std::size_t ti = 0; ti < n_times; ++ti)
                rec.entropy.push_back(reduce([&](const SampleOutput &o) { return o.entropy[si][r][ti]; }));
            slice.records.push_back(std::move(rec));
        }
        result.slices.push_back(std::move(slice));
    }
    for (std::size_t ti = 0; ti < n_times; ++ti) {
        std::vector<MeanWithError> row;
        for (int j = 0; j < cfg.L / 2; ++j)
            row.push_back(reduce([&](const SampleOutput &o) { return o.mutual_information[ti][j]; }));
        result.mutual_information.push_back(std::move(row));
        result.half_chain.push_back(reduce([&](const SampleOutput &o) { return o.half_chain[ti]; }));
    }
    for (const auto &o : outputs) {
        auto &a = result.audit;
        a.max_norm_drift = std::max(a.max_norm_drift, o.audit.max_norm_drift);
        a.max_energy_drift = std::max(a.max_energy_drift, o.audit.max_energy_drift);
        a.max_relative_energy_drift = std::max(a.max_relative_energy_drift, o.audit.max_relative_energy_drift);
        a.max_out_of_sector_weight = std::max(a.max_out_of_sector_weight, o.audit.max_out_of_sector_weight);
        a.energy_checked |= o.audit.energy_checked;
        a.sector_checked |= o.audit.sector_checked;
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::vector<SliceFit> run_tomography(int L, const std::vector<double> &times, const std::vector<SliceRecords> &slices) {
    std::vector<SliceFit> fits;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        for (const auto &slice : slices) {
            if (slice.records.empty()) throw ParameterError("slice has no records");
            RepresentativeSet set;
            set.L = L;
            set.n0 = slice.n0;
            std::vector<double> y;
            for (const auto &rec : slice.records) {
                if (rec.entropy.size() != times.size()) throw ParameterError("record is missing time points");
                set.reps.push_back({rec.mask, slice.n0});
                set.geometry.push_back(rec.geometry);
                y.push_back(rec.entropy[ti].mean);
            }
            SliceFit f{L, slice.n0, times[ti], fit_bond_tensions(build_design_matrix(set), y), 0.0};
            f.hierarchy = f.fit.omega.empty() ? 0.0 : hierarchy_ratio(f.fit);
            fits.push_back(std::move(f));
        }
    }
    return fits;
}

std::vector<SliceFit> run_tomography(const RunResult &run) {
    return run_tomography(run.config.L, run.times, run.slices);
}

SpectralResult run_spectral_diagnostics(const ExperimentConfig &cfg) {
    validate(cfg);
    if (cfg.protocol == Protocol::rqc) throw ParameterError("level statistics need a Hamiltonian or Floquet protocol");
    const int L = cfg.L;
    const auto half = build_sector_basis(L, L / 2);
    std::shared_ptr<const Eigen::MatrixXcd> h1;
    if (cfg.protocol == Protocol::floquet) h1 = floquet_h1_propagator(cfg, half);

    SpectralResult result;
    result.config = cfg;
    const auto n = static_cast<std::size_t>(cfg.n_samples);
    std::vector<RatioStats> parts(n);
    result.realizations.resize(n);
    parallel_for(n, cfg.threads, [&](std::size_t s) {
        const std::uint64_t seed = sample_seed(cfg.master_seed, s);
        // Same stream layout as run_protocol: the disorder is the first draw.
        Rng rng = stream_from_seed(seed);
        std::vector<double> levels;
        switch (cfg.protocol) {
        case Protocol::floquet: {
            const auto disorder = sample_disorder(cfg.params.W, std::nullopt, L, rng);
            const auto parts0 = build_floquet_parts(L, disorder, Basis::sector(half));
            const auto spectrum = materialize_floquet_unitary(make_floquet_map(parts0.first, h1, cfg.T0, cfg.T1), cfg.diag_cap);
            levels.assign(spectrum.quasienergies.data(), spectrum.quasienergies.data() + spectrum.quasienergies.size());
            break;
        }
        case Protocol::mixed_field: {
            const auto disorder = sample_disorder(cfg.params.W, cfg.params.W_g, L, rng);
            const Eigen::VectorXd ev = eigenvalues(build_h_mf(L, cfg.params, disorder, Basis::full(L)), cfg.diag_cap);
            levels = middle_third({ev.data(), static_cast<std::size_t>(ev.size())});
            break;
        }
        default: {
            const auto disorder = sample_disorder(cfg.params.W, std::nullopt, L, rng);
            const auto H = cfg.protocol == Protocol::nnn_thermal ? build_h_nnn(L, cfg.params, disorder, Basis::sector(half))
                                                                 : build_h_nn(L, cfg.params, disorder, Basis::sector(half));
            const Eigen::VectorXd ev = eigenvalues(H, cfg.diag_cap);
            levels = middle_third({ev.data(), static_cast<std::size_t>(ev.size())});
            break;
        }
        }
        parts[s] = level_spacing_ratios(levels);
        result.realizations[s] = {seed, parts[s].mean_r, parts[s].ratios.size()};
    });
    result.aggregate = pool_ratios(parts);
    return result;
}

} // namespace entomo
