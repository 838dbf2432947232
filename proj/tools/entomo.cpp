#include "entomo/errors.hpp"
#include "entomo/experiment.hpp"
#include "entomo/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

using namespace entomo;
namespace fs = std::filesystem;

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
    std::optional<std::string> out;
    std::optional<int> threads;
    std::optional<std::string> protocol;
    std::optional<int> L;
};

void add_common(CLI::App *cmd, CommonFlags &f) {
    cmd->add_option("--config", f.config, "key = value configuration file");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--samples", f.samples, "ensemble size");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--threads", f.threads, "worker threads");
    cmd->add_option("--protocol", f.protocol, "protocol (overrides the config file)");
    cmd->add_option("-L,--length", f.L, "chain length (overrides the config file)");
}

ExperimentConfig resolve(const CommonFlags &f) {
    ExperimentConfig cfg = f.config.empty() ? default_config(Protocol::nn_thermal) : load_config(f.config);
    if (f.protocol) {
        const auto keep = cfg;
        cfg = default_config(parse_protocol(*f.protocol));
        cfg.L = keep.L;
        cfg.n0_list = keep.n0_list;
        cfg.n_samples = keep.n_samples;
        cfg.master_seed = keep.master_seed;
        cfg.output_dir = keep.output_dir;
        cfg.threads = keep.threads;
    }
    if (f.L) {
        const bool default_times = cfg.time_points == default_config(cfg.protocol).time_points;
        cfg.L = *f.L;
        if (default_times && cfg.protocol == Protocol::rqc) cfg.time_points = {std::ceil(1000.0 * cfg.L / 16.0)};
    }
    if (f.seed) cfg.master_seed = *f.seed;
    if (f.samples) cfg.n_samples = *f.samples;
    if (f.out) cfg.output_dir = *f.out;
    if (f.threads) cfg.threads = *f.threads;
    validate(cfg);
    return cfg;
}

void report(const std::vector<fs::path> &paths) {
    for (const auto &p : paths) std::cout << p.string() << '\n';
}

int cmd_bipartitions(int L, std::optional<int> table_n0, const std::optional<std::string> &out) {
    check_chain_length(L);
    std::ofstream file;
    if (out) {
        if (fs::path(*out).has_parent_path()) fs::create_directories(fs::path(*out).parent_path());
        file.open(*out);
        if (!file) throw ParameterError("cannot write '" + *out + "'");
    }
    std::ostream &os = out ? static_cast<std::ostream &>(file) : std::cout;
    if (table_n0)
        write_representatives_csv(os, enumerate_representatives(L, *table_n0));
    else
        write_counts_csv(os, L);
    return 0;
}

int cmd_simulate(const ExperimentConfig &cfg) {
    const RunResult run = run_protocol(cfg);
    auto paths = write_run(run, cfg.output_dir);
    paths.push_back(write_fits(run_tomography(run), cfg.protocol, cfg.output_dir));
    report(paths);
    const auto &a = run.audit;
    std::cerr << "samples " << cfg.n_samples << ", wall " << run.wall_seconds << " s, norm drift " << a.max_norm_drift;
    if (a.energy_checked) std::cerr << ", relative energy drift " << a.max_relative_energy_drift;
    if (a.sector_checked) std::cerr << ", out-of-sector weight " << a.max_out_of_sector_weight;
    std::cerr << '\n';
    return 0;
}

int cmd_tomography(const ExperimentConfig &cfg, const std::string &manifest) {
    const fs::path path = manifest.empty()
                              ? fs::path(cfg.output_dir) / (std::string(to_string(cfg.protocol)) + "_manifest.json")
                              : fs::path(manifest);
    const RunResult run = read_run(path);
    const auto fits = run_tomography(run);
    const fs::path dir = manifest.empty() ? fs::path(cfg.output_dir) : path.parent_path();
    report({write_fits(fits, run.config.protocol, dir)});
    for (const auto &f : fits) {
        std::cerr << "t=" << f.time << " n0=" << f.n0 << " S0=" << f.fit.S0 << " r2=" << f.fit.r2 << " omega=";
        for (std::size_t j = 0; j < f.fit.omega.size(); ++j) std::cerr << (j ? "," : "") << f.fit.omega[j];
        std::cerr << (f.fit.rank_deficient ? " (rank deficient)" : "") << '\n';
    }
    return 0;
}

int cmd_spectral(const ExperimentConfig &cfg) {
    const SpectralResult res = run_spectral_diagnostics(cfg);
    report(write_spectral(res, cfg.output_dir));
    std::cerr << "mean r " << res.aggregate.mean_r << " over " << res.aggregate.ratios.size() << " ratios\n";
    return 0;
}

int cmd_haar(const ExperimentConfig &cfg) {
    const int L = cfg.L;
    std::vector<Mask> masks;
    std::vector<HaarReferenceRow> rows;
    for (int n0 : cfg.subsystem_sizes()) {
        const auto set = enumerate_representatives(L, n0);
        const double page = page_entropy_bits(1L << n0, 1L << (L - n0));
        for (std::size_t r = 0; r < set.size(); ++r) {
            masks.push_back(set.reps[r].mask);
            rows.push_back({n0, set.reps[r].mask, set.geometry[r], {}, page});
        }
    }
    Rng rng = sample_stream(cfg.master_seed, 0);
    const auto means = haar_entropy_mc(L, L / 2, masks, cfg.n_samples, rng);
    for (std::size_t k = 0; k < rows.size(); ++k) rows[k].sector = means[k];
    report({write_haar_reference(L, rows, cfg.output_dir)});
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Entanglement bond-tension tomography for spin-1/2 chains"};
    app.require_subcommand(1);
    app.set_version_flag("--version", code_version());

    CommonFlags flags;

    auto *bip = app.add_subcommand("bipartitions", "representative bipartition counts (n0,N,M) or a representative table");
    int bip_L = 16;
    std::optional<int> table;
    std::optional<std::string> bip_out;
    bip->add_option("-L,--length", bip_L, "chain length")->capture_default_str();
    bip->add_option("--table", table, "emit the representative table for this n0 instead of counts");
    bip->add_option("--out", bip_out, "output file (default stdout)");

    auto *sim = app.add_subcommand("simulate", "run a protocol ensemble and write records, fits and manifest");
    add_common(sim, flags);

    auto *tomo = app.add_subcommand("tomography", "fit the bond-additive law to stored records");
    add_common(tomo, flags);
    std::string manifest;
    tomo->add_option("--manifest", manifest, "run manifest (default <out>/<protocol>_manifest.json)");

    auto *spec = app.add_subcommand("spectral", "level-spacing ratio statistics per disorder realization");
    add_common(spec, flags);

    auto *haar = app.add_subcommand("haar", "sector-Haar and Page reference entropies per representative");
    add_common(haar, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*bip) return cmd_bipartitions(bip_L, table, bip_out);
        const ExperimentConfig cfg = resolve(flags);
        if (*sim) return cmd_simulate(cfg);
        if (*tomo) return cmd_tomography(cfg, manifest);
        if (*spec) return cmd_spectral(cfg);
        if (*haar) return cmd_haar(cfg);
    } catch (const CapacityError &e) {
        std::cerr << "entomo: capacity error: " << e.what() << '\n';
        return 3;
    } catch (const ConvergenceError &e) {
        std::cerr << "entomo: convergence error: " << e.what() << '\n';
        return 4;
    } catch (const std::invalid_argument &e) {
        std::cerr << "entomo: parameter error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "entomo: error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
