#pragma once

#include "entomo/evolution.hpp"
#include "entomo/operators.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace entomo {

enum class Protocol { nn_thermal, nnn_thermal, mbl, mixed_field, nn_random_product, rqc, floquet };

std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view name);

/// Continuous-time Hamiltonian evolution (as opposed to circuit or drive).
bool is_hamiltonian(Protocol p);
/// Starts in, and stays in, the half-filling sector.
bool is_u1_sector_protocol(Protocol p);

enum class Propagator { spectral, krylov };

/// Everything that determines a run. Together with the master seed it fixes the output bitwise.
struct ExperimentConfig {
    Protocol protocol = Protocol::nn_thermal;
    int L = 12;
    std::vector<int> n0_list;        ///< empty means {L/2}
    std::vector<double> time_points; ///< times, circuit depths (gates) or period counts
    int n_samples = 200;
    std::uint64_t master_seed = 1;
    CouplingParams params;
    double T0 = 1.0;
    double T1 = 2.5;
    std::string output_dir = "out";
    int threads = 1;
    Propagator propagator = Propagator::spectral;
    long diag_cap = kDefaultDiagonalizationCap;
    double krylov_tol = 1e-10;

    std::vector<int> subsystem_sizes() const { return n0_list.empty() ? std::vector<int>{L / 2} : n0_list; }
};

/// Protocol defaults: W = 5.0 for mbl and floquet, 0.5 otherwise; snapshot times
/// {0.1, 2.0, 1000.0} (mbl: {0.1, 10.0, 1e12}); rqc depth 1000 L / 16; floquet 100 periods.
ExperimentConfig default_config(Protocol p);

/// Throws ParameterError on any inconsistency.
void validate(const ExperimentConfig &cfg);

/// Flat `key = value` text; '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(std::istream &in);
ExperimentConfig load_config(const std::string &path);
/// Applies one key/value pair on top of `cfg`.
void apply_config_value(ExperimentConfig &cfg, const std::string &key, const std::string &value);
/// Round-trippable key/value snapshot.
std::map<std::string, std::string> config_entries(const ExperimentConfig &cfg);

} // namespace entomo
