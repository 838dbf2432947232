#include "entomo/config.hpp"

#include "entomo/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace entomo {

namespace {

constexpr std::pair<Protocol, std::string_view> kProtocolNames[] = {
    {Protocol::nn_thermal, "nn_thermal"},   {Protocol::nnn_thermal, "nnn_thermal"},
    {Protocol::mbl, "mbl"},                 {Protocol::mixed_field, "mixed_field"},
    {Protocol::nn_random_product, "nn_random_product"}, {Protocol::rqc, "rqc"},
    {Protocol::floquet, "floquet"},
};

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

template <class T> T parse_number(const std::string &key, const std::string &text) {
    T value{};
    const char *begin = text.data(), *end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) throw ParameterError("config key '" + key + "': cannot parse '" + text + "'");
    return value;
}

template <class T> std::vector<T> parse_list(const std::string &key, const std::string &text) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_number<T>(key, item));
    }
    return out;
}

std::string format_double(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

template <class T> std::string join(const std::vector<T> &xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ",";
        if constexpr (std::is_floating_point_v<T>)
            s += format_double(xs[i]);
        else
            s += std::to_string(xs[i]);
    }
    return s;
}

std::vector<double> default_time_points(Protocol p, int L) {
    switch (p) {
    case Protocol::mbl: return {0.1, 10.0, 1e12};
    case Protocol::rqc: return {std::ceil(1000.0 * L / 16.0)};
    case Protocol::floquet: return {100.0};
    default: return {0.1, 2.0, 1000.0};
    }
}

} // namespace

std::string_view to_string(Protocol p) {
    for (const auto &[proto, name] : kProtocolNames)
        if (proto == p) return name;
    return "unknown";
}

Protocol parse_protocol(std::string_view name) {
    for (const auto &[proto, n] : kProtocolNames)
        if (n == name) return proto;
    throw ParameterError("unknown protocol '" + std::string(name) + "'");
}

bool is_hamiltonian(Protocol p) { return p != Protocol::rqc && p != Protocol::floquet; }

bool is_u1_sector_protocol(Protocol p) { return p != Protocol::mixed_field && p != Protocol::nn_random_product; }

ExperimentConfig default_config(Protocol p) {
    ExperimentConfig cfg;
    cfg.protocol = p;
    if (p == Protocol::mbl || p == Protocol::floquet) cfg.params.W = 5.0;
    cfg.time_points = default_time_points(p, cfg.L);
    return cfg;
}

void validate(const ExperimentConfig &cfg) {
    check_chain_length(cfg.L);
    const int min_L = cfg.protocol == Protocol::nnn_thermal ? 6 : 4;
    if (cfg.L < min_L) throw ParameterError("protocol needs L >= " + std::to_string(min_L));
    for (int n0 : cfg.subsystem_sizes())
        if (n0 < 1 || n0 > cfg.L / 2) throw ParameterError("n0 values must lie in [1, L/2]");
    if (cfg.time_points.empty()) throw ParameterError("no time points given");
    for (double t : cfg.time_points) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("time points must be finite and >= 0");
        if (!is_hamiltonian(cfg.protocol) && t != std::floor(t))
            throw ParameterError("circuit depths and period counts must be integers");
    }
    if (cfg.n_samples < 2) throw ParameterError("need at least two samples for standard errors");
    if (cfg.threads < 1) throw ParameterError("threads must be >= 1");
    if (!(cfg.params.W >= 0.0) || !(cfg.params.W_g >= 0.0)) throw ParameterError("disorder strengths must be >= 0");
    if (!(cfg.krylov_tol > 0.0)) throw ParameterError("krylov_tol must be positive");
    if (cfg.diag_cap < 1) throw ParameterError("diag_cap must be positive");
}

void apply_config_value(ExperimentConfig &cfg, const std::string &key, const std::string &value) {
    if (key == "protocol") cfg.protocol = parse_protocol(value);
    else if (key == "L") cfg.L = parse_number<int>(key, value);
    else if (key == "n0_list") cfg.n0_list = parse_list<int>(key, value);
    else if (key == "time_points") cfg.time_points = parse_list<double>(key, value);
    else if (key == "n_samples") cfg.n_samples = parse_number<int>(key, value);
    else if (key == "master_seed") cfg.master_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "W") cfg.params.W = parse_number<double>(key, value);
    else if (key == "W_g") cfg.params.W_g = parse_number<double>(key, value);
    else if (key == "Jz") cfg.params.Jz = parse_number<double>(key, value);
    else if (key == "gamma") cfg.params.gamma = parse_number<double>(key, value);
    else if (key == "T0") cfg.T0 = parse_number<double>(key, value);
    else if (key == "T1") cfg.T1 = parse_number<double>(key, value);
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "threads") cfg.threads = parse_number<int>(key, value);
    else if (key == "diag_cap") cfg.diag_cap = parse_number<long>(key, value);
    else if (key == "krylov_tol") cfg.krylov_tol = parse_number<double>(key, value);
    else if (key == "propagator") {
        if (value == "spectral") cfg.propagator = Propagator::spectral;
        else if (value == "krylov") cfg.propagator = Propagator::krylov;
        else throw ParameterError("propagator must be 'spectral' or 'krylov'");
    } else
        throw ParameterError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(std::istream &in) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ParameterError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        entries.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }

    // Protocol first: it selects the defaults the other keys override.
    Protocol p = Protocol::nn_thermal;
    for (const auto &[k, v] : entries)
        if (k == "protocol") p = parse_protocol(v);
    ExperimentConfig cfg = default_config(p);
    bool explicit_times = false;
    for (const auto &[k, v] : entries) {
        apply_config_value(cfg, k, v);
        explicit_times |= k == "time_points";
    }
    if (!explicit_times) cfg.time_points = default_time_points(cfg.protocol, cfg.L);
    return cfg;
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::map<std::string, std::string> config_entries(const ExperimentConfig &cfg) {
    return {
        {"protocol", std::string(to_string(cfg.protocol))},
        {"L", std::to_string(cfg.L)},
        {"n0_list", join(cfg.subsystem_sizes())},
        {"time_points", join(cfg.time_points)},
        {"n_samples", std::to_string(cfg.n_samples)},
        {"master_seed", std::to_string(cfg.master_seed)},
        {"W", format_double(cfg.params.W)},
        {"W_g", format_double(cfg.params.W_g)},
        {"Jz", format_double(cfg.params.Jz)},
        {"gamma", format_double(cfg.params.gamma)},
        {"T0", format_double(cfg.T0)},
        {"T1", format_double(cfg.T1)},
        {"output_dir", cfg.output_dir},
        {"threads", std::to_string(cfg.threads)},
        {"propagator", cfg.propagator == Propagator::spectral ? "spectral" : "krylov"},
        {"diag_cap", std::to_string(cfg.diag_cap)},
        {"krylov_tol", format_double(cfg.krylov_tol)},
    };
}

} // namespace entomo
