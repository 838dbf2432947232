#include "entomo/io.hpp"

#include "entomo/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <json.hpp>
#include <sstream>

namespace entomo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

// JSON has no infinities; they are written as null.
json json_num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::ofstream open_out(const fs::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot write '" + path.string() + "'");
    return out;
}

std::string stem(Protocol p) { return std::string(to_string(p)); }

void geometry_header(std::ostream &out, int L) {
    for (int j = 1; j <= L / 2; ++j) out << ",n" << j;
}

void geometry_cells(std::ostream &out, const CrossedBondVector &g) {
    for (int x : g.n) out << ',' << x;
}

std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

template <class T> T parse_cell(const std::string &cell, const std::string &column, int lineno) {
    T value{};
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw ParameterError("line " + std::to_string(lineno) + ", column '" + column + "': cannot parse '" + cell + "'");
    return value;
}

json audit_json(const ConservationAudit &a) {
    return {{"max_norm_drift", a.max_norm_drift},
            {"max_energy_drift", a.max_energy_drift},
            {"max_relative_energy_drift", a.max_relative_energy_drift},
            {"max_out_of_sector_weight", a.max_out_of_sector_weight},
            {"energy_checked", a.energy_checked},
            {"sector_checked", a.sector_checked}};
}

json histogram_json(const Histogram &h) { return {{"edges", h.edges}, {"density", h.density}}; }

} // namespace

void write_records_csv(std::ostream &out, int L, const std::vector<double> &times, const SliceRecords &slice) {
    out << "time,rep_id,mask";
    geometry_header(out, L);
    out << ",mean_S,stderr\n";
    for (std::size_t ti = 0; ti < times.size(); ++ti)
        for (std::size_t r = 0; r < slice.records.size(); ++r) {
            const auto &rec = slice.records[r];
            out << num(times[ti]) << ',' << r << ',' << rec.mask;
            geometry_cells(out, rec.geometry);
            out << ',' << num(rec.entropy[ti].mean) << ',' << num(rec.entropy[ti].std_error) << '\n';
        }
}

SliceRecords read_records_csv(std::istream &in, int L, int n0, std::vector<double> &times) {
    std::ostringstream expected;
    expected << "time,rep_id,mask";
    geometry_header(expected, L);
    expected << ",mean_S,stderr";
    const std::vector<std::string> columns = split(expected.str());

    std::string line;
    if (!std::getline(in, line) || line != expected.str())
        throw ParameterError("records header mismatch: expected '" + expected.str() + "'");

    SliceRecords slice;
    slice.n0 = n0;
    times.clear();
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != columns.size())
            throw ParameterError("line " + std::to_string(lineno) + ": expected " + std::to_string(columns.size()) +
                                 " columns, got " + std::to_string(cells.size()));
        const double t = parse_cell<double>(cells[0], columns[0], lineno);
        const auto rep = parse_cell<std::size_t>(cells[1], columns[1], lineno);
        if (times.empty() || times.back() != t) times.push_back(t);
        if (rep == slice.records.size()) {
            if (times.size() != 1) throw ParameterError("line " + std::to_string(lineno) + ": unknown rep_id");
            ResultRecord rec;
            rec.mask = parse_cell<Mask>(cells[2], columns[2], lineno);
            for (int j = 0; j < L / 2; ++j)
                rec.geometry.n.push_back(parse_cell<int>(cells[3 + j], columns[3 + j], lineno));
            slice.records.push_back(std::move(rec));
        } else if (rep > slice.records.size()) {
            throw ParameterError("line " + std::to_string(lineno) + ", column 'rep_id': out of order");
        }
        const std::size_t c = columns.size();
        slice.records[rep].entropy.push_back(
            {parse_cell<double>(cells[c - 2], columns[c - 2], lineno), parse_cell<double>(cells[c - 1], columns[c - 1], lineno)});
    }
    for (const auto &rec : slice.records)
        if (rec.entropy.size() != times.size()) throw ParameterError("records file is missing rows");
    return slice;
}

std::vector<fs::path> write_run(const RunResult &run, const fs::path &dir) {
    fs::create_directories(dir);
    const std::string base = stem(run.config.protocol);
    const int L = run.config.L;
    std::vector<fs::path> written;
    json record_files = json::array();

    for (const auto &slice : run.slices) {
        const fs::path p = dir / (base + "_n0_" + std::to_string(slice.n0) + ".csv");
        auto out = open_out(p);
        write_records_csv(out, L, run.times, slice);
        written.push_back(p);
        record_files.push_back({{"n0", slice.n0}, {"file", p.filename().string()}});
    }
    {
        const fs::path p = dir / (base + "_mutual_information.csv");
        auto out = open_out(p);
        out << "time,j,mean_I,stderr\n";
        for (std::size_t ti = 0; ti < run.times.size(); ++ti)
            for (std::size_t j = 0; j < run.mutual_information[ti].size(); ++j)
                out << num(run.times[ti]) << ',' << j + 1 << ',' << num(run.mutual_information[ti][j].mean) << ','
                    << num(run.mutual_information[ti][j].std_error) << '\n';
        written.push_back(p);
    }
    {
        const fs::path p = dir / (base + "_hcee.csv");
        auto out = open_out(p);
        out << "time,mean_S,stderr\n";
        for (std::size_t ti = 0; ti < run.times.size(); ++ti)
            out << num(run.times[ti]) << ',' << num(run.half_chain[ti].mean) << ','
                << num(run.half_chain[ti].std_error) << '\n';
        written.push_back(p);
    }

    json manifest;
    manifest["code_version"] = code_version();
    manifest["config"] = config_entries(run.config);
    manifest["times"] = run.times;
    manifest["sample_seeds"] = run.sample_seeds;
    manifest["started_at"] = run.started_at;
    manifest["wall_seconds"] = run.wall_seconds;
    manifest["audit"] = audit_json(run.audit);
    manifest["records"] = record_files;
    const fs::path p = dir / (base + "_manifest.json");
    auto out = open_out(p);
    out << manifest.dump(2) << '\n';
    written.push_back(p);
    return written;
}

RunResult read_run(const fs::path &manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw ParameterError("cannot open manifest '" + manifest_path.string() + "'");
    json manifest;
    try {
        manifest = json::parse(in);
    } catch (const json::exception &e) {
        throw ParameterError("manifest '" + manifest_path.string() + "': " + e.what());
    }
    RunResult run;
    const auto entries = manifest.at("config").get<std::map<std::string, std::string>>();
    run.config = default_config(parse_protocol(entries.at("protocol")));
    for (const auto &[k, v] : entries) apply_config_value(run.config, k, v);
    run.times = manifest.at("times").get<std::vector<double>>();
    run.sample_seeds = manifest.at("sample_seeds").get<std::vector<std::uint64_t>>();
    run.started_at = manifest.value("started_at", "");
    run.wall_seconds = manifest.value("wall_seconds", 0.0);

    for (const auto &entry : manifest.at("records")) {
        const fs::path p = manifest_path.parent_path() / entry.at("file").get<std::string>();
        std::ifstream rin(p);
        if (!rin) throw ParameterError("cannot open records '" + p.string() + "'");
        std::vector<double> times;
        run.slices.push_back(read_records_csv(rin, run.config.L, entry.at("n0").get<int>(), times));
        if (times != run.times) throw ParameterError("records '" + p.string() + "' disagree with manifest times");
    }
    return run;
}

fs::path write_fits(const std::vector<SliceFit> &fits, Protocol protocol, const fs::path &dir) {
    fs::create_directories(dir);
    json arr = json::array();
    for (const auto &f : fits) {
        json omega = json::array();
        for (double w : f.fit.omega) omega.push_back(w);
        arr.push_back({{"L", f.L},
                       {"n0", f.n0},
                       {"protocol", stem(protocol)},
                       {"time", f.time},
                       {"S0", f.fit.S0},
                       {"omega", omega},
                       {"r2", f.fit.r2},
                       {"rank", f.fit.rank},
                       {"rank_flag", f.fit.rank_deficient},
                       {"hierarchy", json_num(f.hierarchy)}});
    }
    const fs::path p = dir / (stem(protocol) + "_fits.json");
    auto out = open_out(p);
    out << arr.dump(2) << '\n';
    return p;
}

std::vector<fs::path> write_spectral(const SpectralResult &res, const fs::path &dir) {
    fs::create_directories(dir);
    const std::string base = stem(res.config.protocol);
    const fs::path csv = dir / (base + "_spectral.csv");
    {
        auto out = open_out(csv);
        out << "seed,mean_r\n";
        for (const auto &r : res.realizations) out << r.seed << ',' << num(r.mean_r) << '\n';
    }
    const auto refs = reference_means();
    json j;
    j["protocol"] = base;
    j["config"] = config_entries(res.config);
    j["code_version"] = code_version();
    j["realizations"] = res.realizations.size();
    j["mean_r"] = res.aggregate.mean_r;
    j["n_ratios"] = res.aggregate.ratios.size();
    j["dropped"] = res.aggregate.dropped;
    j["histogram"] = histogram_json(res.aggregate.histogram);
    j["references"] = {{"goe", refs.goe}, {"coe", refs.coe}, {"poisson", refs.poisson}};
    const fs::path js = dir / (base + "_spectral.json");
    auto out = open_out(js);
    out << j.dump(2) << '\n';
    return {csv, js};
}

fs::path write_haar_reference(int L, const std::vector<HaarReferenceRow> &rows, const fs::path &dir) {
    fs::create_directories(dir);
    const fs::path p = dir / "haar_reference.csv";
    auto out = open_out(p);
    out << "n0,rep_id,mask";
    geometry_header(out, L);
    out << ",mean_S,stderr,page_S\n";
    int last_n0 = -1;
    std::size_t rep = 0;
    for (const auto &row : rows) {
        if (row.n0 != last_n0) rep = 0;
        last_n0 = row.n0;
        out << row.n0 << ',' << rep++ << ',' << row.mask;
        geometry_cells(out, row.geometry);
        out << ',' << num(row.sector.mean) << ',' << num(row.sector.std_error) << ',' << num(row.page_bits) << '\n';
    }
    return p;
}

void write_counts_csv(std::ostream &out, int L) {
    out << "n0,N,M\n";
    for (int n0 = 1; n0 <= L / 2; ++n0) {
        const auto set = enumerate_representatives(L, n0);
        out << n0 << ',' << set.size() << ',' << set.unique_geometries() << '\n';
    }
}

void write_representatives_csv(std::ostream &out, const RepresentativeSet &set) {
    out << "rep_id,mask,sites";
    geometry_header(out, set.L);
    out << '\n';
    for (std::size_t r = 0; r < set.size(); ++r) {
        out << r << ',' << set.reps[r].mask << ',';
        bool first = true;
        for (int i = 0; i < set.L; ++i)
            if (set.reps[r].mask >> i & 1u) {
                out << (first ? "" : " ") << i;
                first = false;
            }
        geometry_cells(out, set.geometry[r]);
        out << '\n';
    }
}

} // namespace entomo
