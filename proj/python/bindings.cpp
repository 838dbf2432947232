#include "entomo/bipartition.hpp"
#include "entomo/config.hpp"
#include "entomo/entanglement.hpp"
#include "entomo/errors.hpp"
#include "entomo/experiment.hpp"
#include "entomo/io.hpp"
#include "entomo/spectral_stats.hpp"
#include "entomo/tomography.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace entomo;

namespace {

py::dict fit_dict(const FitResult &f) {
    py::dict d;
    d["S0"] = f.S0;
    d["omega"] = f.omega;
    d["r2"] = f.r2;
    d["rank"] = f.rank;
    d["rank_deficient"] = f.rank_deficient;
    return d;
}

ExperimentConfig config_from_text(const std::string &text) {
    std::istringstream in(text);
    auto cfg = parse_config(in);
    validate(cfg);
    return cfg;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bond-additive entanglement tomography core";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<BasisMismatch>(m, "BasisMismatch", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_MemoryError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_ArithmeticError);

    m.def("version", &code_version);

    m.def("crossed_bonds", [](Mask mask, int L) { return crossed_bond_vector(mask, L).n; }, py::arg("mask"),
          py::arg("L"));

    m.def(
        "representatives",
        [](int L, int n0) {
            const auto set = enumerate_representatives(L, n0);
            std::vector<std::pair<Mask, std::vector<int>>> out;
            for (std::size_t r = 0; r < set.size(); ++r) out.emplace_back(set.reps[r].mask, set.geometry[r].n);
            return out;
        },
        py::arg("L"), py::arg("n0"), "(mask, crossed-bond vector) per representative, ascending by mask");

    m.def(
        "counts",
        [](int L) {
            std::vector<std::tuple<int, std::size_t, std::size_t>> out;
            for (int n0 = 1; n0 <= L / 2; ++n0) {
                const auto set = enumerate_representatives(L, n0);
                out.emplace_back(n0, set.size(), set.unique_geometries());
            }
            return out;
        },
        py::arg("L"), "(n0, representatives, distinct geometries)");

    m.def(
        "entropy",
        [](const std::vector<Complex> &amplitudes, int L, Mask mask) {
            if (amplitudes.size() != (std::size_t{1} << L)) throw ParameterError("amplitudes must have length 2^L");
            const StateVector psi{Basis::full(L),
                                  Eigen::Map<const Eigen::VectorXcd>(amplitudes.data(),
                                                                     static_cast<Eigen::Index>(amplitudes.size()))};
            return entanglement_entropy(psi, mask);
        },
        py::arg("amplitudes"), py::arg("L"), py::arg("mask"), "von Neumann entropy in bits of a full-basis state");

    m.def("page_entropy", &page_entropy_bits, py::arg("dim_a"), py::arg("dim_b"));

    m.def(
        "fit",
        [](int L, int n0, const std::vector<double> &y) {
            return fit_dict(fit_bond_tensions(build_design_matrix(enumerate_representatives(L, n0)), y));
        },
        py::arg("L"), py::arg("n0"), py::arg("entropies"), "bond-additive fit over the representatives of (L, n0)");

    m.def(
        "spacing_ratios",
        [](const std::vector<double> &energies) {
            const auto s = level_spacing_ratios(energies);
            py::dict d;
            d["ratios"] = s.ratios;
            d["mean_r"] = s.mean_r;
            d["dropped"] = s.dropped;
            return d;
        },
        py::arg("energies"));

    m.def(
        "simulate",
        [](const std::string &config_text, const std::string &out_dir) {
            auto cfg = config_from_text(config_text);
            RunResult run;
            {
                py::gil_scoped_release release;
                run = run_protocol(cfg);
            }
            std::vector<std::string> paths;
            for (const auto &p : write_run(run, out_dir)) paths.push_back(p.string());
            paths.push_back(write_fits(run_tomography(run), cfg.protocol, out_dir).string());
            return paths;
        },
        py::arg("config"), py::arg("out_dir"), "run a protocol from key = value text and write its outputs");

    m.def(
        "spectral",
        [](const std::string &config_text, const std::string &out_dir) {
            const auto cfg = config_from_text(config_text);
            SpectralResult res;
            {
                py::gil_scoped_release release;
                res = run_spectral_diagnostics(cfg);
            }
            std::vector<std::string> paths;
            for (const auto &p : write_spectral(res, out_dir)) paths.push_back(p.string());
            return paths;
        },
        py::arg("config"), py::arg("out_dir"));
}
