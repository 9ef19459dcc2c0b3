// Python bindings. Configs and summaries cross the boundary as JSON text.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tracelab/bounds.hpp"
#include "tracelab/errors.hpp"
#include "tracelab/experiment.hpp"
#include "tracelab/generators.hpp"
#include "tracelab/hamilton.hpp"
#include "tracelab/spectral.hpp"
#include "tracelab/walk.hpp"

namespace py = pybind11;
using namespace tracelab;

namespace {

std::vector<std::vector<double>> square(std::span<const double> flat, std::size_t n) {
    std::vector<std::vector<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i].assign(flat.begin() + i * n, flat.begin() + (i + 1) * n);
    return out;
}

template <class T>
py::object opt(const std::optional<T>& v) {
    return v ? py::cast(*v) : py::none();
}

py::dict spectral_dict(const SpectralSummary& s) {
    py::dict d;
    d["n"] = s.n;
    d["d"] = s.d;
    d["lambda2"] = s.lambda2;
    d["lambda_min"] = s.lambda_min;
    d["lambda"] = s.lambda;
    d["ratio"] = s.ratio;
    d["method"] = std::string(to_string(s.method));
    d["residual"] = s.residual;
    return d;
}

py::dict cycle_dict(const CycleResult& r) {
    py::dict d;
    d["status"] = std::string(to_string(r.status));
    d["method"] = std::string(to_string(r.method));
    d["cycle"] = r.cycle;
    d["work"] = r.work;
    d["restarts"] = r.restarts;
    return d;
}

}  // namespace

PYBIND11_MODULE(_tracelab, m) {
    m.doc() = "random walk traces on regular graphs";

    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<DisconnectedError>(m, "DisconnectedError", PyExc_ValueError);
    py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::class_<Graph>(m, "Graph")
        .def_static(
            "from_edges",
            [](std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& pairs) {
                std::vector<Edge> e;
                for (auto [u, v] : pairs) e.push_back({u, v});
                return Graph::from_edges(n, e);
            },
            py::arg("n"), py::arg("edges"))
        .def_property_readonly("n", &Graph::num_vertices)
        .def_property_readonly("m", &Graph::num_edges)
        .def_property_readonly("regular_degree", [](const Graph& g) { return opt(g.regular_degree()); })
        .def("degree", &Graph::degree)
        .def("has_edge", &Graph::has_edge)
        .def("neighbors",
             [](const Graph& g, Vertex v) {
                 if (v >= g.num_vertices()) throw PreconditionError("vertex out of range");
                 auto nb = g.neighbors(v);
                 return std::vector<Vertex>(nb.begin(), nb.end());
             })
        .def("edges",
             [](const Graph& g) {
                 std::vector<std::pair<Vertex, Vertex>> out;
                 for (const auto& e : g.edges()) out.emplace_back(e.u, e.v);
                 return out;
             })
        .def("__repr__", [](const Graph& g) {
            return "<Graph n=" + std::to_string(g.num_vertices()) + " m=" + std::to_string(g.num_edges()) + ">";
        });

    m.def(
        "generate",
        [](const std::string& family, std::size_t n, std::size_t d, std::size_t c, std::uint64_t seed) {
            GenSpec s;
            s.family = family_from_string(family);
            s.n = s.family == Family::petersen ? 10 : n;
            s.d = d;
            s.c = c;
            s.seed = seed;
            return generate(s);
        },
        py::arg("family"), py::arg("n") = 0, py::arg("d") = 0, py::arg("c") = 0, py::arg("seed") = 0);

    m.def(
        "spectral", [](const Graph& g) { return spectral_dict(eigen_extremes(g)); }, py::arg("graph"));
    m.def("effective_resistance", [](const Graph& g, Vertex u, Vertex v) { return effective_resistance(g, u, v); },
          py::arg("graph"), py::arg("u"), py::arg("v"));
    m.def(
        "resistance_matrix",
        [](const Graph& g) { return square(resistance_matrix(g).resistance_data(), g.num_vertices()); },
        py::arg("graph"));
    m.def("hitting_time", &hitting_time_exact, py::arg("graph"), py::arg("u"), py::arg("v"));
    m.def(
        "hitting_matrix",
        [](const Graph& g, bool tetali) {
            if (!tetali) return square(hitting_matrix_exact(g), g.num_vertices());
            auto t = resistance_matrix(g);
            attach_tetali_hitting(t, g);
            return square(t.hitting_data(), g.num_vertices());
        },
        py::arg("graph"), py::arg("tetali") = false);
    m.def(
        "mixing_time", [](const Graph& g, double xi) { return empirical_mixing_time(g, xi); }, py::arg("graph"),
        py::arg("xi"));

    m.def(
        "matthews_bounds", [](double lo, double hi, std::size_t n) { return matthews_bounds(lo, hi, n); },
        py::arg("mu_minus"), py::arg("mu_plus"), py::arg("n"));
    m.def(
        "spectral_cover_bound",
        [](double n, double d, double lambda, double eps) {
            const auto b = cover_time_spectral_bound(n, d, lambda, eps);
            py::dict out;
            out["h_lower"] = b.h_lower;
            out["h_upper"] = b.h_upper;
            out["cover_upper"] = b.cover_upper;
            return out;
        },
        py::arg("n"), py::arg("d"), py::arg("lam"), py::arg("eps"));
    m.def("mixing_time_bound", &mixing_time_bound, py::arg("n"), py::arg("d"), py::arg("lam"), py::arg("xi"));
    m.def("binomial_tail_bound", &binomial_tail_bound, py::arg("n"), py::arg("p"), py::arg("t"));

    m.def(
        "walk",
        [](const Graph& g, Vertex start, std::size_t length, std::uint64_t seed, bool record_path) {
            const auto t = simulate_walk(g, start, length, seed, record_path);
            py::dict out;
            out["start"] = t.start;
            out["end"] = t.end;
            out["length"] = t.length;
            out["visit_counts"] = t.visit_counts;
            out["cover_step"] = opt(t.cover_step);
            out["trace_edges"] = t.trace_edges.size();
            out["path"] = t.path;
            return out;
        },
        py::arg("graph"), py::arg("start"), py::arg("length"), py::arg("seed"), py::arg("record_path") = false);

    m.def(
        "cover",
        [](const Graph& g, std::size_t trials, std::uint64_t seed, bool worst_start, std::optional<Vertex> start,
           std::size_t workers) {
            CoverOptions o;
            o.trials = trials;
            o.seed = seed;
            o.worst_start = worst_start;
            o.start = start;
            o.workers = workers;
            const auto s = cover_time_empirical(g, o);
            py::dict out;
            out["trials"] = s.trials;
            out["censored"] = s.censored;
            out["mean"] = s.mean;
            out["standard_error"] = s.standard_error;
            out["max"] = s.max;
            if (worst_start) {
                out["worst_start"] = s.worst_start;
                out["worst_start_mean"] = s.worst_start_mean;
            }
            return out;
        },
        py::arg("graph"), py::arg("trials") = 1000, py::arg("seed") = 0, py::arg("worst_start") = false,
        py::arg("start") = py::none(), py::arg("workers") = 1);

    m.def(
        "certify",
        [](const Graph& g, double c, std::optional<std::size_t> samples, std::uint64_t seed) {
            const auto mode = samples ? CertifyMode::sampled(*samples, seed) : CertifyMode::exhaustive();
            const auto v = certify_expander(g, c, mode);
            py::dict out;
            out["exact"] = v.exact;
            out["expansion"] = opt(v.expansion_pass);
            out["joinedness"] = opt(v.joinedness_pass);
            out["expansion_witness"] = v.expansion_witness;
            out["witness_a"] = v.witness_a;
            out["witness_b"] = v.witness_b;
            return out;
        },
        py::arg("graph"), py::arg("c"), py::arg("samples") = py::none(), py::arg("seed") = 0);

    m.def(
        "hamiltonian_cycle",
        [](const Graph& g, const std::string& method, std::uint64_t seed) {
            if (method == "exact") return cycle_dict(hamiltonian_exact(g));
            if (method == "posa") return cycle_dict(hamiltonian_posa(g, seed));
            throw PreconditionError("method must be exact or posa");
        },
        py::arg("graph"), py::arg("method") = "exact", py::arg("seed") = 0);
    m.def("verify_cycle", [](const Graph& g, const std::vector<Vertex>& c) { return verify_cycle(g, c); },
          py::arg("graph"), py::arg("cycle"));
    m.def(
        "tau_times",
        [](const Graph& g, Vertex start, std::size_t length, std::uint64_t seed) {
            const auto t = tau_times(g, start, length, seed);
            py::dict out;
            out["tau_1"] = opt(t.tau_1);
            out["tau_2"] = opt(t.tau_2);
            out["tau_hc"] = opt(t.tau_hc);
            out["exact"] = t.exact;
            return out;
        },
        py::arg("graph"), py::arg("start"), py::arg("length"), py::arg("seed"));

    m.def(
        "_run_experiment",
        [](const std::string& config, std::size_t workers) {
            ExperimentResult res;
            {
                py::gil_scoped_release release;
                res = run_experiment(parse_config(nlohmann::json::parse(config)), RunOptions{workers});
            }
            py::dict out;
            out["columns"] = res.trials.columns;
            out["rows"] = res.trials.rows;
            out["csv"] = res.trials.to_csv();
            out["summary"] = res.summary_document().dump();
            return out;
        },
        py::arg("config"), py::arg("workers") = 1);

    m.attr("__version__") = std::string(kVersionStamp.substr(kVersionStamp.find(' ') + 1));
}
