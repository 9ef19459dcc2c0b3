// trace-lab: command line front end for the tracelab library.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tracelab/bounds.hpp"
#include "tracelab/errors.hpp"
#include "tracelab/experiment.hpp"
#include "tracelab/generators.hpp"
#include "tracelab/hamilton.hpp"
#include "tracelab/spectral.hpp"
#include "tracelab/walk.hpp"

using nlohmann::json;
using namespace tracelab;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kRuntimeError = 2, kCheckFailed = 3 };

/// Either --graph FILE or the generator flags.
struct GraphInput {
    std::string file;
    std::string family;
    std::size_t n = 0, d = 0, c = 0;
    std::uint64_t seed = 0;

    void attach(CLI::App* app) {
        app->add_option("--graph", file, "edge-list file ('-' for stdin)");
        app->add_option("--family", family, "random_regular|complete|cycle|path|petersen|counterexample");
        app->add_option("-n,--n", n, "vertices");
        app->add_option("-d,--d", d, "degree (random_regular)");
        app->add_option("--attach", c, "attachment size C (counterexample)");
        app->add_option("--seed", seed, "generator seed");
    }

    GenSpec spec() const {
        GenSpec s;
        s.family = family_from_string(family);
        s.n = s.family == Family::petersen ? 10 : n;
        s.d = d;
        s.c = c;
        s.seed = seed;
        return s;
    }

    Graph load() const {
        if (!file.empty()) {
            if (file == "-") return parse_edge_list(std::cin);
            std::ifstream in(file);
            if (!in) throw FormatError("cannot open " + file);
            return parse_edge_list(in);
        }
        if (family.empty()) throw PreconditionError("give --graph FILE or --family with its parameters");
        return generate(spec());
    }
};

std::size_t env_workers(std::size_t fallback) {
    if (const char* w = std::getenv("TRACE_LAB_WORKERS")) {
        try {
            const long v = std::stol(w);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
        throw PreconditionError("TRACE_LAB_WORKERS must be a positive integer");
    }
    return fallback;
}

std::optional<std::string> env_output_dir() {
    if (const char* d = std::getenv("TRACE_LAB_OUTPUT_DIR"); d && *d) return std::string(d);
    return std::nullopt;
}

void write_matrix_csv(const std::string& path, std::size_t n, std::span<const double> data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "vertex";
    for (std::size_t j = 0; j < n; ++j) out << ',' << j;
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        out << i;
        for (std::size_t j = 0; j < n; ++j) out << ',' << format_number(data[i * n + j]);
        out << '\n';
    }
}

json spectral_json(const SpectralSummary& s) {
    json j{{"n", s.n},
           {"d", s.d},
           {"lambda2", s.lambda2},
           {"lambda_min", s.lambda_min},
           {"lambda", s.lambda},
           {"method", std::string(to_string(s.method))},
           {"residual", s.residual},
           {"iterations", s.iterations}};
    j["ratio"] = std::isinf(s.ratio) ? json("inf") : json(s.ratio);
    return j;
}

json verdict_json(const ExpanderVerdict& v) {
    json j{{"c", v.c}, {"mode", v.exact ? "exact" : "sampled"}, {"passed", v.passed()}};
    if (!v.exact) j["samples"] = v.samples;
    if (v.expansion_pass) {
        j["expansion"] = {{"pass", *v.expansion_pass}, {"sets_checked", v.expansion_sets_checked}};
        if (!*v.expansion_pass) {
            j["expansion"]["witness"] = v.expansion_witness;
            j["expansion"]["neighborhood_size"] = v.witness_neighborhood;
        }
    }
    if (v.joinedness_pass) {
        j["joinedness"] = {{"pass", *v.joinedness_pass}, {"sets_checked", v.joinedness_sets_checked}};
        if (!*v.joinedness_pass) {
            j["joinedness"]["witness_a"] = v.witness_a;
            j["joinedness"]["witness_b"] = v.witness_b;
        }
    }
    return j;
}

CertifyMode parse_mode(const std::string& text, std::uint64_t seed) {
    if (text == "exact") return CertifyMode::exhaustive();
    if (text.rfind("sampled:", 0) == 0) {
        const std::size_t k = std::stoul(text.substr(8));
        if (k == 0) throw PreconditionError("sampled:<k> needs k > 0");
        return CertifyMode::sampled(k, seed);
    }
    throw PreconditionError("--mode must be exact or sampled:<k>");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random-walk trace and cover-time laboratory", "trace-lab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersionStamp));

    // gen
    auto* gen = app.add_subcommand("gen", "generate a graph as an edge list");
    GraphInput gen_in;
    std::string gen_out;
    gen_in.attach(gen);
    gen->add_option("-o,--output", gen_out, "write to file instead of stdout");

    // spectral
    auto* spectral = app.add_subcommand("spectral", "adjacency spectrum extremes and resistance tables");
    GraphInput sp_in;
    sp_in.attach(spectral);
    bool sp_dense = false, sp_iter = false;
    double sp_tol = 1e-8;
    std::string sp_resist, sp_hit;
    spectral->add_flag("--dense", sp_dense, "force the dense eigensolver");
    spectral->add_flag("--iterative", sp_iter, "force the iterative eigensolver");
    spectral->add_option("--tol", sp_tol, "eigen tolerance");
    spectral->add_option("--resistance-csv", sp_resist, "export all-pairs resistances");
    spectral->add_option("--hitting-csv", sp_hit, "export all-pairs hitting times");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "cover, hitting and mixing bounds");
    GraphInput b_in;
    b_in.attach(bounds);
    double b_eps = 0.1, b_xi = 0.25;
    std::string b_harmonic = "n-1";
    std::vector<double> grid_n, grid_d, grid_ratio, grid_eps;
    bounds->add_option("--eps", b_eps, "epsilon for the spectral cover band");
    bounds->add_option("--xi", b_xi, "mixing threshold");
    bounds->add_option("--harmonic", b_harmonic, "lower-bound harmonic terms: n-1 or n");
    bounds->add_option("--grid-n", grid_n, "grid sweep: n values")->delimiter(',');
    bounds->add_option("--grid-d", grid_d, "grid sweep: d values")->delimiter(',');
    bounds->add_option("--grid-ratio", grid_ratio, "grid sweep: d/lambda values")->delimiter(',');
    bounds->add_option("--grid-eps", grid_eps, "grid sweep: epsilon values")->delimiter(',');

    // walk
    auto* walk = app.add_subcommand("walk", "simulate one walk and summarize its trace");
    GraphInput w_in;
    w_in.attach(walk);
    std::uint32_t w_start = 0;
    std::size_t w_length = 0;
    std::uint64_t w_seed = 0;
    std::string w_trace;
    walk->add_option("--start", w_start, "start vertex");
    walk->add_option("--length,-L", w_length, "steps")->required();
    walk->add_option("--walk-seed", w_seed, "walk seed")->required();
    walk->add_option("--trace", w_trace, "write the trace graph as an edge list");

    // cover
    auto* cover = app.add_subcommand("cover", "Monte-Carlo cover time");
    GraphInput c_in;
    c_in.attach(cover);
    std::size_t c_trials = 1000, c_budget = 0, c_workers = 1;
    std::uint64_t c_seed = 0;
    std::optional<std::uint32_t> c_start;
    bool c_worst = false;
    std::string c_csv;
    cover->add_option("--trials", c_trials, "trials");
    cover->add_option("--walk-seed", c_seed, "master seed for the walks")->required();
    cover->add_option("--start", c_start, "fixed start vertex");
    cover->add_flag("--worst-start", c_worst, "maximize the mean over starts");
    cover->add_option("--budget", c_budget, "step budget per trial (0: default)");
    cover->add_option("--workers", c_workers, "worker threads");
    cover->add_option("--csv", c_csv, "per-trial CSV ('-' for stdout)");

    // hamilton
    auto* ham = app.add_subcommand("hamilton", "expander certification and Hamilton cycles");
    ham->require_subcommand(1);
    auto* certify = ham->add_subcommand("certify", "C-expander certification");
    GraphInput h_cert_in;
    h_cert_in.attach(certify);
    double h_c = 2.0;
    std::string h_mode = "exact";
    std::uint64_t h_mode_seed = 0;
    certify->add_option("--c", h_c, "expansion factor C")->required();
    certify->add_option("--mode", h_mode, "exact | sampled:<k>");
    certify->add_option("--sample-seed", h_mode_seed, "seed for sampled mode");

    auto* cycle = ham->add_subcommand("cycle", "search for a Hamilton cycle");
    GraphInput h_cyc_in;
    h_cyc_in.attach(cycle);
    std::string h_method = "exact";
    std::uint64_t h_posa_seed = 0;
    std::size_t h_budget = 50'000'000;
    cycle->add_option("--method", h_method, "exact | posa")->check(CLI::IsMember({"exact", "posa"}));
    cycle->add_option("--posa-seed", h_posa_seed, "Posa seed");
    cycle->add_option("--budget", h_budget, "exact search budget");

    auto* tau = ham->add_subcommand("tau", "tau_1, tau_2 and tau_HC of one walk");
    GraphInput h_tau_in;
    h_tau_in.attach(tau);
    std::size_t h_len = 0;
    std::uint64_t h_walk_seed = 0;
    std::uint32_t h_start = 0;
    tau->add_option("--walk-length", h_len, "maximum walk length")->required();
    tau->add_option("--walk-seed", h_walk_seed, "walk seed")->required();
    tau->add_option("--start", h_start, "start vertex");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a configured experiment");
    std::string e_config, e_out, e_plot;
    std::size_t e_workers = 1;
    bool e_check = false;
    exp->add_option("--config", e_config, "JSON config")->required();
    exp->add_flag("--check", e_check, "exit 3 when a configured check fails");
    exp->add_option("--output-dir", e_out, "override the config's output directory");
    exp->add_option("--workers", e_workers, "worker threads");
    exp->add_option("--plot", e_plot, "also emit plot data: histogram|series|tv_profile");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (*gen) {
            const Graph g = gen_in.load();
            if (gen_out.empty()) {
                write_edge_list(std::cout, g);
            } else {
                std::ofstream out(gen_out);
                if (!out) throw std::runtime_error("cannot write " + gen_out);
                write_edge_list(out, g);
            }
        } else if (*spectral) {
            if (sp_dense && sp_iter) throw PreconditionError("--dense and --iterative are exclusive");
            const Graph g = sp_in.load();
            EigenOptions opts;
            opts.tol = sp_tol;
            if (sp_dense) opts.method = EigenMethod::dense;
            if (sp_iter) opts.method = EigenMethod::iterative;
            json out = spectral_json(eigen_extremes(g, opts));
            if (!sp_resist.empty() || !sp_hit.empty()) {
                auto table = resistance_matrix(g, kResistanceTol, env_workers(1));
                if (!sp_resist.empty()) write_matrix_csv(sp_resist, g.num_vertices(), table.resistance_data());
                if (!sp_hit.empty()) {
                    attach_tetali_hitting(table, g);
                    write_matrix_csv(sp_hit, g.num_vertices(), table.hitting_data());
                }
            }
            std::cout << out.dump(2) << '\n';
        } else if (*bounds) {
            if (!grid_n.empty() || !grid_d.empty() || !grid_ratio.empty() || !grid_eps.empty()) {
                if (grid_n.empty() || grid_d.empty() || grid_ratio.empty()) {
                    throw PreconditionError("grid sweeps need --grid-n, --grid-d and --grid-ratio");
                }
                if (grid_eps.empty()) grid_eps.push_back(b_eps);
                std::cout << "n,d,lambda,eps,h_lower,h_upper,cover_upper\n";
                for (double n : grid_n)
                    for (double d : grid_d)
                        for (double r : grid_ratio)
                            for (double e : grid_eps) {
                                const auto s = cover_time_spectral_bound(n, d, d / r, e);
                                std::cout << format_number(n) << ',' << format_number(d) << ',' << format_number(d / r)
                                          << ',' << format_number(e) << ',' << format_number(s.h_lower) << ','
                                          << format_number(s.h_upper) << ',' << format_number(s.cover_upper) << '\n';
                            }
            } else {
                const Graph g = b_in.load();
                const HarmonicConvention conv =
                    b_harmonic == "n" ? HarmonicConvention::n_terms : HarmonicConvention::n_minus_one;
                if (b_harmonic != "n" && b_harmonic != "n-1") throw PreconditionError("--harmonic must be n-1 or n");
                const std::size_t n = g.num_vertices();
                std::vector<double> h;
                if (n <= kExactHittingLimit) {
                    h = hitting_matrix_exact(g);
                } else {
                    auto table = resistance_matrix(g, kResistanceTol, env_workers(1));
                    attach_tetali_hitting(table, g);
                    h.assign(table.hitting_data().begin(), table.hitting_data().end());
                }
                double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
                for (std::size_t u = 0; u < n; ++u)
                    for (std::size_t v = 0; v < n; ++v)
                        if (u != v) {
                            lo = std::min(lo, h[u * n + v]);
                            hi = std::max(hi, h[u * n + v]);
                        }
                const auto [cl, cu] = matthews_bounds(lo, hi, n, conv);
                json out{{"mu_minus", lo},          {"mu_plus", hi},  {"cover_lower", cl},
                         {"cover_upper", cu},       {"xi", b_xi},
                         {"harmonic_index_convention", std::string(to_string(conv))}};
                if (g.regular_degree() && connectivity_profile(g).connected) {
                    const auto s = eigen_extremes(g);
                    out["lambda"] = s.lambda;
                    if (s.lambda < s.d) {
                        out["mixing_bound"] = mixing_time_bound(static_cast<double>(n), s.d, s.lambda, b_xi);
                        const auto sb = cover_time_spectral_bound(static_cast<double>(n), s.d, s.lambda, b_eps);
                        out["spectral"] = {{"eps", b_eps},
                                           {"h_lower", sb.h_lower},
                                           {"h_upper", sb.h_upper},
                                           {"cover_upper", sb.cover_upper},
                                           {"hitting_band_holds", sb.hitting_band_holds},
                                           {"cover_band_holds", sb.cover_band_holds}};
                    }
                }
                std::cout << out.dump(2) << '\n';
            }
        } else if (*walk) {
            const Graph g = w_in.load();
            const WalkTrace t = simulate_walk(g, w_start, w_length, w_seed);
            const Graph gamma = trace_graph(t, g);
            json out{{"start", t.start},
                     {"end", t.end},
                     {"length", t.length},
                     {"seed", t.seed},
                     {"trace_edges", gamma.num_edges()},
                     {"min_visit_ratio", min_visit_ratio(t)}};
            out["cover_step"] = t.cover_step ? json(*t.cover_step) : json(nullptr);
            if (!w_trace.empty()) {
                std::ofstream f(w_trace);
                if (!f) throw std::runtime_error("cannot write " + w_trace);
                write_edge_list(f, gamma);
            }
            std::cout << out.dump(2) << '\n';
        } else if (*cover) {
            const Graph g = c_in.load();
            CoverOptions opts;
            opts.trials = c_trials;
            opts.seed = c_seed;
            opts.worst_start = c_worst;
            opts.start = c_start;
            opts.budget = c_budget;
            opts.workers = env_workers(c_workers);
            const auto s = cover_time_empirical(g, opts);
            if (!c_csv.empty()) {
                Table t{{"trial", "start", "seed", "cover_step", "blanket_t", "rho_hat", "censored"}, {}};
                for (const auto& r : s.records) {
                    t.rows.push_back({std::to_string(r.trial), std::to_string(r.start), std::to_string(r.seed),
                                      r.cover_step ? std::to_string(*r.cover_step) : "", "", "",
                                      r.censored() ? "1" : "0"});
                }
                if (c_csv == "-") {
                    t.write_csv(std::cout);
                } else {
                    std::ofstream f(c_csv);
                    if (!f) throw std::runtime_error("cannot write " + c_csv);
                    t.write_csv(f);
                }
            }
            json out{{"trials", s.trials},
                     {"censored", s.censored},
                     {"mean", s.mean},
                     {"stderr", s.standard_error},
                     {"max", s.max}};
            if (c_worst) {
                out["worst_start"] = s.worst_start;
                out["worst_start_mean"] = s.worst_start_mean;
            }
            (c_csv == "-" ? std::cerr : std::cout) << out.dump(2) << '\n';
        } else if (*certify) {
            const Graph g = h_cert_in.load();
            std::cout << verdict_json(certify_expander(g, h_c, parse_mode(h_mode, h_mode_seed))).dump(2) << '\n';
        } else if (*cycle) {
            const Graph g = h_cyc_in.load();
            const CycleResult r =
                h_method == "exact" ? hamiltonian_exact(g, h_budget) : hamiltonian_posa(g, h_posa_seed);
            if (r.status == CycleStatus::found) {
                for (std::size_t i = 0; i < r.cycle.size(); ++i) std::cout << (i ? " " : "") << r.cycle[i];
                std::cout << '\n';
            }
            std::cerr << json{{"status", std::string(to_string(r.status))},
                              {"method", std::string(to_string(r.method))},
                              {"work", r.work},
                              {"restarts", r.restarts}}
                             .dump()
                      << '\n';
        } else if (*tau) {
            const Graph g = h_tau_in.load();
            const TauResult r = tau_times(g, h_start, h_len, h_walk_seed);
            auto opt = [](const std::optional<std::size_t>& x) { return x ? json(*x) : json(nullptr); };
            std::cout << json{{"tau_1", opt(r.tau_1)},
                              {"tau_2", opt(r.tau_2)},
                              {"tau_hc", opt(r.tau_hc)},
                              {"exact", r.exact},
                              {"probes", r.probes}}
                             .dump(2)
                      << '\n';
        } else if (*exp) {
            ExperimentConfig cfg;
            try {
                cfg = load_config(e_config);
            } catch (const FormatError& e) {
                std::cerr << "config error: " << e.what() << '\n';
                return kConfigError;
            }
            std::string dir = cfg.output.dir;
            if (auto d = env_output_dir()) dir = *d;
            if (!e_out.empty()) dir = e_out;
            const ExperimentResult res = run_experiment(cfg, RunOptions{env_workers(e_workers)});
            const auto files = persist(res, dir);
            std::cout << files.trials_csv.string() << '\n' << files.summary_json.string() << '\n';
            if (!e_plot.empty()) {
                const std::string prefix = cfg.output.prefix.empty() ? std::string(to_string(cfg.kind)) : cfg.output.prefix;
                for (const auto& f : emit_plot_data({&res, 1}, plot_kind_from_string(e_plot), dir, prefix)) {
                    std::cout << f.string() << '\n';
                }
            }
            if (e_check) {
                bool ok = true;
                for (const auto& c : evaluate_checks(res)) {
                    std::cout << (c.passed ? "PASS " : "FAIL ") << c.expectation.metric << " = "
                              << (c.value ? format_number(*c.value) : std::string("missing"));
                    if (c.expectation.min) std::cout << " min " << format_number(*c.expectation.min);
                    if (c.expectation.max) std::cout << " max " << format_number(*c.expectation.max);
                    std::cout << '\n';
                    ok = ok && c.passed;
                }
                if (!ok) return kCheckFailed;
            }
        }
    } catch (const FormatError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kConfigError;
    } catch (const PreconditionError& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}
