// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run everything
//   acceptance 3 7        run selected criteria

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tracelab/bounds.hpp"
#include "tracelab/experiment.hpp"
#include "tracelab/generators.hpp"
#include "tracelab/hamilton.hpp"
#include "tracelab/rng.hpp"
#include "tracelab/spectral.hpp"
#include "tracelab/walk.hpp"

using namespace tracelab;
using nlohmann::json;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double n_log_n(std::size_t n) { return static_cast<double>(n) * std::log(static_cast<double>(n)); }

std::vector<Graph> oracle_corpus() {
    std::vector<Graph> out;
    for (std::size_t n = 2; n <= 8; ++n) out.push_back(complete_graph(n));
    for (std::size_t n = 3; n <= 10; ++n) out.push_back(cycle_graph(n));
    for (std::size_t n = 2; n <= 10; ++n) out.push_back(path_graph(n));
    out.push_back(petersen_graph());
    for (std::uint64_t s = 0; s < 20; ++s) out.push_back(random_regular(4 + 2 * (s % 5), 3, derive_seed(31, s)));
    return out;
}

Outcome tetali_equivalence() {
    double worst = 0.0;
    std::size_t pairs = 0;
    for (const Graph& g : oracle_corpus()) {
        auto table = resistance_matrix(g);
        attach_tetali_hitting(table, g);
        const auto exact = hitting_matrix_exact(g);
        const std::size_t n = g.num_vertices();
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = 0; v < n; ++v) {
                worst = std::max(worst, std::abs(hitting_time_tetali(table, g, u, v) - exact[u * n + v]));
                ++pairs;
            }
    }
    return {worst <= 1e-8, std::to_string(pairs) + " ordered pairs, max |tetali - exact| = " + fmt("%.3g", worst)};
}

Outcome resistance_identities() {
    double foster_err = 0.0;
    for (const Graph& g : oracle_corpus()) {
        const auto t = resistance_matrix(g);
        double sum = 0.0;
        for (const auto& e : g.edges()) sum += t.resistance(e.u, e.v);
        foster_err = std::max(foster_err, std::abs(sum - static_cast<double>(g.num_vertices() - 1)));
    }
    const double k5 = std::abs(effective_resistance(complete_graph(5), 0, 1) - 0.4);
    std::size_t violations = 0, checked = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Graph g = random_regular(200, 16, derive_seed(32, s));
        const double lambda = eigen_extremes(g).lambda;
        const auto t = resistance_matrix(g);
        for (Vertex u = 0; u < 200; ++u)
            for (Vertex v = u + 1; v < 200; ++v) {
                const double r = t.resistance(u, v);
                ++checked;
                violations += r < 2.0 / 17.0 || r > 2.0 / (16.0 - lambda);
            }
    }
    const bool ok = foster_err <= 1e-8 && k5 <= 1e-9 && violations == 0;
    return {ok, "Foster max err " + fmt("%.3g", foster_err) + ", |R_K5 - 0.4| = " + fmt("%.3g", k5) + ", sandwich " +
                    std::to_string(violations) + "/" + std::to_string(checked) + " violations"};
}

Outcome coupon_collector() {
    const Graph k50 = complete_graph(50);
    CoverOptions opts;
    opts.trials = 10000;
    opts.seed = 1;
    const auto s = cover_time_empirical(k50, opts);
    const double target = 49.0 * oracle::harmonic(49);
    const double mu_plus = hitting_time_exact(k50, 0, 1);
    const double upper = matthews_bounds(mu_plus, mu_plus, 50).second;
    const bool ok = std::abs(s.mean - target) <= 0.05 * target && upper > s.mean && s.censored == 0;
    return {ok, "mean " + fmt("%.2f", s.mean) + " vs 49 H_49 = " + fmt("%.2f", target) + ", Matthews upper " +
                    fmt("%.2f", upper) + " (mu+ = " + fmt("%.6g", mu_plus) + ")"};
}

Outcome spectral_cover_bound() {
    bool ok = true;
    double worst_ratio = 0.0, worst_nlogn = 0.0;
    const double nlogn3 = 3.0 * n_log_n(500);
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Graph g = random_regular(500, 16, derive_seed(34, s));
        const auto spec = eigen_extremes(g);
        const auto b = cover_time_spectral_bound(500, 16, spec.lambda, 0.1);
        CoverOptions opts;
        opts.trials = 200;
        opts.seed = derive_seed(340, s);
        opts.worst_start = true;
        const auto st = cover_time_empirical(g, opts);
        ok = ok && st.censored == 0 && st.worst_start_mean <= b.cover_upper && st.worst_start_mean <= nlogn3;
        worst_ratio = std::max(worst_ratio, st.worst_start_mean / b.cover_upper);
        worst_nlogn = std::max(worst_nlogn, st.worst_start_mean / n_log_n(500));
    }
    return {ok, "max worst-start mean / spectral bound = " + fmt("%.3f", worst_ratio) + ", max / (n log n) = " +
                    fmt("%.3f", worst_nlogn) + " (limit 3)"};
}

Outcome counterexample() {
    const Graph g = counterexample_expander(100, 3);
    CoverOptions opts;
    opts.trials = 1000;
    opts.seed = 5;
    const auto s = cover_time_empirical(g, opts);
    const double threshold = 2.0 * n_log_n(100);
    const Graph small = counterexample_expander(20, 3);
    const auto ex = check_expansion(small, 3, CertifyMode::exhaustive());
    const auto jo = check_joinedness(small, 3, CertifyMode::exhaustive());
    const bool ok = s.censored == 0 && s.mean >= threshold && ex.expansion_pass == true && jo.joinedness_pass == true;
    return {ok, "mean " + fmt("%.1f", s.mean) + " vs 2 n log n = " + fmt("%.1f", threshold) +
                    "; n = 20 exact certificate: expansion " + (ex.expansion_pass == true ? "pass" : "fail") +
                    ", joinedness " + (jo.joinedness_pass == true ? "pass" : "fail")};
}

Outcome mixing() {
    const Graph g = random_regular(256, 16, 36);
    const auto spec = eigen_extremes(g);
    bool ok = true;
    std::ostringstream os;
    os << "lambda " << fmt("%.3f", spec.lambda);
    for (double xi : {0.25, 0.1, 0.01}) {
        const std::size_t tau = empirical_mixing_time(g, xi);
        const double bound = std::ceil(mixing_time_bound(256, 16, spec.lambda, xi));
        ok = ok && static_cast<double>(tau) <= bound;
        os << "; xi " << xi << ": tau " << tau << " <= " << bound;
    }
    const auto profile = worst_start_tv_profile(g, 40);
    bool monotone = true;
    for (std::size_t t = 1; t < profile.size(); ++t) monotone = monotone && profile[t] <= profile[t - 1] + 1e-12;
    os << "; TV profile " << (monotone ? "non-increasing" : "NOT monotone");
    return {ok && monotone, os.str()};
}

json trace_config(double multiplier) {
    return {{"schema_version", 1},
            {"experiment", "trace_hamilton"},
            {"graph", {{"family", "random_regular"}, {"n", 200}, {"d", 16}, {"seed", 2026}}},
            {"resample_graph", true},
            {"walk_length", {{"multiplier", multiplier}}},
            {"trials", 50},
            {"seed", 7}};
}

Outcome trace_hamiltonicity() {
    const auto high = run_experiment(parse_config(trace_config(1.5)));
    const auto low = run_experiment(parse_config(trace_config(0.5)));
    const double success = high.summary.at("derived").at("success_fraction").get<double>();
    const double high_uncovered = high.summary.at("derived").at("uncovered_fraction").get<double>();
    const double uncovered = low.summary.at("derived").at("uncovered_fraction").get<double>();
    // every found cycle passed verify_cycle inside the Posa search
    const bool ok = success >= 0.95 && uncovered >= 0.5;
    return {ok, "1.5 n log n: Hamiltonian " + fmt("%.2f", success) + " (need 0.95; uncovered traces " +
                    fmt("%.2f", high_uncovered) + "); 0.5 n log n: uncovered " + fmt("%.2f", uncovered) + " (need 0.50)"};
}

Outcome visits_and_returns() {
    const Graph g = random_regular(500, 16, 38);
    const auto length = static_cast<std::size_t>(std::ceil(2.0 * n_log_n(500)));
    const auto strong = strong_cover_estimate(g, length, 200, 381);
    const Graph big = random_regular(1000, 16, 39);
    const auto probe = return_probe(big, 0, 999, default_probe_horizon(1000, 16), 10000, 391, 0.99);
    const auto seg = segmented_visit_experiment(g, length, 16, 200, 382, 499);
    const bool ok = strong.fraction >= 0.95 && probe.ci_low >= 0.125 && seg.hit_frequency >= 0.125;
    return {ok, "strong cover " + fmt("%.3f", strong.fraction) + " (need 0.95); return probe T = " +
                    std::to_string(probe.horizon) + " estimate " + fmt("%.4f", probe.estimate) + ", 99% CI low " +
                    fmt("%.4f", probe.ci_low) + " (need 0.125); segment hit frequency " +
                    fmt("%.4f", seg.hit_frequency) + " (need 0.125)"};
}

Outcome tail_inequalities() {
    std::size_t points = 0, failures = 0;
    std::set<std::size_t> failing_t;
    double worst_gap = 0.0;
    for (std::size_t n = 1; n <= 60; ++n)
        for (int k = 1; k <= 9; ++k) {
            const double p = k / 10.0;
            for (std::size_t t = 0; static_cast<double>(t) <= static_cast<double>(n) * p + 1e-12; ++t) {
                ++points;
                const double bound = binomial_tail_bound(n, p, t);
                const double cdf = oracle::binomial_cdf(n, p, t);
                if (bound < cdf) {
                    ++failures;
                    failing_t.insert(t);
                    worst_gap = std::max(worst_gap, cdf - bound);
                }
            }
        }
    double pz = 0.0;
    for (int k = 1; k <= 99; ++k) {
        const double p = k / 100.0;
        pz = std::max(pz, std::abs(paley_zygmund_lower(p, p) - p));
    }
    std::string ts;
    for (std::size_t t : failing_t) ts += (ts.empty() ? "" : ",") + std::to_string(t);
    return {failures == 0 && pz <= 1e-12,
            "tail bound below exact CDF at " + std::to_string(failures) + "/" + std::to_string(points) +
                " grid points (t in {" + ts + "}, max shortfall " + fmt("%.3g", worst_gap) +
                "); Paley-Zygmund max err " + fmt("%.3g", pz)};
}

Outcome hamilton_oracles() {
    bool ok = hamiltonian_exact(petersen_graph()).status == CycleStatus::proven_absent;
    for (std::size_t n = 3; n <= 20; ++n) {
        const auto c = hamiltonian_exact(cycle_graph(n));
        const auto k = hamiltonian_exact(complete_graph(n));
        ok = ok && c.status == CycleStatus::found && verify_cycle(cycle_graph(n), c.cycle);
        ok = ok && k.status == CycleStatus::found && verify_cycle(complete_graph(n), k.cycle);
    }
    std::size_t posa_found = 0, exact_found = 0, unsound = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Graph g = oracle::erdos_renyi(12, 0.5, derive_seed(310, s));
        const auto ex = hamiltonian_exact(g);
        const auto po = hamiltonian_posa(g, s);
        exact_found += ex.status == CycleStatus::found;
        if (po.status == CycleStatus::found) {
            ++posa_found;
            if (ex.status != CycleStatus::found || !verify_cycle(g, po.cycle)) ++unsound;
        }
    }
    return {ok && unsound == 0, std::string("Petersen absent, C_n and K_n found for n <= 20: ") + (ok ? "yes" : "NO") +
                                    "; n = 12 G(n, 1/2): Posa found " + std::to_string(posa_found) + ", exact found " +
                                    std::to_string(exact_found) + ", unsound " + std::to_string(unsound)};
}

std::vector<json> determinism_configs() {
    const char* texts[] = {
        R"({"experiment":"cover","graph":{"family":"random_regular","n":100,"d":8,"seed":1},"trials":500,"seed":1,"worst_start":false})",
        R"({"experiment":"cover","graph":{"family":"cycle","n":30},"trials":20,"seed":2,"worst_start":true})",
        R"({"experiment":"counterexample","graph":{"family":"counterexample","n":40,"c":3},"trials":200,"seed":3})",
        R"({"experiment":"strong_cover","graph":{"family":"random_regular","n":100,"d":8,"seed":4},"walk_length":{"multiplier":2},"trials":200,"seed":4})",
        R"({"experiment":"blanket","graph":{"family":"random_regular","n":100,"d":8,"seed":5},"params":{"delta":0.1},"trials":100,"seed":5})",
        R"({"experiment":"visits","graph":{"family":"random_regular","n":100,"d":8,"seed":6},"walk_length":{"multiplier":2},"trials":50,"seed":6})",
        R"({"experiment":"return_probe","graph":{"family":"random_regular","n":256,"d":16,"seed":7},"params":{"c":16},"trials":2000,"seed":7})",
        R"({"experiment":"trace_hamilton","graph":{"family":"random_regular","n":100,"d":8,"seed":8},"resample_graph":true,"walk_length":{"multiplier":1.5},"params":{"certify_samples":50},"trials":10,"seed":8})",
        R"({"experiment":"tau","graph":{"family":"random_regular","n":20,"d":4,"seed":9},"resample_graph":true,"walk_length":{"steps":3000},"trials":20,"seed":9})",
        R"({"experiment":"bounds_sweep","grid":{"n":[100,1000],"d":[16,100],"ratio":[2,10,100],"epsilon":[0.1,0.5]}})",
        R"({"experiment":"mixing","graph":{"family":"random_regular","n":64,"d":6,"seed":10},"params":{"xi":0.05}})",
    };
    std::vector<json> out;
    for (const char* t : texts) {
        json j = json::parse(t);
        j["schema_version"] = 1;
        out.push_back(j);
    }
    return out;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome determinism() {
    const auto root = std::filesystem::temp_directory_path() / "tracelab_acceptance_determinism";
    std::filesystem::remove_all(root);
    std::size_t identical = 0, total = 0;
    std::string mismatches;
    for (const json& j : determinism_configs()) {
        const ExperimentConfig cfg = parse_config(j);
        std::vector<std::string> csvs;
        int run = 0;
        for (std::size_t workers : {1u, 1u, 8u}) {
            const auto dir = root / std::to_string(run++);
            const auto files = persist(run_experiment(cfg, {workers}), dir);
            csvs.push_back(slurp(files.trials_csv));
        }
        ++total;
        if (csvs[0] == csvs[1] && csvs[0] == csvs[2] && !csvs[0].empty()) {
            ++identical;
        } else {
            mismatches += " " + std::string(to_string(cfg.kind));
        }
    }
    std::filesystem::remove_all(root);
    return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                    " experiments byte-identical over runs and workers {1, 8}" + mismatches};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "tetali-oracle-equivalence", 10, tetali_equivalence},
        {2, "resistance-identities", 60, resistance_identities},
        {3, "cover-time-coupon-collector", 30, coupon_collector},
        {4, "spectral-cover-bound", 600, spectral_cover_bound},
        {5, "counterexample-slow-cover", 300, counterexample},
        {6, "mixing-time-bound", 120, mixing},
        {7, "trace-hamiltonicity-threshold", 900, trace_hamiltonicity},
        {8, "visit-counts-and-returns", 600, visits_and_returns},
        {9, "tail-inequalities", 5, tail_inequalities},
        {10, "hamiltonicity-oracles", 120, hamilton_oracles},
        {11, "determinism", 300, determinism},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));

    int failed = 0;
    for (const Criterion& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.limit_seconds;
        const bool pass = o.ok && in_time;
        failed += !pass;
        std::printf("%s %2d %-30s %s [%.1fs / %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), secs, c.limit_seconds, in_time ? "" : " OVER TIME");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
