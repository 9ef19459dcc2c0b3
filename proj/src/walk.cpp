#include "tracelab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <boost/math/distributions/binomial.hpp>

#include "tracelab/errors.hpp"
#include "tracelab/parallel.hpp"
#include "tracelab/rng.hpp"

namespace tracelab {

namespace {

inline Vertex step_from(const Graph& g, Vertex v, Rng& rng) {
    const auto nb = g.neighbors(v);
    return nb[rng.below(nb.size())];
}

void require_start(const Graph& g, Vertex start) {
    if (start >= g.num_vertices()) throw PreconditionError("start vertex out of range");
}

void require_walkable(const Graph& g) {
    if (!is_connected(g)) throw PreconditionError("random walk experiments need a connected graph");
    if (g.num_vertices() >= 2) {
        for (Vertex v = 0; v < g.num_vertices(); ++v) {
            if (g.degree(v) == 0) throw PreconditionError("isolated vertex");
        }
    }
}

}  // namespace

WalkTrace simulate_walk(const Graph& g, Vertex start, std::size_t length, std::uint64_t seed, bool record_path) {
    require_start(g, start);
    if (length > 0 && g.degree(start) == 0) throw PreconditionError("walk cannot leave isolated start vertex");
    const std::size_t n = g.num_vertices();
    WalkTrace t;
    t.start = start;
    t.length = length;
    t.seed = seed;
    t.visit_counts.assign(n, 0);
    t.first_visit_step.assign(n, kNeverVisited);
    if (record_path) t.path.reserve(length + 1);

    std::unordered_map<std::uint64_t, std::size_t> first_use;
    std::size_t unvisited = n;
    Vertex cur = start;
    auto visit = [&](Vertex v, std::size_t step) {
        if (t.visit_counts[v]++ == 0) {
            t.first_visit_step[v] = static_cast<std::int64_t>(step);
            if (--unvisited == 0) t.cover_step = step;
        }
        if (record_path) t.path.push_back(v);
    };
    visit(cur, 0);

    Rng rng(seed);
    for (std::size_t step = 1; step <= length; ++step) {
        const Vertex next = step_from(g, cur, rng);
        const Vertex a = std::min(cur, next), b = std::max(cur, next);
        first_use.try_emplace(static_cast<std::uint64_t>(a) << 32 | b, step);
        visit(next, step);
        cur = next;
    }
    t.end = cur;

    t.trace_edges.reserve(first_use.size());
    for (const auto& [key, step] : first_use) {
        t.trace_edges.push_back({{static_cast<Vertex>(key >> 32), static_cast<Vertex>(key & 0xffffffffu)}, step});
    }
    std::sort(t.trace_edges.begin(), t.trace_edges.end(),
              [](const TraceEdge& x, const TraceEdge& y) { return x.edge < y.edge; });
    return t;
}

Graph trace_graph(const WalkTrace& trace, const Graph& g) {
    if (trace.num_vertices() != g.num_vertices()) throw PreconditionError("trace was not produced on this graph");
    return trace_graph_prefix(trace, trace.length);
}

Graph trace_graph_prefix(const WalkTrace& trace, std::size_t steps) {
    std::vector<Edge> edges;
    edges.reserve(trace.trace_edges.size());
    for (const TraceEdge& e : trace.trace_edges) {
        if (e.first_step <= steps) edges.push_back(e.edge);
    }
    return Graph::from_edges(trace.num_vertices(), edges);
}

double min_visit_ratio(const WalkTrace& trace) {
    const std::size_t n = trace.num_vertices();
    if (n < 2) throw PreconditionError("min_visit_ratio needs n >= 2");
    const auto lowest = *std::min_element(trace.visit_counts.begin(), trace.visit_counts.end());
    return static_cast<double>(lowest) / std::log(static_cast<double>(n));
}

std::vector<Vertex> trial_starts(std::size_t n, std::size_t trials, std::uint64_t seed, std::optional<Vertex> fixed) {
    if (fixed) {
        if (*fixed >= n) throw PreconditionError("start vertex out of range");
        return std::vector<Vertex>(trials, *fixed);
    }
    std::vector<Vertex> perm(n);
    for (Vertex v = 0; v < n; ++v) perm[v] = v;
    Rng rng(derive_seed(seed, 0xa11'57a27ULL));
    rng.shuffle(perm.begin(), perm.end());
    std::vector<Vertex> out(trials);
    for (std::size_t i = 0; i < trials; ++i) out[i] = perm[i % n];
    return out;
}

std::size_t default_cover_budget(std::size_t n) {
    const double nn = static_cast<double>(n);
    return std::max<std::size_t>(4 * n * n, static_cast<std::size_t>(100.0 * nn * (std::log(nn) + 1.0)));
}

std::optional<std::size_t> cover_run(const Graph& g, Vertex start, std::uint64_t seed, std::size_t budget) {
    const std::size_t n = g.num_vertices();
    std::vector<char> seen(n, 0);
    seen[start] = 1;
    std::size_t remaining = n - 1;
    if (remaining == 0) return 0;
    Rng rng(seed);
    Vertex cur = start;
    for (std::size_t step = 1; step <= budget; ++step) {
        cur = step_from(g, cur, rng);
        if (!seen[cur]) {
            seen[cur] = 1;
            if (--remaining == 0) return step;
        }
    }
    return std::nullopt;
}

CoverStatistics cover_time_empirical(const Graph& g, const CoverOptions& opts) {
    require_walkable(g);
    const std::size_t n = g.num_vertices();
    const std::size_t budget = opts.budget ? opts.budget : default_cover_budget(n);
    CoverStatistics stats;

    std::vector<Vertex> starts;
    if (opts.worst_start) {
        if (n <= opts.sweep_limit) {
            starts = trial_starts(n, n, opts.seed);
            std::sort(starts.begin(), starts.end());
        } else {
            starts = trial_starts(n, std::min(opts.start_samples, n), opts.seed);
        }
        stats.starts = starts;
    } else {
        starts = trial_starts(n, opts.trials, opts.seed, opts.start);
    }
    const std::size_t per_start = opts.worst_start ? opts.trials : 1;
    const std::size_t total = opts.worst_start ? starts.size() * opts.trials : opts.trials;

    stats.records.resize(total);
    parallel_for(total, opts.workers, [&](std::size_t i) {
        CoverTrial& rec = stats.records[i];
        rec.trial = i;
        rec.start = opts.worst_start ? starts[i / per_start] : starts[i];
        rec.seed = derive_seed(opts.seed, i);
        rec.cover_step = cover_run(g, rec.start, rec.seed, budget);
    });

    stats.trials = total;
    double sum = 0.0, sum_sq = 0.0;
    std::size_t ok = 0;
    for (const CoverTrial& r : stats.records) {
        if (r.censored()) {
            ++stats.censored;
            continue;
        }
        const auto x = static_cast<double>(*r.cover_step);
        sum += x;
        sum_sq += x * x;
        stats.max = std::max(stats.max, x);
        ++ok;
    }
    if (ok > 0) {
        stats.mean = sum / static_cast<double>(ok);
        if (ok > 1) {
            const double var = std::max(0.0, (sum_sq - sum * sum / static_cast<double>(ok)) / static_cast<double>(ok - 1));
            stats.standard_error = std::sqrt(var / static_cast<double>(ok));
        }
    }
    if (opts.worst_start) {
        stats.start_means.assign(starts.size(), 0.0);
        for (std::size_t s = 0; s < starts.size(); ++s) {
            double acc = 0.0;
            std::size_t cnt = 0;
            for (std::size_t k = 0; k < per_start; ++k) {
                const auto& r = stats.records[s * per_start + k];
                if (!r.censored()) {
                    acc += static_cast<double>(*r.cover_step);
                    ++cnt;
                }
            }
            stats.start_means[s] = cnt ? acc / static_cast<double>(cnt) : 0.0;
            if (stats.start_means[s] > stats.worst_start_mean || s == 0) {
                stats.worst_start_mean = stats.start_means[s];
                stats.worst_start = starts[s];
            }
        }
    }
    return stats;
}

StrongCoverResult strong_cover_estimate(const Graph& g, std::size_t length, std::size_t trials, std::uint64_t seed,
                                        std::size_t workers) {
    require_walkable(g);
    const auto starts = trial_starts(g.num_vertices(), trials, seed);
    StrongCoverResult out;
    out.trials = trials;
    out.records.resize(trials);
    parallel_for(trials, workers, [&](std::size_t i) {
        CoverTrial& rec = out.records[i];
        rec.trial = i;
        rec.start = starts[i];
        rec.seed = derive_seed(seed, i);
        rec.cover_step = cover_run(g, rec.start, rec.seed, length);
    });
    for (const auto& r : out.records) out.covered += r.censored() ? 0 : 1;
    out.fraction = trials ? static_cast<double>(out.covered) / static_cast<double>(trials) : 0.0;
    return out;
}

BlanketResult blanket_time(const Graph& g, Vertex start, double delta, std::uint64_t seed, std::size_t budget) {
    require_start(g, start);
    if (!g.regular_degree()) throw PreconditionError("blanket_time needs a regular graph");
    if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("blanket_time needs 0 < delta < 1");
    require_walkable(g);
    const std::size_t n = g.num_vertices();
    const double rate = delta / static_cast<double>(n);

    // histogram[k] = number of vertices visited exactly k times; the minimum
    // count only ever increases, so it is tracked by a moving pointer.
    std::vector<std::uint64_t> counts(n, 0);
    std::vector<std::size_t> histogram(2, 0);
    histogram[0] = n;
    std::size_t min_count = 0;
    auto visit = [&](Vertex v) {
        const std::uint64_t c = counts[v]++;
        if (histogram.size() <= c + 1) histogram.resize(2 * (c + 2), 0);
        --histogram[c];
        ++histogram[c + 1];
        while (histogram[min_count] == 0) ++min_count;
    };

    BlanketResult out;
    visit(start);
    auto blanket_holds = [&](std::size_t t) {
        return static_cast<double>(min_count) >= rate * static_cast<double>(t);
    };
    if (min_count > 0) {
        out.cover_step = 0;
        if (blanket_holds(0)) {
            out.blanket_step = 0;
            return out;
        }
    }
    Rng rng(seed);
    Vertex cur = start;
    for (std::size_t t = 1; t <= budget; ++t) {
        cur = step_from(g, cur, rng);
        visit(cur);
        if (min_count > 0) {
            if (!out.cover_step) out.cover_step = t;
            if (blanket_holds(t)) {
                out.blanket_step = t;
                return out;
            }
        }
    }
    return out;
}

std::size_t default_probe_horizon(std::size_t n, double c) {
    if (!(c > 0.0)) throw PreconditionError("probe horizon needs C > 0");
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) / std::sqrt(c)));
}

std::pair<double, double> clopper_pearson(std::size_t successes, std::size_t trials, double confidence) {
    if (trials == 0) return {0.0, 1.0};
    using boost::math::binomial_distribution;
    const double alpha = (1.0 - confidence) / 2.0;
    const auto k = static_cast<double>(successes), m = static_cast<double>(trials);
    const double lo = successes == 0 ? 0.0 : binomial_distribution<>::find_lower_bound_on_p(m, k, alpha);
    const double hi = successes == trials ? 1.0 : binomial_distribution<>::find_upper_bound_on_p(m, k, alpha);
    return {lo, hi};
}

ReturnProbeResult return_probe(const Graph& g, Vertex u, Vertex v, std::size_t horizon, std::size_t trials,
                               std::uint64_t seed, double confidence, std::size_t workers) {
    require_start(g, u);
    require_start(g, v);
    if (u == v) throw PreconditionError("return_probe needs u != v");
    require_walkable(g);
    std::vector<char> hit(trials, 0);
    parallel_for(trials, workers, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        Vertex cur = u;
        for (std::size_t t = 1; t <= horizon; ++t) {
            cur = step_from(g, cur, rng);
            if (cur == v) {
                hit[i] = 1;
                break;
            }
        }
    });
    ReturnProbeResult r;
    r.horizon = horizon;
    r.trials = trials;
    r.confidence = confidence;
    r.hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    r.hit_by_trial.assign(hit.begin(), hit.end());
    r.estimate = trials ? static_cast<double>(r.hits) / static_cast<double>(trials) : 0.0;
    std::tie(r.ci_low, r.ci_high) = clopper_pearson(r.hits, trials, confidence);
    return r;
}

SegmentReport segmented_visit_experiment(const Graph& g, std::size_t length, double c, std::size_t trials,
                                         std::uint64_t seed, Vertex target, std::size_t workers) {
    require_start(g, target);
    require_walkable(g);
    const std::size_t n = g.num_vertices();
    if (n < 2) throw PreconditionError("segmented experiment needs n >= 2");
    if (!(c > 0.0)) throw PreconditionError("segmented experiment needs C > 0");
    const double logn = std::log(static_cast<double>(n));
    SegmentReport rep;
    rep.length = length;
    rep.target = target;
    rep.segment_length = static_cast<std::size_t>(std::ceil(10.0 * logn + static_cast<double>(n) / std::sqrt(c)));
    const auto starts = trial_starts(n, trials, seed);
    rep.records.resize(trials);
    parallel_for(trials, workers, [&](std::size_t i) {
        SegmentTrial& rec = rep.records[i];
        rec.trial = i;
        rec.start = starts[i];
        rec.seed = derive_seed(seed, i);
        rec.segments = length / rep.segment_length;
        std::vector<std::uint64_t> counts(n, 0);
        Rng rng(rec.seed);
        Vertex cur = rec.start;
        ++counts[cur];
        bool hit_in_segment = false;
        for (std::size_t t = 1; t <= length; ++t) {
            cur = step_from(g, cur, rng);
            ++counts[cur];
            // Positions t in ((k-1) len, k len] form segment k; a trailing partial segment is dropped.
            if (cur == target) hit_in_segment = true;
            if (t % rep.segment_length == 0) {
                rec.segments_hit += hit_in_segment ? 1 : 0;
                hit_in_segment = false;
            }
        }
        rec.rho_hat = static_cast<double>(*std::min_element(counts.begin(), counts.end())) / logn;
    });
    std::vector<double> rhos;
    rhos.reserve(trials);
    for (const auto& r : rep.records) {
        rep.total_segments += r.segments;
        rep.total_hits += r.segments_hit;
        rhos.push_back(r.rho_hat);
    }
    rep.hit_frequency = rep.total_segments ? static_cast<double>(rep.total_hits) / static_cast<double>(rep.total_segments) : 0.0;
    if (!rhos.empty()) {
        std::sort(rhos.begin(), rhos.end());
        const std::size_t m = rhos.size();
        rep.rho_median = m % 2 ? rhos[m / 2] : 0.5 * (rhos[m / 2 - 1] + rhos[m / 2]);
        const double half = 0.98 * std::sqrt(static_cast<double>(m));  // 1.96 sqrt(m) / 2
        const auto lo = static_cast<std::ptrdiff_t>(std::floor(static_cast<double>(m) / 2.0 - half));
        const auto hi = static_cast<std::ptrdiff_t>(std::ceil(static_cast<double>(m) / 2.0 + half));
        rep.rho_median_ci_low = rhos[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(lo, 0, static_cast<std::ptrdiff_t>(m) - 1))];
        rep.rho_median_ci_high = rhos[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(hi, 0, static_cast<std::ptrdiff_t>(m) - 1))];
    }
    return rep;
}

}  // namespace tracelab
