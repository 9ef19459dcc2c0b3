#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tracelab/graph.hpp"

namespace tracelab {

inline constexpr std::int64_t kNeverVisited = -1;

struct TraceEdge {
    Edge edge;
    std::size_t first_step = 0;  // step t at which X_{t-1} X_t first used this edge
};

/// One simple random walk X_0 .. X_L.
///
/// visit_counts includes the start position, so the counts sum to L + 1.
struct WalkTrace {
    Vertex start = 0;
    Vertex end = 0;
    std::size_t length = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> visit_counts;
    std::vector<std::int64_t> first_visit_step;  // kNeverVisited when unvisited
    std::vector<TraceEdge> trace_edges;          // sorted by edge
    std::optional<std::size_t> cover_step;
    std::vector<Vertex> path;                    // only with record_path

    std::size_t num_vertices() const noexcept { return visit_counts.size(); }
};

/// Throws PreconditionError if `start` is isolated (and L > 0) or out of range.
WalkTrace simulate_walk(const Graph& g, Vertex start, std::size_t length, std::uint64_t seed,
                        bool record_path = false);

/// Simple graph on all n vertices whose edges are the traversed ones.
Graph trace_graph(const WalkTrace& trace, const Graph& g);

/// Trace graph of the prefix X_0 .. X_steps.
Graph trace_graph_prefix(const WalkTrace& trace, std::size_t steps);

/// min_v gamma(v) / log n; zero when some vertex was never visited.
double min_visit_ratio(const WalkTrace& trace);

/// Starts used by the Monte-Carlo drivers: trial i starts at perm[i mod n],
/// perm a seeded permutation, unless a fixed start is given.
std::vector<Vertex> trial_starts(std::size_t n, std::size_t trials, std::uint64_t seed,
                                 std::optional<Vertex> fixed = std::nullopt);

/// Default step budget for cover runs: max(4 n^2, 100 n (log n + 1)).
std::size_t default_cover_budget(std::size_t n);

struct CoverTrial {
    std::size_t trial = 0;
    Vertex start = 0;
    std::uint64_t seed = 0;
    std::optional<std::size_t> cover_step;  // empty when censored

    bool censored() const noexcept { return !cover_step.has_value(); }
};

struct CoverOptions {
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    /// Estimate max over starts of the expected cover time: sweep every start
    /// when n <= sweep_limit, otherwise `start_samples` seeded distinct starts,
    /// each with `trials` walks.
    bool worst_start = false;
    std::size_t sweep_limit = 200;
    std::size_t start_samples = 20;
    std::optional<Vertex> start;  // fixed start when not in worst-start mode
    std::size_t budget = 0;       // 0 selects default_cover_budget(n)
    std::size_t workers = 1;
};

struct CoverStatistics {
    std::size_t trials = 0;
    std::size_t censored = 0;
    double mean = 0.0;  // over uncensored trials
    double standard_error = 0.0;
    double max = 0.0;
    /// Worst-start mode: mean per start (same order as `starts`) and its maximum.
    std::vector<Vertex> starts;
    std::vector<double> start_means;
    double worst_start_mean = 0.0;
    Vertex worst_start = 0;
    std::vector<CoverTrial> records;
};

/// Throws PreconditionError on disconnected graphs.
CoverStatistics cover_time_empirical(const Graph& g, const CoverOptions& opts);

/// Steps until every vertex is visited, or nullopt at `budget`.
std::optional<std::size_t> cover_run(const Graph& g, Vertex start, std::uint64_t seed, std::size_t budget);

struct StrongCoverResult {
    std::size_t trials = 0;
    std::size_t covered = 0;
    double fraction = 0.0;
    std::vector<CoverTrial> records;  // cover_step empty when the walk of length L missed a vertex
};

StrongCoverResult strong_cover_estimate(const Graph& g, std::size_t length, std::size_t trials,
                                        std::uint64_t seed, std::size_t workers = 1);

struct BlanketResult {
    std::optional<std::size_t> cover_step;
    std::optional<std::size_t> blanket_step;  // empty when censored at the budget

    bool censored() const noexcept { return !blanket_step.has_value(); }
};

/// First t >= cover time with min_v gamma_t(v) >= delta t / n, where gamma_t
/// counts visits among X_0 .. X_t. Needs a regular graph and 0 < delta < 1.
BlanketResult blanket_time(const Graph& g, Vertex start, double delta, std::uint64_t seed,
                           std::size_t budget);

struct ReturnProbeResult {
    std::size_t horizon = 0;
    std::size_t trials = 0;
    std::size_t hits = 0;
    double estimate = 0.0;
    double confidence = 0.99;
    double ci_low = 0.0;  // Clopper-Pearson
    double ci_high = 1.0;
    std::vector<std::uint8_t> hit_by_trial;
};

/// T = floor(n / sqrt(C)).
std::size_t default_probe_horizon(std::size_t n, double c);

/// Fraction of walks from u that visit v during steps 1..T.
ReturnProbeResult return_probe(const Graph& g, Vertex u, Vertex v, std::size_t horizon, std::size_t trials,
                               std::uint64_t seed, double confidence = 0.99, std::size_t workers = 1);

/// Two-sided exact binomial interval.
std::pair<double, double> clopper_pearson(std::size_t successes, std::size_t trials, double confidence);

struct SegmentTrial {
    std::size_t trial = 0;
    Vertex start = 0;
    std::uint64_t seed = 0;
    double rho_hat = 0.0;
    std::size_t segments = 0;
    std::size_t segments_hit = 0;
};

struct SegmentReport {
    std::size_t length = 0;
    std::size_t segment_length = 0;  // ceil(10 log n + n / sqrt(C))
    Vertex target = 0;
    std::size_t total_segments = 0;
    std::size_t total_hits = 0;
    double hit_frequency = 0.0;
    double rho_median = 0.0;
    double rho_median_ci_low = 0.0;  // order-statistic 95% interval
    double rho_median_ci_high = 0.0;
    std::vector<SegmentTrial> records;
};

/// Walks of length L split into consecutive segments of length 10 log n + n/sqrt(C);
/// records per segment whether `target` was visited, and min_visit_ratio per walk.
SegmentReport segmented_visit_experiment(const Graph& g, std::size_t length, double c, std::size_t trials,
                                         std::uint64_t seed, Vertex target, std::size_t workers = 1);

}  // namespace tracelab
