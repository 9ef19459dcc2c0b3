#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tracelab/graph.hpp"

namespace tracelab {

/// Exhaustive or seeded-sampling certification mode.
struct CertifyMode {
    bool exact = true;
    std::size_t samples = 0;  // per set size (expansion) or total pairs (joinedness)
    std::uint64_t seed = 0;
    std::size_t budget = 50'000'000;  // max sets enumerated in exact mode

    static CertifyMode exhaustive() { return {}; }
    static CertifyMode sampled(std::size_t k, std::uint64_t seed) { return {false, k, seed, 0}; }
};

/// Largest set size tested for expansion: floor(n / 2c).
std::size_t expansion_size_cap(std::size_t n, double c);
/// Size of the joined sets: ceil(n / 2c).
std::size_t joinedness_set_size(std::size_t n, double c);

struct ExpanderVerdict {
    double c = 0.0;
    bool exact = true;
    std::size_t samples = 0;

    std::optional<bool> expansion_pass;  // unset when not checked
    std::vector<Vertex> expansion_witness;
    std::size_t witness_neighborhood = 0;
    std::size_t expansion_sets_checked = 0;

    std::optional<bool> joinedness_pass;
    std::vector<Vertex> witness_a;
    std::vector<Vertex> witness_b;
    std::size_t joinedness_sets_checked = 0;

    bool passed() const { return expansion_pass.value_or(true) && joinedness_pass.value_or(true); }
};

/// Every X with 1 <= |X| <= n/2c has |N(X)| >= c|X|.
/// Exact mode throws PreconditionError beyond mode.budget sets.
ExpanderVerdict check_expansion(const Graph& g, double c, const CertifyMode& mode);

/// Some edge joins every two disjoint sets of size ceil(n/2c).
ExpanderVerdict check_joinedness(const Graph& g, double c, const CertifyMode& mode);

/// Both halves of the definition in one verdict.
ExpanderVerdict certify_expander(const Graph& g, double c, const CertifyMode& mode);

enum class CycleStatus { found, proven_absent, budget_exhausted };
enum class CycleMethod { exact, posa };

std::string_view to_string(CycleStatus s);
std::string_view to_string(CycleMethod m);

struct CycleResult {
    CycleStatus status = CycleStatus::budget_exhausted;
    CycleMethod method = CycleMethod::exact;
    std::vector<Vertex> cycle;
    std::size_t work = 0;      // DP states, search nodes, or rotations
    std::size_t restarts = 0;  // Posa only
};

/// True iff `cycle` lists every vertex exactly once and consecutive entries
/// (cyclically) are adjacent.
bool verify_cycle(const Graph& g, std::span<const Vertex> cycle);

inline constexpr std::size_t kSubsetDpLimit = 24;

/// Subset DP over (vertex set, endpoint) for n <= 24; pruned backtracking
/// above, limited to `budget` search nodes.
CycleResult hamiltonian_exact(const Graph& g, std::size_t budget = 50'000'000);

struct PosaOptions {
    std::size_t max_rotations = 0;  // per restart; 0 selects 100 n
    std::size_t max_restarts = 50;
};

/// Randomized rotation-extension search. Never returns an unverified cycle.
CycleResult hamiltonian_posa(const Graph& g, std::uint64_t seed, const PosaOptions& opts = {});

struct TauOptions {
    std::size_t exact_limit = kSubsetDpLimit;
    std::size_t exact_budget = 50'000'000;
    PosaOptions posa;
};

struct TauResult {
    std::optional<std::size_t> tau_1;   // trace reaches minimum degree 1
    std::optional<std::size_t> tau_2;   // trace reaches minimum degree 2
    std::optional<std::size_t> tau_hc;  // trace becomes Hamiltonian; empty when censored
    bool exact = true;                  // false: tau_hc is an upper bound (heuristic probes)
    std::size_t probes = 0;

    bool censored() const noexcept { return !tau_hc.has_value(); }
};

/// Walks L_max steps from `start`, then locates the first prefix whose trace is
/// Hamiltonian by binary search over edge-arrival times (trace prefixes grow
/// under inclusion, so Hamiltonicity is monotone in t).
TauResult tau_times(const Graph& g, Vertex start, std::size_t max_length, std::uint64_t seed,
                    const TauOptions& opts = {});

}  // namespace tracelab
