#include "tracelab/hamilton.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>

#include "tracelab/errors.hpp"
#include "tracelab/rng.hpp"
#include "tracelab/walk.hpp"

namespace tracelab {

std::string_view to_string(CycleStatus s) {
    switch (s) {
        case CycleStatus::found: return "found";
        case CycleStatus::proven_absent: return "proven-absent";
        case CycleStatus::budget_exhausted: return "budget-exhausted";
    }
    return "unknown";
}

std::string_view to_string(CycleMethod m) { return m == CycleMethod::exact ? "exact" : "posa"; }

std::size_t expansion_size_cap(std::size_t n, double c) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) / (2.0 * c)));
}

std::size_t joinedness_set_size(std::size_t n, double c) {
    return static_cast<std::size_t>(std::ceil(static_cast<double>(n) / (2.0 * c) - 1e-12));
}

namespace {

using Words = std::vector<std::uint64_t>;

class BitGraph {
public:
    explicit BitGraph(const Graph& g) : n_(g.num_vertices()), words_((n_ + 63) / 64), rows_(n_ * words_, 0) {
        for (Vertex v = 0; v < n_; ++v) {
            for (Vertex w : g.neighbors(v)) rows_[v * words_ + w / 64] |= std::uint64_t{1} << (w % 64);
        }
    }
    std::size_t n() const { return n_; }
    std::size_t words() const { return words_; }
    const std::uint64_t* row(Vertex v) const { return rows_.data() + v * words_; }

private:
    std::size_t n_, words_;
    Words rows_;
};

double binomial_capped(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
        if (r > 1e18) return 1e18;
    }
    return r;
}

// Visits every subset of size 1..max_size in lexicographic order (each subset
// after its prefix). visit(members, member_mask, neighbor_union) returns true to stop.
class SubsetEnumerator {
public:
    using Visit = std::function<bool(const std::vector<Vertex>&, const std::uint64_t*, const std::uint64_t*)>;

    SubsetEnumerator(const BitGraph& bg, std::size_t max_size)
        : bg_(bg), max_size_(max_size), unions_((max_size + 1) * bg.words(), 0), mask_(bg.words(), 0) {}

    std::size_t run(const Visit& visit) {
        visited_ = 0;
        members_.clear();
        if (max_size_ > 0) dfs(0, visit);
        return visited_;
    }

private:
    bool dfs(Vertex from, const Visit& visit) {
        const std::size_t depth = members_.size();
        const std::size_t W = bg_.words();
        for (Vertex v = from; v < bg_.n(); ++v) {
            members_.push_back(v);
            mask_[v / 64] |= std::uint64_t{1} << (v % 64);
            std::uint64_t* cur = unions_.data() + (depth + 1) * W;
            const std::uint64_t* prev = unions_.data() + depth * W;
            const std::uint64_t* r = bg_.row(v);
            for (std::size_t i = 0; i < W; ++i) cur[i] = prev[i] | r[i];
            ++visited_;
            bool stop = visit(members_, mask_.data(), cur);
            if (!stop && depth + 1 < max_size_) stop = dfs(v + 1, visit);
            mask_[v / 64] &= ~(std::uint64_t{1} << (v % 64));
            members_.pop_back();
            if (stop) return true;
        }
        return false;
    }

    const BitGraph& bg_;
    std::size_t max_size_;
    Words unions_;
    Words mask_;
    std::vector<Vertex> members_;
    std::size_t visited_ = 0;
};

void require_c(double c) {
    if (!(c >= 1.0)) throw PreconditionError("expander parameter C must be >= 1");
}

void check_budget(std::size_t n, std::size_t from, std::size_t to, const CertifyMode& mode) {
    double total = 0.0;
    for (std::size_t s = from; s <= to; ++s) total += binomial_capped(n, s);
    if (total > static_cast<double>(mode.budget)) {
        throw PreconditionError("exact certification would enumerate about " + std::to_string(total) +
                                " sets (budget " + std::to_string(mode.budget) + "); use sampled mode");
    }
}

std::size_t outside_count(const std::uint64_t* nb, const std::uint64_t* mask, std::size_t words) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < words; ++i) count += static_cast<std::size_t>(std::popcount(nb[i] & ~mask[i]));
    return count;
}

std::vector<Vertex> sample_subset(std::vector<Vertex>& perm, std::size_t size, Rng& rng) {
    const std::size_t n = perm.size();
    for (std::size_t k = 0; k < size; ++k) std::swap(perm[k], perm[k + rng.below(n - k)]);
    return {perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(size)};
}

void fill_expansion(const Graph& g, double c, const CertifyMode& mode, ExpanderVerdict& v) {
    const std::size_t n = g.num_vertices();
    const std::size_t cap = std::min(expansion_size_cap(n, c), n);
    v.expansion_pass = true;
    if (cap == 0) return;
    if (mode.exact) {
        check_budget(n, 1, cap, mode);
        BitGraph bg(g);
        SubsetEnumerator en(bg, cap);
        v.expansion_sets_checked = en.run([&](const std::vector<Vertex>& x, const std::uint64_t* mask, const std::uint64_t* nb) {
            const std::size_t boundary = outside_count(nb, mask, bg.words());
            if (static_cast<double>(boundary) < c * static_cast<double>(x.size())) {
                v.expansion_pass = false;
                v.expansion_witness = x;
                v.witness_neighborhood = boundary;
                return true;
            }
            return false;
        });
        return;
    }
    Rng rng(mode.seed);
    std::vector<Vertex> perm(n);
    for (Vertex i = 0; i < n; ++i) perm[i] = i;
    std::vector<std::uint32_t> stamp(n, 0);
    std::uint32_t epoch = 0;
    for (std::size_t s = 1; s <= cap; ++s) {
        for (std::size_t k = 0; k < mode.samples; ++k) {
            auto x = sample_subset(perm, s, rng);
            ++epoch;
            for (Vertex u : x) stamp[u] = epoch;
            std::size_t boundary = 0;
            for (Vertex u : x) {
                for (Vertex w : g.neighbors(u)) {
                    if (stamp[w] != epoch) {
                        stamp[w] = epoch;
                        ++boundary;
                    }
                }
            }
            ++v.expansion_sets_checked;
            if (static_cast<double>(boundary) < c * static_cast<double>(s)) {
                std::sort(x.begin(), x.end());
                v.expansion_pass = false;
                v.expansion_witness = std::move(x);
                v.witness_neighborhood = boundary;
                return;
            }
        }
    }
}

void fill_joinedness(const Graph& g, double c, const CertifyMode& mode, ExpanderVerdict& v) {
    const std::size_t n = g.num_vertices();
    const std::size_t s = joinedness_set_size(n, c);
    v.joinedness_pass = true;
    if (s == 0 || 2 * s > n) return;
    if (mode.exact) {
        check_budget(n, s, s, mode);
        BitGraph bg(g);
        SubsetEnumerator en(bg, s);
        en.run([&](const std::vector<Vertex>& a, const std::uint64_t* mask, const std::uint64_t* nb) {
            if (a.size() != s) return false;
            ++v.joinedness_sets_checked;
            std::vector<Vertex> free;
            for (Vertex w = 0; w < n && free.size() < s; ++w) {
                const std::uint64_t bit = std::uint64_t{1} << (w % 64);
                if (!(mask[w / 64] & bit) && !(nb[w / 64] & bit)) free.push_back(w);
            }
            if (free.size() >= s) {
                v.joinedness_pass = false;
                v.witness_a = a;
                v.witness_b = std::move(free);
                return true;
            }
            return false;
        });
        return;
    }
    Rng rng(mode.seed);
    std::vector<Vertex> perm(n);
    for (Vertex i = 0; i < n; ++i) perm[i] = i;
    std::vector<char> in_b(n, 0);
    for (std::size_t k = 0; k < mode.samples; ++k) {
        auto both = sample_subset(perm, 2 * s, rng);
        std::vector<Vertex> a(both.begin(), both.begin() + static_cast<std::ptrdiff_t>(s));
        std::vector<Vertex> b(both.begin() + static_cast<std::ptrdiff_t>(s), both.end());
        for (Vertex w : b) in_b[w] = 1;
        bool joined = false;
        for (Vertex u : a) {
            for (Vertex w : g.neighbors(u)) {
                if (in_b[w]) {
                    joined = true;
                    break;
                }
            }
            if (joined) break;
        }
        for (Vertex w : b) in_b[w] = 0;
        ++v.joinedness_sets_checked;
        if (!joined) {
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            v.joinedness_pass = false;
            v.witness_a = std::move(a);
            v.witness_b = std::move(b);
            return;
        }
    }
}

ExpanderVerdict make_verdict(double c, const CertifyMode& mode) {
    ExpanderVerdict v;
    v.c = c;
    v.exact = mode.exact;
    v.samples = mode.exact ? 0 : mode.samples;
    return v;
}

}  // namespace

ExpanderVerdict check_expansion(const Graph& g, double c, const CertifyMode& mode) {
    require_c(c);
    auto v = make_verdict(c, mode);
    fill_expansion(g, c, mode, v);
    return v;
}

ExpanderVerdict check_joinedness(const Graph& g, double c, const CertifyMode& mode) {
    require_c(c);
    auto v = make_verdict(c, mode);
    fill_joinedness(g, c, mode, v);
    return v;
}

ExpanderVerdict certify_expander(const Graph& g, double c, const CertifyMode& mode) {
    require_c(c);
    auto v = make_verdict(c, mode);
    fill_expansion(g, c, mode, v);
    CertifyMode second = mode;
    second.seed = derive_seed(mode.seed, 1);
    fill_joinedness(g, c, second, v);
    return v;
}

bool verify_cycle(const Graph& g, std::span<const Vertex> cycle) {
    const std::size_t n = g.num_vertices();
    if (n < 3 || cycle.size() != n) return false;
    std::vector<char> seen(n, 0);
    for (Vertex v : cycle) {
        if (v >= n || seen[v]) return false;
        seen[v] = 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!g.has_edge(cycle[i], cycle[(i + 1) % n])) return false;
    }
    return true;
}

namespace {

// Cheap certificates of non-Hamiltonicity.
bool obviously_absent(const Graph& g) {
    const std::size_t n = g.num_vertices();
    if (n < 3) return true;
    for (Vertex v = 0; v < n; ++v) {
        if (g.degree(v) < 2) return true;
    }
    return !is_connected(g);
}

CycleResult subset_dp(const Graph& g) {
    const std::size_t n = g.num_vertices();
    // Vertex 0 anchors the cycle; vertex v >= 1 is bit v-1.
    const std::size_t m = n - 1;
    std::vector<std::uint32_t> nb(n, 0);
    for (Vertex v = 1; v < n; ++v) {
        for (Vertex w : g.neighbors(v)) {
            if (w != 0) nb[v] |= 1u << (w - 1);
        }
    }
    std::uint32_t nb0 = 0;
    for (Vertex w : g.neighbors(0)) nb0 |= 1u << (w - 1);

    const std::uint32_t full = (m == 32) ? ~0u : (1u << m) - 1;
    // reach[mask] = endpoints e such that some path 0 -> ... -> e visits exactly {0} U mask.
    std::vector<std::uint32_t> reach(std::size_t{1} << m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        if (nb0 >> i & 1u) reach[std::size_t{1} << i] = 1u << i;
    }
    CycleResult res;
    res.method = CycleMethod::exact;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        const std::uint32_t ends = reach[mask];
        if (!ends) continue;
        ++res.work;
        std::uint32_t rest = full & ~mask;
        while (rest) {
            const int i = std::countr_zero(rest);
            rest &= rest - 1;
            if (nb[i + 1] & ends) reach[mask | (1u << i)] |= 1u << i;
        }
    }
    const std::uint32_t closing = reach[full] & nb0;
    if (!closing) {
        res.status = CycleStatus::proven_absent;
        return res;
    }
    std::vector<Vertex> rev;
    std::uint32_t mask = full;
    int end = std::countr_zero(closing);
    while (true) {
        rev.push_back(static_cast<Vertex>(end + 1));
        const std::uint32_t prev = mask & ~(1u << end);
        if (!prev) break;
        const std::uint32_t options = reach[prev] & nb[end + 1];
        end = std::countr_zero(options);
        mask = prev;
    }
    res.cycle.push_back(0);
    res.cycle.insert(res.cycle.end(), rev.rbegin(), rev.rend());
    res.status = CycleStatus::found;
    return res;
}

class Backtracker {
public:
    Backtracker(const Graph& g, std::size_t budget)
        : g_(g), n_(g.num_vertices()), budget_(budget), on_path_(n_, 0), mark_(n_, 0) {}

    CycleResult run() {
        CycleResult res;
        res.method = CycleMethod::exact;
        path_.push_back(0);
        on_path_[0] = 1;
        const bool found = extend();
        res.work = nodes_;
        if (found) {
            res.status = CycleStatus::found;
            res.cycle = path_;
        } else {
            res.status = exhausted_ ? CycleStatus::budget_exhausted : CycleStatus::proven_absent;
        }
        return res;
    }

private:
    bool extend() {
        if (++nodes_ > budget_) {
            exhausted_ = true;
            return false;
        }
        const Vertex end = path_.back();
        if (path_.size() == n_) return g_.has_edge(end, 0);
        if (!feasible()) return false;

        std::vector<std::pair<std::size_t, Vertex>> options;
        for (Vertex w : g_.neighbors(end)) {
            if (!on_path_[w]) options.emplace_back(free_degree(w), w);
        }
        std::sort(options.begin(), options.end());
        for (const auto& [deg, w] : options) {
            path_.push_back(w);
            on_path_[w] = 1;
            if (extend()) return true;
            on_path_[w] = 0;
            path_.pop_back();
            if (exhausted_) return false;
        }
        return false;
    }

    std::size_t free_degree(Vertex w) const {
        std::size_t k = 0;
        for (Vertex x : g_.neighbors(w)) k += on_path_[x] ? 0 : 1;
        return k;
    }

    // Each unvisited vertex needs two usable neighbors (unvisited, the path
    // end, or vertex 0), and the unvisited vertices plus both path ends must
    // be connected.
    bool feasible() {
        const Vertex end = path_.back();
        for (Vertex w = 0; w < n_; ++w) {
            if (on_path_[w]) continue;
            std::size_t usable = 0;
            for (Vertex x : g_.neighbors(w)) {
                if (!on_path_[x] || x == end || x == 0) ++usable;
            }
            if (usable < 2) return false;
        }
        ++stamp_;
        std::vector<Vertex> stack{end};
        mark_[end] = stamp_;
        std::size_t reached = 0;
        bool reached_zero = end == 0;
        while (!stack.empty()) {
            const Vertex u = stack.back();
            stack.pop_back();
            for (Vertex x : g_.neighbors(u)) {
                if (mark_[x] == stamp_) continue;
                if (x == 0) {
                    mark_[x] = stamp_;
                    reached_zero = true;
                    continue;
                }
                if (on_path_[x]) continue;
                mark_[x] = stamp_;
                ++reached;
                stack.push_back(x);
            }
        }
        return reached == n_ - path_.size() && reached_zero;
    }

    const Graph& g_;
    std::size_t n_;
    std::size_t budget_;
    std::vector<char> on_path_;
    std::vector<std::uint32_t> mark_;
    std::uint32_t stamp_ = 0;
    std::vector<Vertex> path_;
    std::size_t nodes_ = 0;
    bool exhausted_ = false;
};

}  // namespace

CycleResult hamiltonian_exact(const Graph& g, std::size_t budget) {
    if (obviously_absent(g)) {
        CycleResult r;
        r.method = CycleMethod::exact;
        r.status = CycleStatus::proven_absent;
        return r;
    }
    CycleResult r = g.num_vertices() <= kSubsetDpLimit ? subset_dp(g) : Backtracker(g, budget).run();
    if (r.status == CycleStatus::found && !verify_cycle(g, r.cycle)) {
        throw std::logic_error("exact Hamiltonicity search produced an invalid cycle");
    }
    return r;
}

CycleResult hamiltonian_posa(const Graph& g, std::uint64_t seed, const PosaOptions& opts) {
    const std::size_t n = g.num_vertices();
    CycleResult res;
    res.method = CycleMethod::posa;
    res.status = CycleStatus::budget_exhausted;
    if (obviously_absent(g)) return res;
    const std::size_t max_rot = opts.max_rotations ? opts.max_rotations : 100 * n;

    std::vector<Vertex> path;
    std::vector<std::int64_t> pos(n, -1);
    std::vector<Vertex> eligible;
    path.reserve(n);

    auto reverse_range = [&](std::size_t from, std::size_t to) {  // reverse path[from, to)
        std::reverse(path.begin() + static_cast<std::ptrdiff_t>(from), path.begin() + static_cast<std::ptrdiff_t>(to));
        for (std::size_t i = from; i < to; ++i) pos[path[i]] = static_cast<std::int64_t>(i);
    };

    for (std::size_t attempt = 0; attempt < opts.max_restarts; ++attempt) {
        res.restarts = attempt;
        Rng rng(derive_seed(seed, attempt));
        std::fill(pos.begin(), pos.end(), -1);
        path.clear();
        const auto first = static_cast<Vertex>(rng.below(n));
        path.push_back(first);
        pos[first] = 0;
        std::size_t rotations = 0;

        while (rotations <= max_rot) {
            const Vertex end = path.back();
            eligible.clear();
            for (Vertex w : g.neighbors(end)) {
                if (pos[w] < 0) eligible.push_back(w);
            }
            if (!eligible.empty()) {
                const Vertex w = eligible[rng.below(eligible.size())];
                pos[w] = static_cast<std::int64_t>(path.size());
                path.push_back(w);
                continue;
            }
            if (path.size() == n && g.has_edge(end, path.front())) {
                res.status = CycleStatus::found;
                res.cycle = path;
                res.work += rotations;
                if (!verify_cycle(g, res.cycle)) throw std::logic_error("Posa search produced an invalid cycle");
                return res;
            }
            // Rotation: end ~ path[i] gives the path path[0..i] + reverse(path[i+1..]).
            const std::size_t len = path.size();
            for (Vertex w : g.neighbors(end)) {
                const auto i = static_cast<std::size_t>(pos[w]);
                if (i + 2 < len) eligible.push_back(w);
            }
            if (eligible.empty() || rng.below(2) == 0) {
                // Switch to the other end of the path.
                reverse_range(0, len);
                if (eligible.empty()) {
                    bool other_side = false;
                    for (Vertex w : g.neighbors(path.back())) {
                        if (pos[w] < 0 || static_cast<std::size_t>(pos[w]) + 2 < len) other_side = true;
                    }
                    if (!other_side) break;
                }
                ++rotations;
                continue;
            }
            const Vertex pivot = eligible[rng.below(eligible.size())];
            reverse_range(static_cast<std::size_t>(pos[pivot]) + 1, len);
            ++rotations;
        }
        res.work += rotations;
    }
    res.restarts = opts.max_restarts;
    return res;
}

namespace {

std::vector<std::size_t> first_incidence(const WalkTrace& trace, std::size_t rank) {
    // Step at which each vertex gains its rank-th incident trace edge.
    const std::size_t n = trace.num_vertices();
    std::vector<std::vector<std::size_t>> steps(n);
    for (const TraceEdge& e : trace.trace_edges) {
        steps[e.edge.u].push_back(e.first_step);
        steps[e.edge.v].push_back(e.first_step);
    }
    std::vector<std::size_t> out(n, std::numeric_limits<std::size_t>::max());
    for (Vertex v = 0; v < n; ++v) {
        auto& s = steps[v];
        if (s.size() >= rank) {
            std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(rank - 1), s.end());
            out[v] = s[rank - 1];
        }
    }
    return out;
}

std::optional<std::size_t> all_reach(const std::vector<std::size_t>& when) {
    std::size_t worst = 0;
    for (std::size_t t : when) {
        if (t == std::numeric_limits<std::size_t>::max()) return std::nullopt;
        worst = std::max(worst, t);
    }
    return worst;
}

}  // namespace

TauResult tau_times(const Graph& g, Vertex start, std::size_t max_length, std::uint64_t seed, const TauOptions& opts) {
    if (!is_connected(g)) throw PreconditionError("tau_times needs a connected graph");
    const std::size_t n = g.num_vertices();
    const WalkTrace trace = simulate_walk(g, start, max_length, seed);
    TauResult out;
    out.tau_1 = all_reach(first_incidence(trace, 1));
    out.tau_2 = all_reach(first_incidence(trace, 2));
    if (!out.tau_2) return out;

    // Hamiltonicity can only change when an edge arrives, and every vertex
    // needs degree two, so the candidates are arrival steps >= tau_2.
    std::vector<std::size_t> candidates;
    for (const TraceEdge& e : trace.trace_edges) {
        if (e.first_step >= *out.tau_2) candidates.push_back(e.first_step);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::size_t probe_index = 0;
    auto hamiltonian_at = [&](std::size_t t) {
        ++out.probes;
        const Graph prefix = trace_graph_prefix(trace, t);
        if (n <= opts.exact_limit) {
            const auto r = hamiltonian_exact(prefix, opts.exact_budget);
            if (r.status == CycleStatus::budget_exhausted) out.exact = false;
            return r.status == CycleStatus::found;
        }
        const auto r = hamiltonian_posa(prefix, derive_seed(seed, ++probe_index), opts.posa);
        if (r.status != CycleStatus::found) out.exact = false;
        return r.status == CycleStatus::found;
    };

    if (!hamiltonian_at(candidates.back())) return out;
    std::size_t lo = 0, hi = candidates.size() - 1;  // candidates[hi] is Hamiltonian
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (hamiltonian_at(candidates[mid])) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    out.tau_hc = candidates[hi];
    return out;
}

}  // namespace tracelab
