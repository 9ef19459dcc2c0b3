#include "tracelab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tracelab/errors.hpp"
#include "tracelab/rng.hpp"

namespace tracelab {

std::string_view to_string(Family f) {
    switch (f) {
        case Family::random_regular: return "random_regular";
        case Family::complete: return "complete";
        case Family::cycle: return "cycle";
        case Family::path: return "path";
        case Family::petersen: return "petersen";
        case Family::counterexample: return "counterexample";
    }
    return "unknown";
}

Family family_from_string(std::string_view tag) {
    for (Family f : {Family::random_regular, Family::complete, Family::cycle, Family::path,
                     Family::petersen, Family::counterexample}) {
        if (to_string(f) == tag) return f;
    }
    throw PreconditionError("unknown graph family \"" + std::string(tag) + "\"");
}

namespace {

void check_counterexample(std::size_t n, std::size_t c) {
    if (c < 1) throw PreconditionError("counterexample needs C >= 1");
    if (n < 2 || 2 * c > n - 2) throw PreconditionError("counterexample needs 2C <= n - 2");
    if (static_cast<double>(c) > 1.1 * static_cast<double>(n) / std::log(static_cast<double>(n))) {
        throw PreconditionError("counterexample needs C <= 1.1 n / log n");
    }
}

void check_regular(std::size_t n, std::size_t d) {
    if (n == 0) throw PreconditionError("random_regular needs n >= 1");
    if (d >= n) throw PreconditionError("random_regular needs d < n");
    if ((n * d) % 2 != 0) throw PreconditionError("random_regular needs n*d even");
}

}  // namespace

void GenSpec::validate() const {
    switch (family) {
        case Family::random_regular: check_regular(n, d); break;
        case Family::counterexample: check_counterexample(n, c); break;
        case Family::complete:
        case Family::path:
            if (n < 1) throw PreconditionError(std::string(to_string(family)) + " needs n >= 1");
            break;
        case Family::cycle:
            if (n < 3) throw PreconditionError("cycle needs n >= 3");
            break;
        case Family::petersen: break;
    }
}

namespace {

class PairingAttempt {
public:
    PairingAttempt(std::size_t n, std::size_t d) : adj_(n) {
        for (auto& a : adj_) a.reserve(d);
        points_.reserve(n * d);
        for (Vertex v = 0; v < n; ++v) {
            for (std::size_t k = 0; k < d; ++k) points_.push_back(v);
        }
    }

    // Returns false when the partial matching cannot be completed.
    bool run(Rng& rng) {
        std::vector<Vertex> leftover;
        while (!points_.empty()) {
            rng.shuffle(points_.begin(), points_.end());
            leftover.clear();
            for (std::size_t i = 0; i + 1 < points_.size(); i += 2) {
                Vertex a = points_[i], b = points_[i + 1];
                if (a != b && !adjacent(a, b)) {
                    adj_[a].push_back(b);
                    adj_[b].push_back(a);
                } else {
                    leftover.push_back(a);
                    leftover.push_back(b);
                }
            }
            if (!leftover.empty() && !completable(leftover)) return false;
            points_.swap(leftover);
        }
        return true;
    }

    Graph freeze() const {
        std::vector<Edge> edges;
        for (Vertex u = 0; u < adj_.size(); ++u) {
            for (Vertex v : adj_[u]) {
                if (u < v) edges.push_back({u, v});
            }
        }
        return Graph::from_edges(adj_.size(), edges);
    }

private:
    bool adjacent(Vertex a, Vertex b) const {
        const auto& la = adj_[a];
        return std::find(la.begin(), la.end(), b) != la.end();
    }

    bool completable(std::vector<Vertex> pts) const {
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                if (!adjacent(pts[i], pts[j])) return true;
            }
        }
        return false;
    }

    std::vector<std::vector<Vertex>> adj_;
    std::vector<Vertex> points_;
};

}  // namespace

Graph random_regular(std::size_t n, std::size_t d, std::uint64_t seed, std::size_t max_restarts) {
    check_regular(n, d);
    Rng rng(seed);
    for (std::size_t attempt = 0; attempt <= max_restarts; ++attempt) {
        PairingAttempt pairing(n, d);
        if (pairing.run(rng)) return pairing.freeze();
    }
    throw GenerationError("pairing model failed after " + std::to_string(max_restarts) +
                          " restarts (n = " + std::to_string(n) + ", d = " + std::to_string(d) + ")");
}

Graph counterexample_expander(std::size_t n, std::size_t c) {
    check_counterexample(n, c);
    std::vector<Edge> edges;
    for (Vertex u = 2; u < n; ++u) {
        for (Vertex v = u + 1; v < n; ++v) edges.push_back({u, v});
    }
    for (std::size_t k = 0; k < c; ++k) {
        edges.push_back({0, static_cast<Vertex>(2 + k)});
        edges.push_back({1, static_cast<Vertex>(2 + c + k)});
    }
    return Graph::from_edges(n, edges);
}

Graph complete_graph(std::size_t n) {
    std::vector<Edge> edges;
    for (Vertex u = 0; u < n; ++u) {
        for (Vertex v = u + 1; v < n; ++v) edges.push_back({u, v});
    }
    return Graph::from_edges(n, edges);
}

Graph cycle_graph(std::size_t n) {
    if (n < 3) throw PreconditionError("cycle needs n >= 3");
    std::vector<Edge> edges;
    for (Vertex u = 0; u < n; ++u) edges.push_back({u, static_cast<Vertex>((u + 1) % n)});
    return Graph::from_edges(n, edges);
}

Graph path_graph(std::size_t n) {
    std::vector<Edge> edges;
    for (Vertex u = 0; u + 1 < n; ++u) edges.push_back({u, u + 1});
    return Graph::from_edges(n, edges);
}

Graph petersen_graph() {
    std::vector<Edge> edges;
    for (Vertex i = 0; i < 5; ++i) {
        edges.push_back({i, static_cast<Vertex>((i + 1) % 5)});          // outer 5-cycle
        edges.push_back({static_cast<Vertex>(5 + i), static_cast<Vertex>(5 + (i + 2) % 5)});  // pentagram
        edges.push_back({i, static_cast<Vertex>(5 + i)});                // spokes
    }
    return Graph::from_edges(10, edges);
}

Graph fixture(std::string_view tag, std::size_t n) {
    if (tag == "complete") return complete_graph(n);
    if (tag == "cycle") return cycle_graph(n);
    if (tag == "path") return path_graph(n);
    if (tag == "petersen") return petersen_graph();
    throw PreconditionError("unknown fixture \"" + std::string(tag) + "\"");
}

Graph generate(const GenSpec& spec) {
    spec.validate();
    switch (spec.family) {
        case Family::random_regular: return random_regular(spec.n, spec.d, spec.seed);
        case Family::complete: return complete_graph(spec.n);
        case Family::cycle: return cycle_graph(spec.n);
        case Family::path: return path_graph(spec.n);
        case Family::petersen: return petersen_graph();
        case Family::counterexample: return counterexample_expander(spec.n, spec.c);
    }
    throw PreconditionError("unhandled family");
}

}  // namespace tracelab
