#pragma once

// Independent reference computations for tests. Everything here goes through
// Eigen or plain enumeration, never through the library's own solvers.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "tracelab/graph.hpp"

namespace oracle {

using tracelab::Graph;
using tracelab::Vertex;

inline Eigen::MatrixXd adjacency(const Graph& g) {
    const auto n = static_cast<Eigen::Index>(g.num_vertices());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : g.edges()) {
        a(e.u, e.v) = 1.0;
        a(e.v, e.u) = 1.0;
    }
    return a;
}

inline Eigen::MatrixXd laplacian(const Graph& g) {
    Eigen::MatrixXd a = adjacency(g);
    Eigen::MatrixXd l = -a;
    for (Eigen::Index i = 0; i < a.rows(); ++i) l(i, i) = a.row(i).sum();
    return l;
}

/// Adjacency eigenvalues, descending.
inline std::vector<double> spectrum(const Graph& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(adjacency(g));
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.rbegin(), ev.rend());
    return ev;
}

/// L^+ from the eigendecomposition (connected graphs: drop the zero mode).
inline Eigen::MatrixXd pseudoinverse(const Graph& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian(g));
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(vals.size(), vals.size());
    for (Eigen::Index k = 0; k < vals.size(); ++k) {
        if (vals(k) > 1e-9) p += vecs.col(k) * vecs.col(k).transpose() / vals(k);
    }
    return p;
}

inline Eigen::MatrixXd resistances(const Graph& g) {
    const Eigen::MatrixXd p = pseudoinverse(g);
    const Eigen::Index n = p.rows();
    Eigen::MatrixXd r(n, n);
    for (Eigen::Index u = 0; u < n; ++u)
        for (Eigen::Index v = 0; v < n; ++v) r(u, v) = p(u, u) + p(v, v) - 2.0 * p(u, v);
    return r;
}

/// H(u, v) for all pairs from the first-step equations, solved by Eigen LU.
inline Eigen::MatrixXd hitting_times(const Graph& g) {
    const auto n = static_cast<Eigen::Index>(g.num_vertices());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index v = 0; v < n; ++v) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd rhs = Eigen::VectorXd::Ones(n);
        rhs(v) = 0.0;
        for (Eigen::Index w = 0; w < n; ++w) {
            if (w == v) continue;
            const auto nb = g.neighbors(static_cast<Vertex>(w));
            for (Vertex x : nb) m(w, x) -= 1.0 / static_cast<double>(nb.size());
        }
        const Eigen::VectorXd col = m.partialPivLu().solve(rhs);
        h.col(v) = col;
    }
    return h;
}

/// Exact P(walk from u visits v within T steps): v made absorbing.
inline double hit_probability(const Graph& g, Vertex u, Vertex v, std::size_t horizon) {
    const std::size_t n = g.num_vertices();
    std::vector<double> p(n, 0.0), q(n);
    p[u] = 1.0;
    double hit = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        std::fill(q.begin(), q.end(), 0.0);
        for (Vertex w = 0; w < n; ++w) {
            if (p[w] == 0.0) continue;
            const auto nb = g.neighbors(w);
            for (Vertex x : nb) q[x] += p[w] / static_cast<double>(nb.size());
        }
        hit += q[v];
        q[v] = 0.0;
        std::swap(p, q);
    }
    return hit;
}

/// Worst-start TV distance after t steps via dense matrix powers.
inline std::size_t mixing_time(const Graph& g, double xi) {
    const Eigen::MatrixXd a = adjacency(g);
    Eigen::MatrixXd p = a;
    for (Eigen::Index i = 0; i < a.rows(); ++i) p.row(i) /= a.row(i).sum();
    const double n = static_cast<double>(a.rows());
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(a.rows(), a.rows());
    for (std::size_t t = 0;; ++t) {
        const double tv = 0.5 * (m.array() - 1.0 / n).abs().rowwise().sum().maxCoeff();
        if (tv < xi) return t;
        m = m * p;
    }
}

/// P(Bin(n, p) <= t), summed in long double.
inline double binomial_cdf(std::size_t n, double p, std::size_t t) {
    long double pmf = std::pow(1.0L - p, static_cast<long double>(n));
    long double sum = 0.0L;
    for (std::size_t k = 0; k <= t && k <= n; ++k) {
        if (k > 0) pmf *= static_cast<long double>(n - k + 1) / static_cast<long double>(k) * p / (1.0L - p);
        sum += pmf;
    }
    return static_cast<double>(sum);
}

inline double harmonic(std::size_t k) {
    double h = 0.0;
    for (std::size_t i = 1; i <= k; ++i) h += 1.0 / static_cast<double>(i);
    return h;
}

/// Neighbor masks for graphs with n <= 30.
inline std::vector<std::uint32_t> masks(const Graph& g) {
    std::vector<std::uint32_t> m(g.num_vertices(), 0);
    for (const auto& e : g.edges()) {
        m[e.u] |= 1u << e.v;
        m[e.v] |= 1u << e.u;
    }
    return m;
}

/// Definition check by enumerating every subset mask.
inline bool expands(const Graph& g, double c) {
    const auto m = masks(g);
    const std::size_t n = g.num_vertices();
    const auto cap = static_cast<int>(std::floor(static_cast<double>(n) / (2.0 * c)));
    for (std::uint32_t x = 1; x < (1u << n); ++x) {
        const int s = std::popcount(x);
        if (s > cap) continue;
        std::uint32_t nb = 0;
        for (std::size_t v = 0; v < n; ++v)
            if (x >> v & 1u) nb |= m[v];
        nb &= ~x;
        if (std::popcount(nb) < c * s) return false;
    }
    return true;
}

inline bool joined(const Graph& g, double c) {
    const auto m = masks(g);
    const std::size_t n = g.num_vertices();
    const auto k = static_cast<int>(std::ceil(static_cast<double>(n) / (2.0 * c)));
    for (std::uint32_t a = 1; a < (1u << n); ++a) {
        if (std::popcount(a) != k) continue;
        std::uint32_t nb = 0;
        for (std::size_t v = 0; v < n; ++v)
            if (a >> v & 1u) nb |= m[v];
        const std::uint32_t free = ((1u << n) - 1) & ~a & ~nb;
        if (std::popcount(free) >= k) return false;
    }
    return true;
}

/// Plain DFS over simple paths from vertex 0; fine for n <= 12.
inline bool hamiltonian(const Graph& g) {
    const std::size_t n = g.num_vertices();
    if (n < 3) return false;
    std::vector<char> used(n, 0);
    std::function<bool(Vertex, std::size_t)> dfs = [&](Vertex v, std::size_t depth) {
        if (depth == n) return g.has_edge(v, 0);
        for (Vertex w : g.neighbors(v)) {
            if (used[w]) continue;
            used[w] = 1;
            if (dfs(w, depth + 1)) return true;
            used[w] = 0;
        }
        return false;
    };
    used[0] = 1;
    return dfs(0, 1);
}

/// G(n, p) from a test-local generator.
inline Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    std::vector<tracelab::Edge> edges;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if (coin(rng)) edges.push_back({u, v});
    return Graph::from_edges(n, edges);
}

}  // namespace oracle
