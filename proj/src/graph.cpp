#include "tracelab/graph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>

#include "tracelab/errors.hpp"

namespace tracelab {

Graph::Graph(std::size_t n) : offsets_(n + 1, 0) {
    if (n > 0) regular_degree_ = 0;
}

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (const Edge& e : edges) {
        if (e.u >= n || e.v >= n) {
            throw PreconditionError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                                    ") out of range for n = " + std::to_string(n));
        }
        if (e.u == e.v) throw PreconditionError("self-loop at vertex " + std::to_string(e.u));
        canon.push_back(e.u < e.v ? e : Edge{e.v, e.u});
    }
    std::sort(canon.begin(), canon.end());
    if (auto dup = std::adjacent_find(canon.begin(), canon.end()); dup != canon.end()) {
        throw PreconditionError("duplicate edge (" + std::to_string(dup->u) + ", " +
                                std::to_string(dup->v) + ")");
    }

    Graph g;
    g.offsets_.assign(n + 1, 0);
    for (const Edge& e : canon) {
        ++g.offsets_[e.u + 1];
        ++g.offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.targets_.resize(2 * canon.size());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const Edge& e : canon) {
        g.targets_[cursor[e.u]++] = e.v;
        g.targets_[cursor[e.v]++] = e.u;
    }
    for (std::size_t v = 0; v < n; ++v) {
        std::sort(g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]),
                  g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]));
    }

    if (n > 0) {
        const std::size_t d0 = g.degree(0);
        bool regular = true;
        for (Vertex v = 1; v < n && regular; ++v) regular = g.degree(v) == d0;
        if (regular) g.regular_degree_ = d0;
    }
    return g;
}

std::vector<std::size_t> Graph::degrees() const {
    std::vector<std::size_t> out(num_vertices());
    for (Vertex v = 0; v < out.size(); ++v) out[v] = degree(v);
    return out;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
    if (u >= num_vertices() || v >= num_vertices()) return false;
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (Vertex u = 0; u < num_vertices(); ++u) {
        for (Vertex v : neighbors(u)) {
            if (u < v) out.push_back({u, v});
        }
    }
    return out;
}

VertexSet::VertexSet(std::size_t universe, std::vector<Vertex> members)
    : universe_(universe), members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
        throw PreconditionError("vertex set has repeated members");
    }
    if (!members_.empty() && members_.back() >= universe_) {
        throw PreconditionError("vertex " + std::to_string(members_.back()) +
                                " outside universe of size " + std::to_string(universe_));
    }
}

VertexSet VertexSet::all(std::size_t universe) {
    std::vector<Vertex> m(universe);
    for (std::size_t i = 0; i < universe; ++i) m[i] = static_cast<Vertex>(i);
    return VertexSet(universe, std::move(m));
}

bool VertexSet::contains(Vertex v) const {
    return std::binary_search(members_.begin(), members_.end(), v);
}

namespace {

void require_universe(const Graph& g, const VertexSet& s) {
    if (s.universe() != g.num_vertices() && !(s.empty())) {
        throw PreconditionError("vertex set universe does not match graph order");
    }
}

}  // namespace

std::size_t edges_between(const Graph& g, const VertexSet& s, const VertexSet& t) {
    require_universe(g, s);
    require_universe(g, t);
    std::vector<char> in_t(g.num_vertices(), 0);
    for (Vertex v : t) in_t[v] = 1;
    for (Vertex v : s) {
        if (in_t[v]) throw PreconditionError("sets overlap at vertex " + std::to_string(v));
    }
    std::size_t count = 0;
    for (Vertex u : s) {
        for (Vertex w : g.neighbors(u)) count += in_t[w];
    }
    return count;
}

std::size_t edges_within(const Graph& g, const VertexSet& s) {
    require_universe(g, s);
    std::size_t count = 0;
    for (Vertex u : s) {
        for (Vertex w : g.neighbors(u)) {
            if (u < w && s.contains(w)) ++count;
        }
    }
    return count;
}

VertexSet neighborhood(const Graph& g, const VertexSet& s) {
    require_universe(g, s);
    std::vector<char> mark(g.num_vertices(), 0);
    for (Vertex v : s) mark[v] = 1;
    std::vector<Vertex> out;
    for (Vertex u : s) {
        for (Vertex w : g.neighbors(u)) {
            if (mark[w] == 0) {
                mark[w] = 2;
                out.push_back(w);
            }
        }
    }
    return VertexSet(g.num_vertices(), std::move(out));
}

ConnectivityProfile connectivity_profile(const Graph& g) {
    const std::size_t n = g.num_vertices();
    ConnectivityProfile p{true, true};
    std::vector<int> color(n, -1);
    std::size_t components = 0;
    std::deque<Vertex> queue;
    for (Vertex root = 0; root < n; ++root) {
        if (color[root] != -1) continue;
        ++components;
        color[root] = 0;
        queue.push_back(root);
        while (!queue.empty()) {
            Vertex u = queue.front();
            queue.pop_front();
            for (Vertex w : g.neighbors(u)) {
                if (color[w] == -1) {
                    color[w] = 1 - color[u];
                    queue.push_back(w);
                } else if (color[w] == color[u]) {
                    p.bipartite = false;
                }
            }
        }
    }
    p.connected = components <= 1;
    return p;
}

bool is_connected(const Graph& g) { return connectivity_profile(g).connected; }

void write_edge_list(std::ostream& os, const Graph& g) {
    os << g.num_vertices() << ' ' << g.num_edges() << '\n';
    for (const Edge& e : g.edges()) os << e.u << ' ' << e.v << '\n';
}

std::string to_edge_list(const Graph& g) {
    std::ostringstream os;
    write_edge_list(os, g);
    return os.str();
}

namespace {

bool read_pair(std::istream& is, std::uint64_t& a, std::uint64_t& b) {
    std::string line;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string extra;
        if (!(ls >> a >> b) || (ls >> extra)) {
            throw FormatError("expected two unsigned integers, got \"" + line + "\"");
        }
        return true;
    }
    return false;
}

}  // namespace

Graph parse_edge_list(std::istream& is) {
    std::uint64_t n = 0, m = 0;
    if (!read_pair(is, n, m)) throw FormatError("missing \"n m\" header");
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) {
        std::uint64_t u = 0, v = 0;
        if (!read_pair(is, u, v)) {
            throw FormatError("expected " + std::to_string(m) + " edges, found " + std::to_string(i));
        }
        if (u >= n || v >= n) throw FormatError("edge endpoint out of range on edge line " + std::to_string(i + 1));
        if (u == v) throw FormatError("self-loop on edge line " + std::to_string(i + 1));
        if (u > v) throw FormatError("edge line " + std::to_string(i + 1) + " not in u < v form");
        Edge e{static_cast<Vertex>(u), static_cast<Vertex>(v)};
        if (!edges.empty() && !(edges.back() < e)) {
            throw FormatError(edges.back() == e ? "duplicate edge on line " + std::to_string(i + 1)
                                                : "edges not in ascending order at line " + std::to_string(i + 1));
        }
        edges.push_back(e);
    }
    std::uint64_t a = 0, b = 0;
    if (read_pair(is, a, b)) throw FormatError("trailing data after " + std::to_string(m) + " edges");
    return Graph::from_edges(n, edges);
}

Graph parse_edge_list(const std::string& text) {
    std::istringstream is(text);
    return parse_edge_list(is);
}

}  // namespace tracelab
