#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tracelab {

using Vertex = std::uint32_t;

/// Undirected edge with u < v.
struct Edge {
    Vertex u = 0;
    Vertex v = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable simple undirected graph on vertices 0..n-1.
///
/// Neighbor lists are kept sorted, which gives a canonical form (and so a
/// canonical edge-list serialization) and O(log deg) adjacency queries.
class Graph {
public:
    Graph() = default;

    /// Edgeless graph on n vertices.
    explicit Graph(std::size_t n);

    /// Builds from an edge list in any order and orientation.
    /// Throws PreconditionError on loops, duplicates, or out-of-range endpoints.
    static Graph from_edges(std::size_t n, std::span<const Edge> edges);

    std::size_t num_vertices() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t num_edges() const noexcept { return targets_.size() / 2; }

    std::span<const Vertex> neighbors(Vertex v) const {
        return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
    }
    std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
    std::vector<std::size_t> degrees() const;

    /// d when every vertex has degree d.
    std::optional<std::size_t> regular_degree() const noexcept { return regular_degree_; }

    bool has_edge(Vertex u, Vertex v) const;

    /// All edges, u < v, in ascending lexicographic order.
    std::vector<Edge> edges() const;

private:
    std::vector<std::size_t> offsets_;
    std::vector<Vertex> targets_;
    std::optional<std::size_t> regular_degree_;
};

/// Sorted set of distinct vertices drawn from 0..universe-1.
class VertexSet {
public:
    VertexSet() = default;

    /// Sorts and validates; throws PreconditionError on duplicates or members >= universe.
    VertexSet(std::size_t universe, std::vector<Vertex> members);

    static VertexSet all(std::size_t universe);

    std::size_t universe() const noexcept { return universe_; }
    std::size_t size() const noexcept { return members_.size(); }
    std::size_t complement_size() const noexcept { return universe_ - members_.size(); }
    bool empty() const noexcept { return members_.empty(); }
    bool contains(Vertex v) const;

    std::span<const Vertex> members() const noexcept { return members_; }
    auto begin() const noexcept { return members_.begin(); }
    auto end() const noexcept { return members_.end(); }

    friend bool operator==(const VertexSet&, const VertexSet&) = default;

private:
    std::size_t universe_ = 0;
    std::vector<Vertex> members_;
};

/// Number of edges with one endpoint in s and the other in t.
/// Throws PreconditionError if s and t overlap.
std::size_t edges_between(const Graph& g, const VertexSet& s, const VertexSet& t);

/// Number of edges with both endpoints in s.
std::size_t edges_within(const Graph& g, const VertexSet& s);

/// External neighborhood: vertices outside s with a neighbor in s.
VertexSet neighborhood(const Graph& g, const VertexSet& s);

struct ConnectivityProfile {
    bool connected = false;
    bool bipartite = false;
};

ConnectivityProfile connectivity_profile(const Graph& g);

bool is_connected(const Graph& g);

/// Edge-list text: "n m" then m lines "u v" (u < v, ascending).
std::string to_edge_list(const Graph& g);
void write_edge_list(std::ostream& os, const Graph& g);

/// Strict parser for the format above; rejects unsorted lines, loops, and duplicates.
Graph parse_edge_list(std::istream& is);
Graph parse_edge_list(const std::string& text);

}  // namespace tracelab
