#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "tracelab/graph.hpp"

namespace tracelab {

enum class Family { random_regular, complete, cycle, path, petersen, counterexample };

std::string_view to_string(Family f);
/// Throws PreconditionError on unknown tags.
Family family_from_string(std::string_view tag);

/// Everything needed to rebuild a graph deterministically.
struct GenSpec {
    Family family = Family::complete;
    std::size_t n = 0;
    std::size_t d = 0;   // random_regular only
    std::size_t c = 0;   // counterexample only
    std::uint64_t seed = 0;

    /// Throws PreconditionError when the parameters are invalid for the family.
    void validate() const;
};

inline constexpr std::size_t kDefaultMaxRestarts = 1000;

/// Random simple d-regular graph from the pairing model.
///
/// Half-edges are matched in rounds: shuffle the unmatched points, pair them
/// up, keep every pair that forms a new non-loop edge, and carry the rest into
/// the next round. A round in which no carried point can still be matched
/// restarts from scratch. Throws GenerationError after max_restarts restarts.
Graph random_regular(std::size_t n, std::size_t d, std::uint64_t seed,
                     std::size_t max_restarts = kDefaultMaxRestarts);

/// K_{n-2} on {2..n-1} plus vertices 0 and 1, attached to the lowest C and
/// next C clique vertices respectively.
Graph counterexample_expander(std::size_t n, std::size_t c);

Graph complete_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph path_graph(std::size_t n);
Graph petersen_graph();

/// Named fixture: "complete", "cycle", "path", or "petersen" (n ignored).
Graph fixture(std::string_view tag, std::size_t n);

Graph generate(const GenSpec& spec);

}  // namespace tracelab
