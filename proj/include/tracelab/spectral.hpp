#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "tracelab/graph.hpp"

namespace tracelab {

enum class EigenMethod { automatic, dense, iterative };

std::string_view to_string(EigenMethod m);

struct EigenOptions {
    double tol = 1e-8;
    std::size_t max_iter = 2000;
    std::size_t dense_threshold = 512;
    EigenMethod method = EigenMethod::automatic;
    std::uint64_t seed = 0x5eed;  // start vector of the iterative path
};

/// Adjacency spectrum extremes of a d-regular graph.
struct SpectralSummary {
    std::size_t n = 0;
    double d = 0.0;
    double lambda2 = 0.0;       // second-largest eigenvalue
    double lambda_min = 0.0;    // smallest eigenvalue
    double lambda = 0.0;        // max(|lambda2|, |lambda_min|)
    double ratio = 0.0;         // d / lambda (infinity when lambda == 0)
    EigenMethod method = EigenMethod::dense;
    double residual = 0.0;
    std::size_t iterations = 0;

    /// True when the graph is an (n, d, bound)-graph.
    bool certifies(double bound) const { return lambda <= bound; }
};

/// Throws PreconditionError for non-regular graphs and ConvergenceError when
/// the selected method misses `tol`.
///
/// The dense path runs cyclic Jacobi on the full adjacency matrix. The
/// iterative path runs Lanczos with full reorthogonalization inside the
/// complement of the all-ones vector (the top eigenvector of a regular graph),
/// so the extreme Ritz values are lambda2 and lambda_min directly; convergence
/// is certified by the Ritz residual |beta_k * s_k|.
SpectralSummary eigen_extremes(const Graph& g, const EigenOptions& opts = {});

/// Which routine produced the entries of a ResistanceHittingTable.
enum class TableSource { none, pseudoinverse_solve, linear_system, tetali };

std::string_view to_string(TableSource s);

/// All-pairs effective resistances and (optionally) hitting times.
class ResistanceHittingTable {
public:
    ResistanceHittingTable() = default;
    explicit ResistanceHittingTable(std::size_t n) : n_(n), r_(n * n, 0.0) {}

    std::size_t n() const noexcept { return n_; }

    double resistance(Vertex u, Vertex v) const { return r_.at(u * n_ + v); }
    void set_resistance(Vertex u, Vertex v, double value) {
        r_.at(u * n_ + v) = value;
        r_.at(v * n_ + u) = value;
    }

    bool has_hitting() const noexcept { return !h_.empty(); }
    /// Throws PreconditionError when no hitting matrix is attached.
    double hitting(Vertex u, Vertex v) const;
    void set_hitting(std::vector<double> h, TableSource source);

    TableSource resistance_source = TableSource::none;
    TableSource hitting_source = TableSource::none;

    std::span<const double> resistance_data() const noexcept { return r_; }
    std::span<const double> hitting_data() const noexcept { return h_; }

private:
    std::size_t n_ = 0;
    std::vector<double> r_;
    std::vector<double> h_;
};

inline constexpr double kResistanceTol = 1e-10;

/// Solves L x = e_u - e_v on the mean-zero subspace by conjugate gradients and
/// returns (e_u - e_v) . x. Throws DisconnectedError on disconnected graphs.
double effective_resistance(const Graph& g, Vertex u, Vertex v, double tol = kResistanceTol);

/// All pairs from n-1 solves L y_w = e_w - e_0. Columns may be solved on
/// `workers` threads; the result does not depend on the worker count.
ResistanceHittingTable resistance_matrix(const Graph& g, double tol = kResistanceTol,
                                         std::size_t workers = 1);

inline constexpr std::size_t kExactDistributionLimit = 5000;

/// TV distance to uniform of the walk started at `start`, for t = 0..t_max,
/// from the exact step distributions. Needs a regular graph with
/// n <= limit, otherwise PreconditionError.
std::vector<double> tv_distance_profile(const Graph& g, Vertex start, std::size_t t_max,
                                        std::size_t limit = kExactDistributionLimit);

/// max over starts of tv_distance_profile.
std::vector<double> worst_start_tv_profile(const Graph& g, std::size_t t_max,
                                           std::size_t limit = kExactDistributionLimit);

/// Smallest t with worst-start TV distance < xi. TV distance to stationarity
/// never increases along a walk, so the first such t is the mixing time.
/// Throws PreconditionError for bipartite or disconnected input, and
/// ConvergenceError if max_steps pass without mixing.
std::size_t empirical_mixing_time(const Graph& g, double xi, std::size_t max_steps = 1'000'000,
                                  std::size_t limit = kExactDistributionLimit);

}  // namespace tracelab
