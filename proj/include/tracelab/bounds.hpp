#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "tracelab/graph.hpp"
#include "tracelab/spectral.hpp"

namespace tracelab {

/// Number of harmonic terms in the lower cover-time bound.
///
/// `n_minus_one` is the default: mu_- * H_{n-1} <= C_G holds for every graph,
/// while the n-term form is violated by K_n, whose cover time is
/// (n-1) H_{n-1}. `n_terms` keeps the n-term variant available.
enum class HarmonicConvention { n_minus_one, n_terms };

std::string_view to_string(HarmonicConvention c);

struct BoundsReport {
    double mu_minus = 0.0;
    double mu_plus = 0.0;
    double cover_lower = 0.0;
    double cover_upper = 0.0;
    double mixing_bound = 0.0;
    double xi = 0.0;
    HarmonicConvention harmonic_index_convention = HarmonicConvention::n_minus_one;
};

double harmonic_number(std::size_t k);

inline constexpr std::size_t kExactHittingLimit = 2000;

/// Expected steps for a walk from u to first reach v, from the first-step
/// equations solved densely. Needs n <= 2000 and a connected graph.
double hitting_time_exact(const Graph& g, Vertex u, Vertex v);

/// H(w, v) for every start w: one dense solve per target.
std::vector<double> hitting_times_to(const Graph& g, Vertex target);

/// All ordered pairs, row u column v = H(u, v).
std::vector<double> hitting_matrix_exact(const Graph& g);

/// H(u, v) = 1/2 sum_w deg(w) (R_uv - R_uw + R_vw) evaluated from `table`.
/// Throws PreconditionError if the table does not match g.
double hitting_time_tetali(const ResistanceHittingTable& table, const Graph& g, Vertex u, Vertex v);

/// Fills the hitting part of `table` from its resistances.
void attach_tetali_hitting(ResistanceHittingTable& table, const Graph& g);

/// (mu_minus * H_k, mu_plus * H_n) with k chosen by `convention`.
std::pair<double, double> matthews_bounds(double mu_minus, double mu_plus, std::size_t n,
                                          HarmonicConvention convention = HarmonicConvention::n_minus_one);

struct SpectralCoverBound {
    double h_lower = 0.0;      // 1/2 n d (4/(d+1) - 2/(d-lambda))
    double h_upper = 0.0;      // 1/2 n d (4/(d-lambda) - 2/(d+1))
    double cover_upper = 0.0;  // h_upper * H_n
    bool hitting_band_holds = false;  // (1-0.1 eps) n <= h_lower and h_upper <= (1+0.1 eps) n
    bool cover_band_holds = false;    // cover_upper <= (1+eps) n log n
};

/// Hitting-time sandwich of an (n, d, lambda)-graph and the resulting
/// cover-time upper bound. Throws PreconditionError when lambda >= d.
SpectralCoverBound cover_time_spectral_bound(double n, double d, double lambda, double eps);

/// ((log n)/2 + log(1/(2 xi))) / (1 - lambda/d).
double mixing_time_bound(double n, double d, double lambda, double xi);

struct MixingCheckMode {
    bool exact = true;
    std::size_t samples = 0;
    std::uint64_t seed = 0;

    static MixingCheckMode exhaustive() { return {}; }
    static MixingCheckMode sampled(std::size_t k, std::uint64_t seed) { return {false, k, seed}; }
};

/// Largest |deviation| / allowance seen for each inequality (<= 1 means the
/// inequality held everywhere it was tested).
struct ExpanderMixingReport {
    bool exact = true;
    std::size_t pairs_checked = 0;
    std::size_t sets_checked = 0;
    std::size_t pair_violations = 0;
    std::size_t set_violations = 0;
    double max_pair_ratio = 0.0;  // |e(S,T) - d s t / n| / (lambda sqrt(s t))
    double max_set_ratio = 0.0;   // |e(S) - d s^2 / (2n)| / (lambda s / 2)
};

inline constexpr std::size_t kExactMixingLimit = 16;

/// Checks both expander-mixing inequalities. Exact mode enumerates every set
/// and every disjoint pair (n <= 16); sampled mode draws k pairs with sizes
/// cycling through 1, 2, 4, ..., n/2.
ExpanderMixingReport expander_mixing_check(const Graph& g, double lambda, const MixingCheckMode& mode);

/// t * C(n, t) * p^t * (1-p)^(n-t), computed in log space.
/// Throws PreconditionError when t > n p.
double binomial_tail_bound(std::size_t n, double p, std::size_t t);

/// E[Z]^2 / E[Z^2]. Throws PreconditionError when second_moment <= 0.
double paley_zygmund_lower(double mean, double second_moment);

}  // namespace tracelab
