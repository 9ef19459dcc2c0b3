#include "tracelab/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "tracelab/errors.hpp"
#include "tracelab/linalg.hpp"
#include "tracelab/rng.hpp"

namespace tracelab {

std::string_view to_string(HarmonicConvention c) {
    return c == HarmonicConvention::n_terms ? "n" : "n-1";
}

double harmonic_number(std::size_t k) {
    double s = 0.0;
    for (std::size_t i = k; i >= 1; --i) s += 1.0 / static_cast<double>(i);
    return s;
}

std::vector<double> hitting_times_to(const Graph& g, Vertex target) {
    const std::size_t n = g.num_vertices();
    if (target >= n) throw PreconditionError("vertex out of range");
    if (n > kExactHittingLimit) throw PreconditionError("exact hitting times limited to n <= 2000");
    if (!is_connected(g)) throw DisconnectedError("hitting times are infinite on a disconnected graph");
    std::vector<double> h(n, 0.0);
    if (n == 1) return h;

    // Unknown index of vertex w (w != target).
    auto index = [target](Vertex w) { return w < target ? w : w - 1; };
    linalg::DenseMatrix a(n - 1);
    std::vector<double> rhs(n - 1, 1.0);
    for (Vertex w = 0; w < n; ++w) {
        if (w == target) continue;
        const std::size_t row = index(w);
        const double inv_deg = 1.0 / static_cast<double>(g.degree(w));
        a(row, row) = 1.0;
        for (Vertex x : g.neighbors(w)) {
            if (x != target) a(row, index(x)) -= inv_deg;
        }
    }
    const auto x = linalg::solve(std::move(a), std::move(rhs));
    for (Vertex w = 0; w < n; ++w) {
        if (w != target) h[w] = x[index(w)];
    }
    return h;
}

double hitting_time_exact(const Graph& g, Vertex u, Vertex v) {
    if (u >= g.num_vertices()) throw PreconditionError("vertex out of range");
    return hitting_times_to(g, v)[u];
}

std::vector<double> hitting_matrix_exact(const Graph& g) {
    const std::size_t n = g.num_vertices();
    std::vector<double> out(n * n, 0.0);
    for (Vertex v = 0; v < n; ++v) {
        const auto col = hitting_times_to(g, v);
        for (Vertex u = 0; u < n; ++u) out[u * n + v] = col[u];
    }
    return out;
}

double hitting_time_tetali(const ResistanceHittingTable& table, const Graph& g, Vertex u, Vertex v) {
    const std::size_t n = g.num_vertices();
    if (table.n() != n || table.resistance_source == TableSource::none) {
        throw PreconditionError("resistance table does not cover this graph");
    }
    if (u >= n || v >= n) throw PreconditionError("vertex out of range");
    const double ruv = table.resistance(u, v);
    double s = 0.0;
    for (Vertex w = 0; w < n; ++w) {
        s += static_cast<double>(g.degree(w)) * (ruv - table.resistance(u, w) + table.resistance(v, w));
    }
    return 0.5 * s;
}

void attach_tetali_hitting(ResistanceHittingTable& table, const Graph& g) {
    const std::size_t n = g.num_vertices();
    std::vector<double> h(n * n, 0.0);
    for (Vertex u = 0; u < n; ++u) {
        for (Vertex v = 0; v < n; ++v) {
            if (u != v) h[u * n + v] = hitting_time_tetali(table, g, u, v);
        }
    }
    table.set_hitting(std::move(h), TableSource::tetali);
}

std::pair<double, double> matthews_bounds(double mu_minus, double mu_plus, std::size_t n,
                                          HarmonicConvention convention) {
    if (!(mu_minus >= 0.0 && mu_minus <= mu_plus)) {
        throw PreconditionError("matthews_bounds needs 0 <= mu_minus <= mu_plus");
    }
    const std::size_t k = convention == HarmonicConvention::n_terms ? n : (n > 0 ? n - 1 : 0);
    return {mu_minus * harmonic_number(k), mu_plus * harmonic_number(n)};
}

SpectralCoverBound cover_time_spectral_bound(double n, double d, double lambda, double eps) {
    if (!(lambda < d)) throw PreconditionError("cover_time_spectral_bound needs lambda < d");
    SpectralCoverBound b;
    b.h_lower = 0.5 * n * d * (4.0 / (d + 1.0) - 2.0 / (d - lambda));
    b.h_upper = 0.5 * n * d * (4.0 / (d - lambda) - 2.0 / (d + 1.0));
    b.cover_upper = b.h_upper * harmonic_number(static_cast<std::size_t>(std::llround(n)));
    b.hitting_band_holds = (1.0 - 0.1 * eps) * n <= b.h_lower && b.h_upper <= (1.0 + 0.1 * eps) * n;
    b.cover_band_holds = b.cover_upper <= (1.0 + eps) * n * std::log(n);
    return b;
}

double mixing_time_bound(double n, double d, double lambda, double xi) {
    if (!(lambda < d)) throw PreconditionError("mixing_time_bound needs lambda < d");
    if (!(xi > 0.0 && xi < 1.0)) throw PreconditionError("mixing_time_bound needs 0 < xi < 1");
    return (std::log(n) / 2.0 + std::log(1.0 / (2.0 * xi))) / (1.0 - lambda / d);
}

namespace {

struct RatioTracker {
    double max_ratio = 0.0;
    std::size_t violations = 0;

    void add(double deviation, double allowance) {
        const double slack = 1e-9 * (1.0 + allowance);
        if (deviation > allowance + slack) ++violations;
        if (allowance > 0.0) {
            max_ratio = std::max(max_ratio, deviation / allowance);
        } else if (deviation > slack) {
            max_ratio = std::numeric_limits<double>::infinity();
        }
    }
};

}  // namespace

ExpanderMixingReport expander_mixing_check(const Graph& g, double lambda, const MixingCheckMode& mode) {
    const auto deg = g.regular_degree();
    if (!deg) throw PreconditionError("expander_mixing_check needs a regular graph");
    const std::size_t n = g.num_vertices();
    const double d = static_cast<double>(*deg);
    const double nn = static_cast<double>(n);
    RatioTracker pair_ratio, set_ratio;
    ExpanderMixingReport report;
    report.exact = mode.exact;

    auto check_set = [&](double s, double inside) {
        set_ratio.add(std::abs(inside - d * s * s / (2.0 * nn)), lambda * s / 2.0);
        ++report.sets_checked;
    };
    auto check_pair = [&](double s, double t, double between) {
        pair_ratio.add(std::abs(between - d * s * t / nn), lambda * std::sqrt(s * t));
        ++report.pairs_checked;
    };

    if (mode.exact) {
        if (n > kExactMixingLimit) {
            throw PreconditionError("exact expander-mixing check limited to n <= 16; use sampled mode");
        }
        std::vector<std::uint32_t> adj(n, 0);
        for (Vertex v = 0; v < n; ++v) {
            for (Vertex w : g.neighbors(v)) adj[v] |= 1u << w;
        }
        const std::uint32_t full = n == 32 ? ~0u : (1u << n) - 1;
        std::vector<std::uint32_t> deg_into_s(n);
        std::vector<std::uint32_t> between(std::size_t{1} << n, 0);
        for (std::uint32_t s = 1; s <= full; ++s) {
            std::uint32_t inside2 = 0;
            for (Vertex v = 0; v < n; ++v) {
                deg_into_s[v] = static_cast<std::uint32_t>(std::popcount(adj[v] & s));
                if (s >> v & 1u) inside2 += deg_into_s[v];
            }
            const auto size_s = static_cast<double>(std::popcount(s));
            check_set(size_s, inside2 / 2.0);
            const std::uint32_t rest = full & ~s;
            // Submasks of `rest` in increasing order; t & (t-1) was seen before t.
            for (std::uint32_t t = (0 - rest) & rest; t != 0; t = (t - rest) & rest) {
                const std::uint32_t low = t & (0 - t);
                between[t] = between[t & (t - 1)] + deg_into_s[std::countr_zero(low)];
                check_pair(size_s, static_cast<double>(std::popcount(t)), between[t]);
            }
        }
    } else {
        Rng rng(mode.seed);
        std::vector<std::size_t> strata;
        for (std::size_t s = 1; s <= std::max<std::size_t>(1, n / 2); s *= 2) strata.push_back(s);
        std::vector<Vertex> perm(n);
        for (Vertex v = 0; v < n; ++v) perm[v] = v;
        std::vector<char> in_s(n, 0), in_t(n, 0);
        for (std::size_t i = 0; i < mode.samples && n >= 2; ++i) {
            const std::size_t s = strata[i % strata.size()];
            const std::size_t t = std::min(strata[(i / strata.size()) % strata.size()], n - s);
            // Partial Fisher-Yates: first s + t entries form a uniform ordered sample.
            for (std::size_t k = 0; k < s + t; ++k) {
                std::swap(perm[k], perm[k + rng.below(n - k)]);
            }
            for (std::size_t k = 0; k < s; ++k) in_s[perm[k]] = 1;
            for (std::size_t k = s; k < s + t; ++k) in_t[perm[k]] = 1;
            std::size_t inside2 = 0, cross = 0;
            for (std::size_t k = 0; k < s; ++k) {
                for (Vertex w : g.neighbors(perm[k])) {
                    inside2 += in_s[w];
                    cross += in_t[w];
                }
            }
            check_set(static_cast<double>(s), inside2 / 2.0);
            check_pair(static_cast<double>(s), static_cast<double>(t), static_cast<double>(cross));
            for (std::size_t k = 0; k < s + t; ++k) in_s[perm[k]] = in_t[perm[k]] = 0;
        }
    }
    report.max_pair_ratio = pair_ratio.max_ratio;
    report.max_set_ratio = set_ratio.max_ratio;
    report.pair_violations = pair_ratio.violations;
    report.set_violations = set_ratio.violations;
    return report;
}

double binomial_tail_bound(std::size_t n, double p, std::size_t t) {
    if (!(p > 0.0 && p < 1.0)) throw PreconditionError("binomial_tail_bound needs 0 < p < 1");
    const double nn = static_cast<double>(n), tt = static_cast<double>(t);
    if (tt > nn * p * (1.0 + 1e-12)) throw PreconditionError("binomial_tail_bound needs t <= n p");
    if (t == 0) return 0.0;
    const double log_choose = std::lgamma(nn + 1.0) - std::lgamma(tt + 1.0) - std::lgamma(nn - tt + 1.0);
    return std::exp(std::log(tt) + log_choose + tt * std::log(p) + (nn - tt) * std::log1p(-p));
}

double paley_zygmund_lower(double mean, double second_moment) {
    if (!(second_moment > 0.0)) throw PreconditionError("paley_zygmund_lower needs E[Z^2] > 0");
    return mean * mean / second_moment;
}

}  // namespace tracelab
