#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tracelab/bounds.hpp"
#include "tracelab/errors.hpp"
#include "tracelab/generators.hpp"
#include "tracelab/walk.hpp"

using namespace tracelab;
using doctest::Approx;

namespace {

Graph single_edge() {
    const std::vector<Edge> e{{0, 1}};
    return Graph::from_edges(2, e);
}

std::vector<Graph> corpus() {
    std::vector<Graph> out{single_edge()};
    for (std::size_t n = 3; n <= 8; ++n) out.push_back(complete_graph(n));
    for (std::size_t n = 3; n <= 10; ++n) out.push_back(cycle_graph(n));
    for (std::size_t n = 2; n <= 10; ++n) out.push_back(path_graph(n));
    out.push_back(petersen_graph());
    for (std::uint64_t s = 0; s < 8; ++s) out.push_back(random_regular(4 + 2 * (s % 5), 3, s));
    return out;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("hitting_time_exact examples") {
    CHECK(hitting_time_exact(single_edge(), 0, 1) == Approx(1.0));
    CHECK(hitting_time_exact(complete_graph(3), 0, 1) == Approx(2.0));
    CHECK(hitting_time_exact(cycle_graph(4), 0, 1) == Approx(3.0));
    CHECK(hitting_time_exact(cycle_graph(4), 0, 2) == Approx(4.0));
    CHECK(hitting_time_exact(complete_graph(5), 2, 2) == 0.0);
}

TEST_CASE("hitting_time_exact matches an Eigen LU oracle") {
    for (const Graph& g : corpus()) {
        const auto h = oracle::hitting_times(g);
        const auto mine = hitting_matrix_exact(g);
        const std::size_t n = g.num_vertices();
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = 0; v < n; ++v) CHECK(std::abs(mine[u * n + v] - h(u, v)) <= 1e-8 * std::max(1.0, h(u, v)));
    }
}

TEST_CASE("Tetali identity examples") {
    const Graph e = single_edge();
    const auto te = resistance_matrix(e);
    CHECK(hitting_time_tetali(te, e, 0, 1) == Approx(1.0));
    const Graph k3 = complete_graph(3);
    const auto t3 = resistance_matrix(k3);
    CHECK(hitting_time_tetali(t3, k3, 0, 1) == Approx(2.0));
}

TEST_CASE("property: Tetali equals the linear system on every fixture") {
    for (const Graph& g : corpus()) {
        auto table = resistance_matrix(g);
        attach_tetali_hitting(table, g);
        CHECK(table.hitting_source == TableSource::tetali);
        const std::size_t n = g.num_vertices();
        const auto exact = hitting_matrix_exact(g);
        for (Vertex u = 0; u < n; ++u) {
            CHECK(table.hitting(u, u) == 0.0);
            for (Vertex v = 0; v < n; ++v) {
                CHECK(std::abs(hitting_time_tetali(table, g, u, v) - exact[u * n + v]) <= 1e-8);
                CHECK(table.hitting(u, v) >= 0.0);
            }
        }
    }
}

TEST_CASE("Tetali rejects a table built for another graph") {
    const auto t = resistance_matrix(complete_graph(4));
    CHECK_THROWS_AS(hitting_time_tetali(t, complete_graph(5), 0, 1), PreconditionError);
    ResistanceHittingTable empty(3);
    CHECK_THROWS_AS(empty.hitting(0, 1), PreconditionError);
}

TEST_CASE("matthews bounds") {
    auto [lo, hi] = matthews_bounds(1, 1, 3, HarmonicConvention::n_terms);
    CHECK(lo == Approx(11.0 / 6.0));
    CHECK(hi == Approx(11.0 / 6.0));
    auto [z, u] = matthews_bounds(0, 5, 4);
    CHECK(z == 0.0);
    CHECK(u == Approx(5.0 * 25.0 / 12.0));
    auto [l2, h2] = matthews_bounds(49, 49, 50);
    CHECK(l2 == Approx(219.48106157814175));
    CHECK(h2 == Approx(220.46106157814174));
    CHECK(l2 <= h2);
    CHECK_THROWS_AS(matthews_bounds(2, 1, 3), PreconditionError);
}

TEST_CASE("property: matthews upper bounds the Monte-Carlo cover mean") {
    std::vector<Graph> gs{complete_graph(6), cycle_graph(7), path_graph(6), petersen_graph(), random_regular(12, 3, 5)};
    for (const Graph& g : gs) {
        const auto h = hitting_matrix_exact(g);
        const std::size_t n = g.num_vertices();
        double mu_plus = 0.0, mu_minus = 1e300;
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = 0; v < n; ++v)
                if (u != v) {
                    mu_plus = std::max(mu_plus, h[u * n + v]);
                    mu_minus = std::min(mu_minus, h[u * n + v]);
                }
        CoverOptions opts;
        opts.trials = 10000;
        opts.seed = 17;
        const auto stats = cover_time_empirical(g, opts);
        const auto [lo, hi] = matthews_bounds(mu_minus, mu_plus, n);
        CHECK(stats.censored == 0);
        CHECK(stats.mean <= hi);
        CHECK(lo <= hi);
    }
}

TEST_CASE("spectral cover bound") {
    const auto b = cover_time_spectral_bound(1e3, 1e4, 1e2, 0.1);
    CHECK(b.h_upper == Approx(1020.30201020302));
    CHECK(b.h_lower == Approx(989.6990098969902));
    CHECK(std::abs(b.h_upper / 1e3 - 1.0) <= 0.05);
    CHECK(b.cover_upper == Approx(b.h_upper * oracle::harmonic(1000)));

    // lambda = 0: sandwich ratio tends to 1 as d grows
    double prev = 1e300;
    for (double d : {10.0, 100.0, 1000.0, 10000.0}) {
        const auto s = cover_time_spectral_bound(100, d, 0.0, 0.1);
        const double ratio = s.h_upper / s.h_lower;
        CHECK(ratio < prev);
        prev = ratio;
    }
    CHECK(prev == Approx(1.0).epsilon(1e-3));

    const auto loose = cover_time_spectral_bound(1000, 16, 8, 0.1);
    // at d / lambda = 2 the lower side is vacuous and the upper side exceeds 3n
    CHECK(loose.h_lower < 0.0);
    CHECK(loose.h_upper / 1000.0 > 3.0);
    CHECK_THROWS_AS(cover_time_spectral_bound(10, 4, 4, 0.1), PreconditionError);
}

TEST_CASE("property: cover band holds once d / lambda is large") {
    for (double n : {1e3, 1e4, 1e5})
        for (double d : {1e3, 1e4})
            for (double eps : {0.1, 0.5}) {
                const auto b = cover_time_spectral_bound(n, d, d / 1000.0, eps);
                CHECK(b.h_lower <= n);
                CHECK(b.h_upper >= n * (1 - 1e-3));
                CHECK(b.cover_upper <= (1.0 + eps) * n * std::log(n));
            }
}

TEST_CASE("mixing time bound") {
    const double n = 1000;
    CHECK(mixing_time_bound(n, 100, 1, 1.0 / n) <= 10.0 * std::log(n));
    CHECK(mixing_time_bound(n, 16, 0, 0.5) == Approx(std::log(n) / 2.0));
    CHECK_THROWS_AS(mixing_time_bound(n, 4, 4, 0.1), PreconditionError);
    CHECK_THROWS_AS(mixing_time_bound(n, 4, 1, 1.5), PreconditionError);
}

TEST_CASE("expander mixing check") {
    const auto k5 = expander_mixing_check(complete_graph(5), 1.0, MixingCheckMode::exhaustive());
    CHECK(k5.exact);
    CHECK(k5.pair_violations == 0);
    CHECK(k5.set_violations == 0);
    CHECK(k5.pairs_checked > 0);
    // s = t = 2 on K_5: |4 - 3.2| / (1 * 2) = 0.4
    CHECK(k5.max_pair_ratio >= 0.4 - 1e-12);

    for (const Graph& g : {petersen_graph(), cycle_graph(9), random_regular(16, 3, 2)}) {
        const auto r = expander_mixing_check(g, eigen_extremes(g).lambda, MixingCheckMode::exhaustive());
        CHECK(r.pair_violations == 0);
        CHECK(r.set_violations == 0);
        CHECK(r.max_pair_ratio <= 1.0 + 1e-9);
    }

    const Graph g = random_regular(200, 16, 3);
    const auto r = expander_mixing_check(g, eigen_extremes(g).lambda, MixingCheckMode::sampled(10000, 9));
    CHECK_FALSE(r.exact);
    CHECK(r.pairs_checked == 10000);
    CHECK(r.pair_violations == 0);
    CHECK(r.set_violations == 0);
}

TEST_CASE("binomial tail bound and Paley-Zygmund") {
    CHECK(binomial_tail_bound(10, 0.5, 2) == Approx(0.087890625));
    CHECK(oracle::binomial_cdf(10, 0.5, 2) == Approx(0.0546875));
    CHECK(binomial_tail_bound(10, 0.5, 2) >= oracle::binomial_cdf(10, 0.5, 2));
    CHECK(binomial_tail_bound(100, 0.3, 30) >= oracle::binomial_cdf(100, 0.3, 30));
    CHECK_THROWS_AS(binomial_tail_bound(10, 0.5, 6), PreconditionError);
    // large n stays finite in log space
    CHECK(std::isfinite(binomial_tail_bound(1000000, 0.5, 400000)));

    for (double p : {0.1, 0.25, 0.5, 0.9}) CHECK(std::abs(paley_zygmund_lower(p, p) - p) <= 1e-12);
    CHECK_THROWS_AS(paley_zygmund_lower(0.0, 0.0), PreconditionError);
}

TEST_CASE("the literal tail bound fails below t = 2") {
    // t = 0 gives 0 against P(X = 0) > 0; t = 1 misses the P(X = 0) term
    CHECK(binomial_tail_bound(10, 0.5, 0) < oracle::binomial_cdf(10, 0.5, 0));
    CHECK(binomial_tail_bound(10, 0.5, 1) < oracle::binomial_cdf(10, 0.5, 1));
    std::size_t failures = 0;
    for (std::size_t n = 1; n <= 60; ++n)
        for (int k = 1; k <= 9; ++k) {
            const double p = k / 10.0;
            for (std::size_t t = 3; static_cast<double>(t) <= n * p; ++t) {
                failures += binomial_tail_bound(n, p, t) < oracle::binomial_cdf(n, p, t);
            }
        }
    CHECK(failures == 0);
}

}  // TEST_SUITE
