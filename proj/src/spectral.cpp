#include "tracelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tracelab/errors.hpp"
#include "tracelab/linalg.hpp"
#include "tracelab/parallel.hpp"
#include "tracelab/rng.hpp"

namespace tracelab {

std::string_view to_string(EigenMethod m) {
    switch (m) {
        case EigenMethod::automatic: return "automatic";
        case EigenMethod::dense: return "dense";
        case EigenMethod::iterative: return "iterative";
    }
    return "unknown";
}

std::string_view to_string(TableSource s) {
    switch (s) {
        case TableSource::none: return "none";
        case TableSource::pseudoinverse_solve: return "pseudoinverse-solve";
        case TableSource::linear_system: return "linear-system";
        case TableSource::tetali: return "tetali";
    }
    return "unknown";
}

double ResistanceHittingTable::hitting(Vertex u, Vertex v) const {
    if (h_.empty()) throw PreconditionError("table has no hitting times");
    return h_.at(u * n_ + v);
}

void ResistanceHittingTable::set_hitting(std::vector<double> h, TableSource source) {
    if (h.size() != n_ * n_) throw PreconditionError("hitting matrix has wrong size");
    h_ = std::move(h);
    hitting_source = source;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void remove_mean(std::vector<double>& x) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    for (double& v : x) v -= mean;
}

void adjacency_apply(const Graph& g, std::span<const double> x, std::span<double> y) {
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        double s = 0.0;
        for (Vertex w : g.neighbors(v)) s += x[w];
        y[v] = s;
    }
}

void laplacian_apply(const Graph& g, std::span<const double> x, std::span<double> y) {
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        double s = static_cast<double>(g.degree(v)) * x[v];
        for (Vertex w : g.neighbors(v)) s -= x[w];
        y[v] = s;
    }
}

SpectralSummary finish(SpectralSummary s) {
    s.lambda = std::max(std::abs(s.lambda2), std::abs(s.lambda_min));
    s.ratio = s.lambda == 0.0 ? std::numeric_limits<double>::infinity() : s.d / s.lambda;
    return s;
}

SpectralSummary dense_extremes(const Graph& g, double d, const EigenOptions& opts) {
    const std::size_t n = g.num_vertices();
    linalg::DenseMatrix a(n);
    for (Vertex u = 0; u < n; ++u) {
        for (Vertex v : g.neighbors(u)) a(u, v) = 1.0;
    }
    auto res = linalg::jacobi_eigenvalues(std::move(a), opts.tol);
    if (!res.converged) throw ConvergenceError("Jacobi eigensolver did not converge", res.off_norm);
    SpectralSummary s;
    s.n = n;
    s.d = d;
    s.lambda2 = res.eigenvalues[1];
    s.lambda_min = res.eigenvalues[n - 1];
    s.method = EigenMethod::dense;
    s.residual = res.off_norm;
    s.iterations = res.sweeps;
    return finish(s);
}

SpectralSummary lanczos_extremes(const Graph& g, double d, const EigenOptions& opts) {
    const std::size_t n = g.num_vertices();
    const std::size_t max_dim = std::min(n - 1, std::max<std::size_t>(opts.max_iter, 1));

    Rng rng(opts.seed);
    std::vector<std::vector<double>> basis;
    std::vector<double> q(n);
    for (double& x : q) x = 2.0 * rng.uniform01() - 1.0;
    remove_mean(q);
    const double q_norm = std::sqrt(dot(q, q));
    for (double& x : q) x /= q_norm;
    basis.push_back(q);

    std::vector<double> alpha, beta;
    std::vector<double> w(n);
    double best_residual = std::numeric_limits<double>::infinity();
    double top = 0.0, bottom = 0.0;

    for (std::size_t j = 0; j < max_dim; ++j) {
        adjacency_apply(g, basis[j], w);
        const double a = dot(basis[j], w);
        alpha.push_back(a);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                const double c = dot(b, w);
                for (std::size_t i = 0; i < n; ++i) w[i] -= c * b[i];
            }
            remove_mean(w);
        }
        const double b = std::sqrt(dot(w, w));
        const bool exhausted = b <= 1e-12 * std::max(1.0, d) || j + 1 == max_dim;
        const bool check = exhausted || (j + 1) % 10 == 0;

        if (check) {
            std::vector<double> theta = alpha;
            std::vector<double> off(beta.begin(), beta.end());
            std::vector<double> last;
            linalg::tridiagonal_ql(theta, off, last);
            const auto hi = static_cast<std::size_t>(std::max_element(theta.begin(), theta.end()) - theta.begin());
            const auto lo = static_cast<std::size_t>(std::min_element(theta.begin(), theta.end()) - theta.begin());
            const double invariant = b <= 1e-12 * std::max(1.0, d) ? 0.0 : b;
            const double residual = std::max(std::abs(invariant * last[hi]), std::abs(invariant * last[lo]));
            top = theta[hi];
            bottom = theta[lo];
            best_residual = std::min(best_residual, residual);
            // With j + 1 == n - 1 the Krylov space is the whole complement, so
            // the Ritz values are exact.
            const bool complete = j + 1 == n - 1;
            if (residual <= opts.tol || complete || b <= 1e-12 * std::max(1.0, d)) {
                SpectralSummary s;
                s.n = n;
                s.d = d;
                s.lambda2 = top;
                s.lambda_min = bottom;
                s.method = EigenMethod::iterative;
                s.residual = complete ? 0.0 : residual;
                s.iterations = j + 1;
                return finish(s);
            }
            if (exhausted) break;
        }
        beta.push_back(b);
        for (double& x : w) x /= b;
        basis.push_back(w);
    }
    throw ConvergenceError("Lanczos did not reach residual " + std::to_string(opts.tol) + " within " +
                               std::to_string(max_dim) + " iterations",
                           best_residual);
}

}  // namespace

SpectralSummary eigen_extremes(const Graph& g, const EigenOptions& opts) {
    const auto d = g.regular_degree();
    if (!d) throw PreconditionError("eigen_extremes needs a regular graph");
    if (g.num_vertices() < 2) throw PreconditionError("eigen_extremes needs n >= 2");
    EigenMethod method = opts.method;
    if (method == EigenMethod::automatic) {
        method = g.num_vertices() <= opts.dense_threshold ? EigenMethod::dense : EigenMethod::iterative;
    }
    const auto dd = static_cast<double>(*d);
    return method == EigenMethod::dense ? dense_extremes(g, dd, opts) : lanczos_extremes(g, dd, opts);
}

namespace {

void require_connected(const Graph& g) {
    if (!is_connected(g)) throw DisconnectedError("graph is disconnected: resistance is infinite");
}

// Solves L x = b for mean-zero b; x is returned with mean zero.
std::vector<double> laplacian_solve(const Graph& g, const std::vector<double>& b, double tol) {
    const std::size_t n = g.num_vertices();
    const double b_norm = std::sqrt(dot(b, b));
    std::vector<double> x(n, 0.0);
    if (b_norm == 0.0) return x;
    std::vector<double> r = b, p(n), ap(n), lx(n);
    const std::size_t max_it = std::max<std::size_t>(100, 10 * n);
    double residual = b_norm;
    for (int cycle = 0; cycle < 4; ++cycle) {
        p = r;
        double rr = dot(r, r);
        for (std::size_t it = 0; it < max_it && std::sqrt(rr) > 0.1 * tol * b_norm; ++it) {
            laplacian_apply(g, p, ap);
            const double step = rr / dot(p, ap);
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += step * p[i];
                r[i] -= step * ap[i];
            }
            remove_mean(r);
            const double rr_next = dot(r, r);
            const double mix = rr_next / rr;
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + mix * p[i];
            rr = rr_next;
        }
        remove_mean(x);
        laplacian_apply(g, x, lx);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - lx[i];
        remove_mean(r);
        residual = std::sqrt(dot(r, r));
        if (residual <= tol * b_norm) return x;
    }
    throw ConvergenceError("Laplacian solve missed relative residual " + std::to_string(tol),
                           residual / b_norm);
}

}  // namespace

double effective_resistance(const Graph& g, Vertex u, Vertex v, double tol) {
    const std::size_t n = g.num_vertices();
    if (u >= n || v >= n) throw PreconditionError("vertex out of range");
    if (u == v) throw PreconditionError("effective_resistance needs u != v");
    require_connected(g);
    std::vector<double> b(n, 0.0);
    b[u] = 1.0;
    b[v] = -1.0;
    const auto x = laplacian_solve(g, b, tol);
    return x[u] - x[v];
}

ResistanceHittingTable resistance_matrix(const Graph& g, double tol, std::size_t workers) {
    const std::size_t n = g.num_vertices();
    require_connected(g);
    // columns[w] = L^+ (e_w - e_0); columns[0] = 0.
    std::vector<std::vector<double>> columns(n, std::vector<double>(n, 0.0));
    parallel_for(n > 0 ? n - 1 : 0, workers, [&](std::size_t k) {
        const std::size_t w = k + 1;
        std::vector<double> b(n, 0.0);
        b[w] = 1.0;
        b[0] = -1.0;
        columns[w] = laplacian_solve(g, b, tol);
    });
    ResistanceHittingTable table(n);
    for (Vertex u = 0; u < n; ++u) {
        for (Vertex v = u + 1; v < n; ++v) {
            const double r = columns[u][u] - columns[u][v] - columns[v][u] + columns[v][v];
            table.set_resistance(u, v, r);
        }
    }
    table.resistance_source = TableSource::pseudoinverse_solve;
    return table;
}

namespace {

std::size_t require_regular_small(const Graph& g, std::size_t limit) {
    const auto d = g.regular_degree();
    if (!d || *d == 0) throw PreconditionError("exact TV distance needs a regular graph of positive degree");
    if (g.num_vertices() > limit) {
        throw PreconditionError("n = " + std::to_string(g.num_vertices()) + " exceeds the exact-distribution limit " +
                                std::to_string(limit) + "; use a Monte-Carlo estimate instead");
    }
    return *d;
}

class DistributionStepper {
public:
    DistributionStepper(const Graph& g, Vertex start, std::size_t d)
        : g_(g), inv_d_(1.0 / static_cast<double>(d)), p_(g.num_vertices(), 0.0), next_(p_.size()) {
        p_.at(start) = 1.0;
    }

    double tv() const {
        const double u = 1.0 / static_cast<double>(p_.size());
        double s = 0.0;
        for (double x : p_) s += std::abs(x - u);
        return 0.5 * s;
    }

    void step() {
        adjacency_apply(g_, p_, next_);
        for (double& x : next_) x *= inv_d_;
        p_.swap(next_);
    }

private:
    const Graph& g_;
    double inv_d_;
    std::vector<double> p_, next_;
};

}  // namespace

std::vector<double> tv_distance_profile(const Graph& g, Vertex start, std::size_t t_max, std::size_t limit) {
    const std::size_t d = require_regular_small(g, limit);
    if (start >= g.num_vertices()) throw PreconditionError("start vertex out of range");
    DistributionStepper walk(g, start, d);
    std::vector<double> out;
    out.reserve(t_max + 1);
    out.push_back(walk.tv());
    for (std::size_t t = 1; t <= t_max; ++t) {
        walk.step();
        out.push_back(walk.tv());
    }
    return out;
}

std::vector<double> worst_start_tv_profile(const Graph& g, std::size_t t_max, std::size_t limit) {
    require_regular_small(g, limit);
    std::vector<double> worst(t_max + 1, 0.0);
    for (Vertex s = 0; s < g.num_vertices(); ++s) {
        const auto profile = tv_distance_profile(g, s, t_max, limit);
        for (std::size_t t = 0; t <= t_max; ++t) worst[t] = std::max(worst[t], profile[t]);
    }
    return worst;
}

std::size_t empirical_mixing_time(const Graph& g, double xi, std::size_t max_steps, std::size_t limit) {
    const std::size_t d = require_regular_small(g, limit);
    if (!(xi > 0.0 && xi < 1.0)) throw PreconditionError("xi must lie in (0, 1)");
    const auto profile = connectivity_profile(g);
    if (!profile.connected) throw PreconditionError("walk on a disconnected graph never mixes");
    if (profile.bipartite) throw PreconditionError("walk on a bipartite graph never mixes (periodic)");
    std::size_t worst = 0;
    for (Vertex s = 0; s < g.num_vertices(); ++s) {
        DistributionStepper walk(g, s, d);
        std::size_t t = 0;
        while (walk.tv() >= xi) {
            if (++t > max_steps) {
                throw ConvergenceError("no mixing within " + std::to_string(max_steps) + " steps", walk.tv());
            }
            walk.step();
        }
        worst = std::max(worst, t);
    }
    return worst;
}

}  // namespace tracelab
