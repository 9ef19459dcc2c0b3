#include "tracelab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tracelab/errors.hpp"

namespace tracelab::linalg {

namespace {

double off_diagonal_norm(const DenseMatrix& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = i + 1; j < m.n; ++j) s += 2.0 * m(i, j) * m(i, j);
    }
    return std::sqrt(s);
}

}  // namespace

JacobiResult jacobi_eigenvalues(DenseMatrix m, double tol, std::size_t max_sweeps) {
    const std::size_t n = m.n;
    JacobiResult out;
    for (out.sweeps = 0; out.sweeps < max_sweeps; ++out.sweeps) {
        out.off_norm = off_diagonal_norm(m);
        if (out.off_norm <= tol) {
            out.converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double app = m(p, p), aqq = m(q, q);
                // Rotation angle zeroing m(p, q); t = tan(theta), smaller root.
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = m(k, p), akq = m(k, q);
                    const double np = c * akp - s * akq;
                    const double nq = s * akp + c * akq;
                    m(k, p) = m(p, k) = np;
                    m(k, q) = m(q, k) = nq;
                }
                m(p, p) = app - t * apq;
                m(q, q) = aqq + t * apq;
                m(p, q) = m(q, p) = 0.0;
            }
        }
    }
    if (!out.converged) out.off_norm = off_diagonal_norm(m);
    out.converged = out.off_norm <= tol;
    out.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = m(i, i);
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), std::greater<>());
    return out;
}

void tridiagonal_ql(std::vector<double>& d, std::vector<double> e, std::vector<double>& z) {
    const std::size_t n = d.size();
    z.assign(n, 0.0);
    if (n == 0) return;
    z[n - 1] = 1.0;
    // z tracks the last row of the accumulated rotation matrix.
    e.resize(n, 0.0);
    e[n - 1] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-15 * dd) break;
            }
            if (m != l) {
                if (++iter > 60) throw ConvergenceError("tridiagonal QL did not converge", std::abs(e[l]));
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                std::size_t i = m;
                bool underflow = false;
                while (i-- > l) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

std::vector<double> solve(DenseMatrix a, std::vector<double> b) {
    const std::size_t n = a.n;
    double scale = 0.0;
    for (double v : a.a) scale = std::max(scale, std::abs(v));
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        }
        if (std::abs(a(piv, col)) <= 1e-14 * scale) throw PreconditionError("singular linear system");
        if (piv != col) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a(col, k), a(piv, k));
            std::swap(b[col], b[piv]);
        }
        const double inv = 1.0 / a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) * inv;
            if (f == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) a(r, k) -= f * a(col, k);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a(i, k) * x[k];
        x[i] = s / a(i, i);
    }
    return x;
}

}  // namespace tracelab::linalg
