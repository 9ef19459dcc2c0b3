#pragma once

// Small dense kernels shared by the spectral and bounds modules.

#include <cstddef>
#include <vector>

namespace tracelab::linalg {

/// Row-major square matrix.
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> a;

    explicit DenseMatrix(std::size_t size = 0) : n(size), a(size * size, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

struct JacobiResult {
    std::vector<double> eigenvalues;  // descending
    double off_norm = 0.0;            // Frobenius norm of the remaining off-diagonal part
    std::size_t sweeps = 0;
    bool converged = false;
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
/// Stops once the off-diagonal Frobenius norm is <= tol or after max_sweeps.
JacobiResult jacobi_eigenvalues(DenseMatrix m, double tol, std::size_t max_sweeps = 100);

/// Eigen-decomposition of a symmetric tridiagonal matrix (implicit QL).
/// On return `diag` holds the eigenvalues (unsorted) and `last_row[i]` the
/// last component of the i-th normalized eigenvector.
void tridiagonal_ql(std::vector<double>& diag, std::vector<double> offdiag,
                    std::vector<double>& last_row);

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Throws PreconditionError when A is numerically singular.
std::vector<double> solve(DenseMatrix a, std::vector<double> b);

}  // namespace tracelab::linalg
