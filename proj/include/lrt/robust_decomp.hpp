#ifndef LRT_ROBUST_DECOMP_HPP
#define LRT_ROBUST_DECOMP_HPP

#include "lrt/dataset.hpp"

namespace lrt {

struct RpcaResult {
    Matrix L;  // low-rank part
    Matrix S;  // sparse part
    int iterations_used = 0;
    double primal_residual = 0;  // ||M - L - S||_F / ||M||_F at termination
    bool converged = false;
};

/// Default beta = 1 / sqrt(max(rows, cols)).
constexpr double kRpcaDefaultBeta = -1.0;

/// Low-rank + sparse decomposition, min ||L||_* + beta ||S||_1 s.t. M = L + S,
/// solved by the inexact augmented Lagrangian method (singular-value
/// thresholding on L, entrywise soft thresholding on S).
RpcaResult rpca(const Matrix& M, double beta = kRpcaDefaultBeta,
                double tol = 1e-7, int max_iter = 500);

/// Singular-value thresholding: shrink each singular value by tau.
Matrix svd_threshold(const Matrix& A, double tau);

/// Orthogonal matching pursuit: greedy support selection by maximal
/// absolute correlation with the residual, least-squares refit each step.
/// Atoms are l2-normalized internally; returned coefficients apply to the
/// original (unnormalized) atoms. Ties break to the lowest atom index.
Vector omp(const Vector& y, const Matrix& D, int sparsity);

} // namespace lrt

#endif
