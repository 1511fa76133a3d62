#include "lrt/robust_decomp.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "lrt/matrix_core.hpp"

namespace lrt {

namespace {

Matrix soft_threshold(const Matrix& A, double tau) {
    return A.unaryExpr([tau](double v) {
        return v > tau ? v - tau : (v < -tau ? v + tau : 0.0);
    });
}

} // namespace

Matrix svd_threshold(const Matrix& A, double tau) {
    Eigen::JacobiSVD<Matrix> solver(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector s = solver.singularValues();
    for (int i = 0; i < s.size(); ++i) s(i) = std::max(s(i) - tau, 0.0);
    return solver.matrixU() * s.asDiagonal() * solver.matrixV().transpose();
}

RpcaResult rpca(const Matrix& M, double beta, double tol, int max_iter) {
    check_finite(M, "rpca");
    if (beta == kRpcaDefaultBeta)
        beta = 1.0 / std::sqrt(static_cast<double>(std::max(M.rows(), M.cols())));
    if (beta <= 0) throw std::invalid_argument("rpca: beta must be > 0");
    if (tol <= 0) throw std::invalid_argument("rpca: tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("rpca: max_iter must be >= 1");

    double m_fro = M.norm();
    if (m_fro == 0)
        return {Matrix::Zero(M.rows(), M.cols()), Matrix::Zero(M.rows(), M.cols()),
                0, 0.0, true};

    double sigma_max = spectral_norm(M);
    // dual-feasible starting multiplier (Lin et al. inexact ALM defaults)
    double J = std::max(sigma_max, M.cwiseAbs().maxCoeff() / beta);
    Matrix Z = M / J;
    double mu = 1.25 / sigma_max;
    const double rho = 1.6;
    const double mu_max = mu * 1e7;

    Matrix L = Matrix::Zero(M.rows(), M.cols());
    Matrix S = Matrix::Zero(M.rows(), M.cols());

    RpcaResult result;
    for (int it = 0; it < max_iter; ++it) {
        L = svd_threshold(M - S + Z / mu, 1.0 / mu);
        S = soft_threshold(M - L + Z / mu, beta / mu);
        Matrix residual = M - L - S;
        Z += mu * residual;
        mu = std::min(mu * rho, mu_max);
        result.iterations_used = it + 1;
        result.primal_residual = residual.norm() / m_fro;
        if (result.primal_residual <= tol) {
            result.converged = true;
            break;
        }
    }
    result.L = std::move(L);
    result.S = std::move(S);
    return result;
}

Vector omp(const Vector& y, const Matrix& D, int sparsity) {
    const int n_atoms = static_cast<int>(D.cols());
    if (sparsity < 1 || sparsity > n_atoms)
        throw std::invalid_argument("omp: sparsity out of range");
    if (D.rows() != y.size()) throw std::invalid_argument("omp: dimension mismatch");

    Vector norms = D.colwise().norm();
    if ((norms.array() <= 0).all())
        throw std::invalid_argument("omp: dictionary is zero");
    Matrix Dn = D;
    for (int j = 0; j < n_atoms; ++j)
        if (norms(j) > 0) Dn.col(j) /= norms(j);

    Vector residual = y;
    std::vector<int> support;
    Vector coeffs_on_support;
    for (int step = 0; step < sparsity; ++step) {
        // best new atom by absolute correlation; ties to lowest index
        int best = -1;
        double best_corr = 0;
        for (int j = 0; j < n_atoms; ++j) {
            if (norms(j) <= 0) continue;
            bool taken = false;
            for (int s : support)
                if (s == j) { taken = true; break; }
            if (taken) continue;
            double corr = std::abs(Dn.col(j).dot(residual));
            if (corr > best_corr + 1e-15) {
                best_corr = corr;
                best = j;
            }
        }
        if (best < 0 || best_corr <= 1e-14) break;
        support.push_back(best);

        Matrix sub(D.rows(), support.size());
        for (size_t k = 0; k < support.size(); ++k) sub.col(k) = Dn.col(support[k]);
        coeffs_on_support = sub.householderQr().solve(y);
        residual = y - sub * coeffs_on_support;
    }

    Vector x = Vector::Zero(n_atoms);
    for (size_t k = 0; k < support.size(); ++k)
        x(support[k]) = coeffs_on_support(k) / norms(support[k]);
    return x;
}

} // namespace lrt
