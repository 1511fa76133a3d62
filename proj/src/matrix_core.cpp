#include "lrt/matrix_core.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>
#include <stdexcept>

namespace lrt {

void check_finite(const Matrix& A, const char* what) {
    if (A.rows() < 1 || A.cols() < 1)
        throw std::invalid_argument(std::string(what) + ": empty matrix");
    if (!A.allFinite())
        throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

namespace {

// Flip signs so each U column's largest-magnitude entry is positive.
void canonicalize_signs(Matrix& U, Matrix& V, int ncols) {
    for (int j = 0; j < ncols; ++j) {
        int imax = 0;
        U.col(j).cwiseAbs().maxCoeff(&imax);
        if (U(imax, j) < 0) {
            U.col(j) = -U.col(j);
            if (j < V.cols()) V.col(j) = -V.col(j);
        }
    }
}

} // namespace

SvdFactors svd(const Matrix& A) {
    check_finite(A, "svd");
    Eigen::JacobiSVD<Matrix> solver(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("svd: eigensolver failed to converge");
    SvdFactors f{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    canonicalize_signs(f.U, f.V, static_cast<int>(f.U.cols()));
    return f;
}

SvdFactors svd_full(const Matrix& A) {
    check_finite(A, "svd");
    Eigen::JacobiSVD<Matrix> solver(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("svd: eigensolver failed to converge");
    SvdFactors f{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    canonicalize_signs(f.U, f.V, static_cast<int>(f.singular_values.size()));
    return f;
}

double nuclear_norm(const Matrix& A) { return svd(A).singular_values.sum(); }

double spectral_norm(const Matrix& A) {
    check_finite(A, "spectral_norm");
    return Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
}

double frobenius_norm(const Matrix& A) {
    check_finite(A, "frobenius_norm");
    return A.norm();
}

int numerical_rank(const Matrix& A, double delta_rel) {
    Vector s = Eigen::JacobiSVD<Matrix>(A).singularValues();
    double cut = delta_rel * s(0);
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > cut) ++r;
    return r;
}

Matrix nuclear_subdifferential(const Matrix& A, double delta, std::uint64_t seed) {
    if (delta <= 0) throw std::invalid_argument("nuclear_subdifferential: delta must be > 0");
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    SvdFactors f = svd_full(A);
    int r = 0;  // retained singular directions
    for (int i = 0; i < f.singular_values.size(); ++i)
        if (f.singular_values(i) >= delta) ++r;

    Matrix G = Matrix::Zero(m, n);
    if (r > 0)
        G = f.U.leftCols(r) * f.V.leftCols(r).transpose();
    if (r < m && r < n) {
        Matrix B(m - r, n - r);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int i = 0; i < B.rows(); ++i)
            for (int j = 0; j < B.cols(); ++j) B(i, j) = gauss(rng);
        double s = spectral_norm(B);
        if (s > 0) {
            B /= s;
            G += f.U.rightCols(m - r) * B * f.V.rightCols(n - r).transpose();
        }
    }
    return G;
}

double smallest_principal_angle(const SubspaceBasis& s1, const SubspaceBasis& s2) {
    if (s1.ambient_dim() != s2.ambient_dim())
        throw std::invalid_argument("smallest_principal_angle: ambient dimension mismatch");
    Matrix G = s1.basis.transpose() * s2.basis;
    double c = Eigen::JacobiSVD<Matrix>(G).singularValues()(0);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

double mean_cosine_principal_angles(const SubspaceBasis& s1, const SubspaceBasis& s2) {
    if (s1.ambient_dim() != s2.ambient_dim())
        throw std::invalid_argument("mean_cosine_principal_angles: ambient dimension mismatch");
    Vector s = Eigen::JacobiSVD<Matrix>(s1.basis.transpose() * s2.basis).singularValues();
    double mean = s.sum() / s.size();
    return std::clamp(mean, 0.0, 1.0);
}

SubspaceBasis fit_subspace_basis(const Matrix& Y, int k) {
    if (k < 1 || k > std::min(Y.rows(), Y.cols()))
        throw std::invalid_argument("fit_subspace_basis: k out of range");
    SvdFactors f = svd(Y);
    return SubspaceBasis{f.U.leftCols(k)};
}

Matrix orthogonalizing_transform(const std::vector<SubspaceBasis>& bases) {
    if (bases.empty()) throw std::invalid_argument("orthogonalizing_transform: no bases");
    const int d = bases[0].ambient_dim();
    int r = 0;
    for (const auto& b : bases) {
        if (b.ambient_dim() != d)
            throw std::invalid_argument("orthogonalizing_transform: ambient dimension mismatch");
        r += b.subspace_dim();
    }
    Matrix U(d, r);
    int col = 0;
    for (const auto& b : bases) {
        U.middleCols(col, b.subspace_dim()) = b.basis;
        col += b.subspace_dim();
    }
    Vector s = Eigen::JacobiSVD<Matrix>(U).singularValues();
    if (s(s.size() - 1) <= 0 || s(0) / s(s.size() - 1) >= 1e12)
        throw std::runtime_error("orthogonalizing_transform: stacked basis is rank-deficient");
    return (U.transpose() * U).ldlt().solve(U.transpose());
}

Matrix lda_transform(const LabeledDataset& data, int out_dim) {
    const int d = data.dim();
    const int C = data.num_classes();
    if (C < 2) throw std::invalid_argument("lda_transform: need at least 2 classes");
    if (out_dim < 1 || out_dim > d)
        throw std::invalid_argument("lda_transform: out_dim out of range");

    Vector mean = data.Y.rowwise().mean();
    Matrix Sw = Matrix::Zero(d, d);
    Matrix Sb = Matrix::Zero(d, d);
    for (int c = 0; c < C; ++c) {
        Matrix Yc = data.class_matrix(c);
        if (Yc.cols() == 0) throw std::invalid_argument("lda_transform: empty class");
        Vector mc = Yc.rowwise().mean();
        Matrix centered = Yc.colwise() - mc;
        Sw += centered * centered.transpose();
        Vector diff = mc - mean;
        Sb += static_cast<double>(Yc.cols()) * diff * diff.transpose();
    }
    double eps = 1e-6 * Sw.trace() / d;
    if (eps <= 0) eps = 1e-12;
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(
        Sb, Sw + eps * Matrix::Identity(d, d));
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("lda_transform: generalized eigensolver failed");
    // eigenvalues ascending; take the trailing out_dim eigenvectors
    Matrix W = solver.eigenvectors().rightCols(out_dim).rowwise().reverse();
    Eigen::HouseholderQR<Matrix> qr(W);
    Matrix Q = qr.householderQ() * Matrix::Identity(d, out_dim);
    return Q.transpose();
}

} // namespace lrt
