#ifndef LRT_MATRIX_CORE_HPP
#define LRT_MATRIX_CORE_HPP

#include <cstdint>
#include <vector>

#include "lrt/dataset.hpp"

namespace lrt {

struct SvdFactors {
    Matrix U;                // column-orthonormal
    Vector singular_values;  // nonincreasing, >= 0
    Matrix V;                // column-orthonormal

    Matrix reconstruct() const {
        return U * singular_values.asDiagonal() * V.transpose();
    }
};

void check_finite(const Matrix& A, const char* what);

/// Thin SVD with canonical signs: the largest-magnitude entry of each U
/// column is made positive (V flipped accordingly).
SvdFactors svd(const Matrix& A);

/// Full SVD (U square m x m, V square n x n), same sign convention applied
/// to the range columns.
SvdFactors svd_full(const Matrix& A);

double nuclear_norm(const Matrix& A);
double spectral_norm(const Matrix& A);
double frobenius_norm(const Matrix& A);

/// Number of singular values above delta_rel * sigma_max.
int numerical_rank(const Matrix& A, double delta_rel = 1e-6);

/// One element of the subdifferential of the nuclear norm at A:
/// G = U1 V1' + U2 B V2' where U1,V1 span the singular directions with
/// sigma >= delta and B is a seeded random fill scaled to unit spectral
/// norm. Always satisfies ||G||_2 <= 1.
Matrix nuclear_subdifferential(const Matrix& A, double delta, std::uint64_t seed);

struct SubspaceBasis {
    Matrix basis;  // d x k, column-orthonormal

    int ambient_dim() const { return static_cast<int>(basis.rows()); }
    int subspace_dim() const { return static_cast<int>(basis.cols()); }
};

/// arccos of the largest singular value of S1'S2, in [0, pi/2].
double smallest_principal_angle(const SubspaceBasis& s1, const SubspaceBasis& s2);

/// Mean of all singular values of S1'S2, in [0, 1].
double mean_cosine_principal_angles(const SubspaceBasis& s1, const SubspaceBasis& s2);

/// Top-k left singular vectors of Y.
SubspaceBasis fit_subspace_basis(const Matrix& Y, int k);

/// Closed-form orthogonalizing transform T = (U'U)^{-1} U' for the stacked
/// basis U = [U_1 ... U_C]. Fails on (numerically) dependent subspaces.
Matrix orthogonalizing_transform(const std::vector<SubspaceBasis>& bases);

/// Top-r discriminant directions of (S_w + eps I)^{-1} S_b, rows
/// orthonormalized. Baseline only.
Matrix lda_transform(const LabeledDataset& data, int out_dim);

} // namespace lrt

#endif
