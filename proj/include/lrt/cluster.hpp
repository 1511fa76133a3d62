#ifndef LRT_CLUSTER_HPP
#define LRT_CLUSTER_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "lrt/dataset.hpp"
#include "lrt/transform_learn.hpp"

namespace lrt {

struct ClusteringResult {
    std::vector<int> assignments;  // one cluster id per column
    int num_clusters = 0;
    std::vector<double> objective_trace;       // per LRSC outer iteration
    std::vector<double> per_cluster_nuclear_norms;
    std::vector<double> misclassification_trace;  // filled when truth given
    std::vector<int> empty_clusters;              // flagged, not fatal
    bool converged = false;  // assignments reached a fixed point (LRSC)
    int outer_iterations = 0;
};

struct AffinityMatrix {
    Matrix W;  // symmetric, nonnegative, zero diagonal
};

/// Plugin contract: (transformed points, C, seed) -> assignments.
using ClustererFn =
    std::function<std::vector<int>(const Matrix& TY, int C, std::uint64_t seed)>;

struct ClustererSpec {
    int K = 6;                       // neighbors for R-SSC
    double beta = -1;                // rpca beta, -1 = default
    ClustererFn custom;              // overrides the built-in R-SSC when set
};

/// Closed-form local coding weights for one point against its K neighbors
/// (d x K, neighbors as columns). Weights sum to 1.
Vector lle_code(const Vector& point, const Matrix& neighbors);

/// R-SSC affinity: rpca-denoise, code each point over its K nearest columns
/// of L, W = |X| + |X'| with zero diagonal.
AffinityMatrix rssc_affinity(const Matrix& TY, int K, double beta = -1);

/// The sparse coding matrix X (row i = codes of point i); exposed for tests.
Matrix rssc_coding_matrix(const Matrix& TY, int K, double beta = -1);

/// Normalized-cuts spectral clustering: symmetric-normalized Laplacian,
/// row-normalized embedding, k-means++ with 20 restarts.
std::vector<int> spectral_cluster(const AffinityMatrix& affinity, int C,
                                  std::uint64_t seed);

ClusteringResult rssc(const Matrix& TY, int C, int K, double beta,
                      std::uint64_t seed);

struct LrscResult {
    ClusteringResult clustering;
    TransformModel model;
};

/// Alternate cluster-assign / transform-relearn until the assignments stop
/// changing or max_outer is reached.
LrscResult lrsc(const Matrix& Y, int C, const ClustererSpec& clusterer,
                const LearnConfig& learn_cfg, int max_outer = 20,
                const std::vector<int>* ground_truth = nullptr,
                bool warm_restart = true);

/// Diagnostic: sum of squared residuals to each cluster's span plus
/// lambda * (sum_c ||TY_c||_* - ||TY||_*).
double lrsc_objective(const Matrix& T, const std::vector<int>& assignments,
                      const Matrix& Y, double lambda);

/// 1 - best bipartite label matching / N (Hungarian algorithm).
double misclassification_rate(const std::vector<int>& predicted,
                              const std::vector<int>& truth);

/// Maximum-weight assignment on a square weight matrix; returns the column
/// matched to each row. Exposed for tests.
std::vector<int> max_weight_assignment(const Matrix& weights);

/// Internal k-means (k-means++ seeding, best inertia over restarts);
/// exposed for tests. Rows of `points` are observations.
std::vector<int> kmeans(const Matrix& points, int k, std::uint64_t seed,
                        int restarts = 20, int max_iter = 300);

} // namespace lrt

#endif
