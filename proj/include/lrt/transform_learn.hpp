#ifndef LRT_TRANSFORM_LEARN_HPP
#define LRT_TRANSFORM_LEARN_HPP

#include <cstdint>
#include <vector>

#include "lrt/dataset.hpp"

namespace lrt {

struct LearnConfig {
    double gamma = 1.0;        // spectral-norm constraint on T
    double step_size = 0.02;   // subgradient step
    int iterations = 100;      // inner subgradient steps per outer iteration
    int out_dim = 0;           // 0 = ambient dimension (square transform)
    double lambda = 1.0;       // balance term for per-class learning
    int minibatches = 1;       // 1 = full batch
    std::uint64_t seed = 42;
    double delta_rel = 1e-6;   // relative rank cut for the subdifferential
    int dc_outer_iterations = 1;
    bool online_summed = false;  // summed-minibatch step instead of sequential

    void validate(int data_dim, int data_count) const;
};

enum class TransformKind { Global, PerClass };

struct TransformModel {
    TransformKind kind = TransformKind::Global;
    std::vector<Matrix> transforms;  // one (global) or one per class
    std::vector<double> objective_trace;
    LearnConfig config;

    const Matrix& global() const { return transforms.at(0); }
};

/// sum_c ||T Y_c||_* - ||T Y||_*  (always >= 0 up to roundoff).
double objective_nuclear(const Matrix& T, const LabeledDataset& data);

/// Rank twin of the objective; reporting only.
double objective_rank(const Matrix& T, const LabeledDataset& data,
                      double delta_rel = 1e-6);

/// Subgradient of the objective at T:
/// sum_c d||T Y_c|| Y_c' - d||T Y|| Y'.
Matrix subgradient_step_matrix(const Matrix& T, const LabeledDataset& data,
                               double delta_rel, std::uint64_t seed);

TransformModel learn_global(const LabeledDataset& data, const LearnConfig& cfg,
                            const Matrix* warm_start = nullptr);

TransformModel learn_per_class(const LabeledDataset& data, const LearnConfig& cfg);

TransformModel learn_online(const LabeledDataset& data, const LearnConfig& cfg);

/// T*Y (global) or T_c*Y (per-class, class_id required).
Matrix apply_transform(const TransformModel& model, const Matrix& Y,
                       int class_id = -1);

/// Seeded random partition of {0..n-1} into b batches (sizes differ by at
/// most one). Exposed for tests.
std::vector<std::vector<int>> minibatch_partition(int n, int b, std::uint64_t seed);

} // namespace lrt

#endif
