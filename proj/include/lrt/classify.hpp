#ifndef LRT_CLASSIFY_HPP
#define LRT_CLASSIFY_HPP

#include <utility>
#include <vector>

#include "lrt/dataset.hpp"
#include "lrt/transform_learn.hpp"

namespace lrt {

enum class ClassifyMode { NearestNeighbor, OmpReconstruction };

struct ClassifierModel {
    TransformModel transform;
    ClassifyMode mode = ClassifyMode::OmpReconstruction;
    int sparsity = 10;
    double beta = -1;
    // one entry per class: rpca low-rank basis (omp mode) or transformed
    // training gallery (nn mode)
    std::vector<Matrix> class_bases;
};

ClassifierModel train_classifier(const LabeledDataset& train,
                                 const TransformModel& transform,
                                 ClassifyMode mode, int sparsity = 10,
                                 double beta = -1);

/// Returns (class id, score). nn mode: score = winning distance.
/// omp mode: score = winning reconstruction residual. Ties break to the
/// lowest class id.
std::pair<int, double> classify_point(const ClassifierModel& model,
                                      const Vector& y);

double evaluate_accuracy(const ClassifierModel& model, const LabeledDataset& test);

} // namespace lrt

#endif
