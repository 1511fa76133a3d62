#include "lrt/classify.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "lrt/robust_decomp.hpp"

namespace lrt {

ClassifierModel train_classifier(const LabeledDataset& train,
                                 const TransformModel& transform,
                                 ClassifyMode mode, int sparsity, double beta) {
    const int C = train.num_classes();
    if (C < 1) throw std::invalid_argument("train_classifier: no classes");
    if (sparsity < 1) throw std::invalid_argument("train_classifier: sparsity must be >= 1");

    ClassifierModel model;
    model.transform = transform;
    model.mode = mode;
    model.sparsity = sparsity;
    model.beta = beta;

    const bool per_class = transform.kind == TransformKind::PerClass;
    for (int c = 0; c < C; ++c) {
        Matrix Yc = train.class_matrix(c);
        if (Yc.cols() == 0)
            throw std::invalid_argument("train_classifier: empty class " + std::to_string(c));
        Matrix TYc = apply_transform(transform, Yc, per_class ? c : -1);
        if (mode == ClassifyMode::OmpReconstruction)
            model.class_bases.push_back(rpca(TYc, beta).L);
        else
            model.class_bases.push_back(std::move(TYc));
    }
    return model;
}

std::pair<int, double> classify_point(const ClassifierModel& model, const Vector& y) {
    const int C = static_cast<int>(model.class_bases.size());
    if (C < 1) throw std::invalid_argument("classify_point: untrained model");
    const bool per_class = model.transform.kind == TransformKind::PerClass;
    if (y.size() != model.transform.transforms[0].cols())
        throw std::invalid_argument("classify_point: dimension mismatch");

    int best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (int c = 0; c < C; ++c) {
        Vector ty = apply_transform(model.transform, y, per_class ? c : -1);
        double score;
        if (model.mode == ClassifyMode::OmpReconstruction) {
            const Matrix& L = model.class_bases[c];
            int s = std::min<int>(model.sparsity, static_cast<int>(L.cols()));
            Vector x = omp(ty, L, s);
            score = (ty - L * x).norm();
        } else {
            // nearest training column within this class's gallery
            score = std::numeric_limits<double>::infinity();
            const Matrix& gallery = model.class_bases[c];
            for (int j = 0; j < gallery.cols(); ++j)
                score = std::min(score, (ty - gallery.col(j)).norm());
        }
        if (score < best_score) {  // ties keep the lowest class id
            best_score = score;
            best = c;
        }
    }
    return {best, best_score};
}

double evaluate_accuracy(const ClassifierModel& model, const LabeledDataset& test) {
    if (test.size() == 0) return 0;
    int correct = 0;
    for (int i = 0; i < test.size(); ++i)
        if (classify_point(model, test.Y.col(i)).first == test.labels[i]) ++correct;
    return static_cast<double>(correct) / test.size();
}

} // namespace lrt
