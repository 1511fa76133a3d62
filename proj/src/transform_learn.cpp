#include "lrt/transform_learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "lrt/matrix_core.hpp"

namespace lrt {

void LearnConfig::validate(int data_dim, int data_count) const {
    if (gamma <= 0) throw std::invalid_argument("LearnConfig: gamma must be > 0");
    if (step_size <= 0) throw std::invalid_argument("LearnConfig: step_size must be > 0");
    if (iterations < 0) throw std::invalid_argument("LearnConfig: iterations must be >= 0");
    if (out_dim < 0 || out_dim > data_dim)
        throw std::invalid_argument("LearnConfig: out_dim out of range");
    if (lambda < 0) throw std::invalid_argument("LearnConfig: lambda must be >= 0");
    if (minibatches < 1 || minibatches > data_count)
        throw std::invalid_argument("LearnConfig: minibatches out of range");
    if (delta_rel <= 0) throw std::invalid_argument("LearnConfig: delta_rel must be > 0");
    if (dc_outer_iterations < 1)
        throw std::invalid_argument("LearnConfig: dc_outer_iterations must be >= 1");
}

namespace {

// Rank cut for the subdifferential of ||A||_* relative to sigma_max;
// falls back to delta_rel itself when A = 0.
double subdiff_delta(const Matrix& A, double delta_rel) {
    double smax = spectral_norm(A);
    return smax > 0 ? delta_rel * smax : delta_rel;
}

Matrix norm_subgradient(const Matrix& A, double delta_rel, std::uint64_t seed) {
    return nuclear_subdifferential(A, subdiff_delta(A, delta_rel), seed);
}

struct ClassSplit {
    std::vector<Matrix> per_class;

    explicit ClassSplit(const LabeledDataset& data) {
        int C = data.num_classes();
        if (C < 1) throw std::invalid_argument("dataset has no classes");
        for (int c = 0; c < C; ++c) {
            Matrix Yc = data.class_matrix(c);
            if (Yc.cols() == 0)
                throw std::invalid_argument("dataset has an empty class: " + std::to_string(c));
            per_class.push_back(std::move(Yc));
        }
    }
};

Matrix initial_transform(int out_dim, int d, const Matrix* warm_start) {
    if (warm_start) {
        if (warm_start->rows() != out_dim || warm_start->cols() != d)
            throw std::invalid_argument("learn: warm_start has wrong shape");
        return *warm_start;
    }
    return Matrix::Identity(out_dim, d);
}

void check_iterate(const Matrix& T, int iteration) {
    if (!T.allFinite())
        throw std::runtime_error("learn: non-finite iterate at iteration " +
                                 std::to_string(iteration));
}

Matrix project_spectral(const Matrix& T, double gamma) {
    double s = spectral_norm(T);
    if (s <= 0) throw std::runtime_error("learn: transform collapsed to zero");
    return (gamma / s) * T;
}

LabeledDataset subset_dataset(const LabeledDataset& data, const std::vector<int>& idx) {
    LabeledDataset sub;
    sub.Y.resize(data.Y.rows(), idx.size());
    sub.labels.resize(idx.size());
    for (size_t j = 0; j < idx.size(); ++j) {
        sub.Y.col(j) = data.Y.col(idx[j]);
        sub.labels[j] = data.labels[idx[j]];
    }
    // remap labels to contiguous ids; a minibatch may miss classes
    std::vector<int> seen;
    for (int& l : sub.labels) {
        auto it = std::find(seen.begin(), seen.end(), l);
        if (it == seen.end()) {
            seen.push_back(l);
            l = static_cast<int>(seen.size()) - 1;
        } else {
            l = static_cast<int>(it - seen.begin());
        }
    }
    return sub;
}

} // namespace

double objective_nuclear(const Matrix& T, const LabeledDataset& data) {
    if (T.cols() != data.Y.rows())
        throw std::invalid_argument("objective_nuclear: dimension mismatch");
    ClassSplit split(data);
    double obj = 0;
    for (const Matrix& Yc : split.per_class) obj += nuclear_norm(T * Yc);
    return obj - nuclear_norm(T * data.Y);
}

double objective_rank(const Matrix& T, const LabeledDataset& data, double delta_rel) {
    ClassSplit split(data);
    double obj = 0;
    for (const Matrix& Yc : split.per_class) obj += numerical_rank(T * Yc, delta_rel);
    return obj - numerical_rank(T * data.Y, delta_rel);
}

Matrix subgradient_step_matrix(const Matrix& T, const LabeledDataset& data,
                               double delta_rel, std::uint64_t seed) {
    if (T.cols() != data.Y.rows())
        throw std::invalid_argument("subgradient_step_matrix: dimension mismatch");
    ClassSplit split(data);
    Matrix step = Matrix::Zero(T.rows(), T.cols());
    for (const Matrix& Yc : split.per_class)
        step += norm_subgradient(T * Yc, delta_rel, seed) * Yc.transpose();
    step -= norm_subgradient(T * data.Y, delta_rel, seed) * data.Y.transpose();
    return step;
}

TransformModel learn_global(const LabeledDataset& data, const LearnConfig& cfg,
                            const Matrix* warm_start) {
    cfg.validate(data.dim(), data.size());
    ClassSplit split(data);
    const int d = data.dim();
    const int r = cfg.out_dim == 0 ? d : cfg.out_dim;

    Matrix T = initial_transform(r, d, warm_start);
    TransformModel model;
    model.kind = TransformKind::Global;
    model.config = cfg;
    model.objective_trace.push_back(objective_nuclear(T, data));

    int global_iter = 0;
    for (int outer = 0; outer < cfg.dc_outer_iterations; ++outer) {
        // frozen concave-term subgradient for this outer iteration
        Matrix concave_grad;
        const bool freeze = cfg.dc_outer_iterations > 1;
        if (freeze)
            concave_grad = norm_subgradient(T * data.Y, cfg.delta_rel,
                                            derive_seed(cfg.seed, 9000 + outer));
        for (int t = 0; t < cfg.iterations; ++t, ++global_iter) {
            std::uint64_t iter_seed = derive_seed(cfg.seed, global_iter);
            Matrix step = Matrix::Zero(r, d);
            for (const Matrix& Yc : split.per_class)
                step += norm_subgradient(T * Yc, cfg.delta_rel, iter_seed) * Yc.transpose();
            if (freeze)
                step -= concave_grad * data.Y.transpose();
            else
                step -= norm_subgradient(T * data.Y, cfg.delta_rel, iter_seed) *
                        data.Y.transpose();
            T -= cfg.step_size * step;
            check_iterate(T, global_iter);
            T = project_spectral(T, cfg.gamma);
            model.objective_trace.push_back(objective_nuclear(T, data));
        }
    }
    model.transforms.push_back(std::move(T));
    return model;
}

TransformModel learn_per_class(const LabeledDataset& data, const LearnConfig& cfg) {
    cfg.validate(data.dim(), data.size());
    const int C = data.num_classes();
    if (C < 2) throw std::invalid_argument("learn_per_class: need at least 2 classes");
    const int d = data.dim();
    const int r = cfg.out_dim == 0 ? d : cfg.out_dim;

    TransformModel model;
    model.kind = TransformKind::PerClass;
    model.config = cfg;
    model.objective_trace.assign(cfg.iterations + 1, 0.0);

    for (int c = 0; c < C; ++c) {
        Matrix Yc = data.class_matrix(c);
        Matrix Yn = data.complement_matrix(c);
        if (Yc.cols() == 0)
            throw std::invalid_argument("learn_per_class: empty class " + std::to_string(c));
        Matrix T = Matrix::Identity(r, d);
        auto class_obj = [&] {
            return nuclear_norm(T * Yc) - cfg.lambda * nuclear_norm(T * Yn);
        };
        model.objective_trace[0] += class_obj();
        for (int t = 0; t < cfg.iterations; ++t) {
            std::uint64_t iter_seed = derive_seed(cfg.seed, t);
            Matrix step = norm_subgradient(T * Yc, cfg.delta_rel, iter_seed) * Yc.transpose();
            if (cfg.lambda > 0 && Yn.cols() > 0)
                step -= cfg.lambda * norm_subgradient(T * Yn, cfg.delta_rel, iter_seed) *
                        Yn.transpose();
            T -= cfg.step_size * step;
            check_iterate(T, t);
            T = project_spectral(T, cfg.gamma);
            model.objective_trace[t + 1] += class_obj();
        }
        model.transforms.push_back(std::move(T));
    }
    return model;
}

std::vector<std::vector<int>> minibatch_partition(int n, int b, std::uint64_t seed) {
    if (b < 1 || b > n) throw std::invalid_argument("minibatch_partition: bad batch count");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    if (b > 1) {
        std::mt19937_64 rng(seed);
        std::shuffle(perm.begin(), perm.end(), rng);
    }
    std::vector<std::vector<int>> batches(b);
    for (int i = 0; i < n; ++i) batches[i % b].push_back(perm[i]);
    for (auto& batch : batches) std::sort(batch.begin(), batch.end());
    return batches;
}

TransformModel learn_online(const LabeledDataset& data, const LearnConfig& cfg) {
    cfg.validate(data.dim(), data.size());
    const int B = cfg.minibatches;
    const int d = data.dim();
    const int r = cfg.out_dim == 0 ? d : cfg.out_dim;
    auto batches = minibatch_partition(data.size(), B, derive_seed(cfg.seed, 777));

    if (cfg.online_summed) {
        Matrix T = Matrix::Identity(r, d);
        TransformModel model;
        model.kind = TransformKind::Global;
        model.config = cfg;
        model.objective_trace.push_back(objective_nuclear(T, data));
        std::vector<LabeledDataset> sub;
        sub.reserve(B);
        for (const auto& idx : batches) sub.push_back(subset_dataset(data, idx));
        for (int t = 0; t < cfg.iterations; ++t) {
            Matrix step = Matrix::Zero(r, d);
            for (int b = 0; b < B; ++b)
                step += subgradient_step_matrix(T, sub[b], cfg.delta_rel,
                                                derive_seed(cfg.seed, t));
            T -= cfg.step_size * step;
            check_iterate(T, t);
            T = project_spectral(T, cfg.gamma);
            model.objective_trace.push_back(objective_nuclear(T, data));
        }
        model.transforms.push_back(std::move(T));
        return model;
    }

    // sequential per-batch learning with warm restart
    TransformModel model;
    model.kind = TransformKind::Global;
    model.config = cfg;
    Matrix T = Matrix::Identity(r, d);
    for (int b = 0; b < B; ++b) {
        LabeledDataset sub = subset_dataset(data, batches[b]);
        LearnConfig batch_cfg = cfg;
        batch_cfg.minibatches = 1;
        TransformModel phase = learn_global(sub, batch_cfg, &T);
        T = phase.global();
        model.objective_trace.insert(model.objective_trace.end(),
                                     phase.objective_trace.begin(),
                                     phase.objective_trace.end());
    }
    model.transforms.push_back(std::move(T));
    return model;
}

Matrix apply_transform(const TransformModel& model, const Matrix& Y, int class_id) {
    if (model.kind == TransformKind::PerClass) {
        if (class_id < 0 || class_id >= static_cast<int>(model.transforms.size()))
            throw std::invalid_argument("apply_transform: class_id required for per-class model");
        return model.transforms[class_id] * Y;
    }
    return model.global() * Y;
}

} // namespace lrt
