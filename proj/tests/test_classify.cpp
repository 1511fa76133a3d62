#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lrt/classify.hpp"
#include "lrt/data_io.hpp"
#include "test_helpers.hpp"

using namespace lrt;
using lrt::testing::random_matrix;
using lrt::testing::random_orthonormal;

namespace {

TransformModel identity_transform(int d) {
    TransformModel tm;
    tm.kind = TransformKind::Global;
    tm.transforms.push_back(Matrix::Identity(d, d));
    return tm;
}

// C mutually orthogonal k-dim subspaces of R^(C*k)
SyntheticData orthogonal_subspaces(int C, int k, int pts, double sigma,
                                   std::uint64_t seed) {
    Matrix Q = random_orthonormal(C * k, C * k, seed * 31 + 5);
    std::vector<Matrix> bases;
    for (int c = 0; c < C; ++c) bases.push_back(Q.middleCols(c * k, k));
    return generate_from_bases(bases, pts, sigma, 0, seed);
}

} // namespace

TEST_CASE("training points classify back to their own class") {
    SyntheticData fx = orthogonal_subspaces(3, 2, 20, 0, 1);
    ClassifierModel model = train_classifier(
        fx.data, identity_transform(6), ClassifyMode::OmpReconstruction, 4, 1e6);
    CHECK(evaluate_accuracy(model, fx.data) == doctest::Approx(1.0));

    int i = fx.data.class_indices(2)[0];
    auto [label, score] = classify_point(model, fx.data.Y.col(i));
    CHECK(label == 2);
    CHECK(score == doctest::Approx(0).epsilon(1e-8));
}

TEST_CASE("clean low-rank classes give bases close to the transformed data") {
    SyntheticData fx = orthogonal_subspaces(2, 2, 30, 0, 3);
    // beta sized for a 4-row matrix; the 1/sqrt(max(m,n)) default undershoots
    // at this scale and shaves mass off L
    ClassifierModel model = train_classifier(
        fx.data, identity_transform(4), ClassifyMode::OmpReconstruction, 4, 0.5);
    for (int c = 0; c < 2; ++c) {
        Matrix Yc = fx.data.class_matrix(c);
        CHECK((model.class_bases[c] - Yc).norm() / Yc.norm() < 1e-4);
    }
}

TEST_CASE("large beta forces the sparse part to zero exactly") {
    SyntheticData fx = orthogonal_subspaces(2, 2, 15, 0.1, 5);
    ClassifierModel model = train_classifier(
        fx.data, identity_transform(4), ClassifyMode::OmpReconstruction, 4, 1e9);
    for (int c = 0; c < 2; ++c) {
        Matrix Yc = fx.data.class_matrix(c);
        CHECK((model.class_bases[c] - Yc).norm() <= 1e-10 * Yc.norm());
    }
}

TEST_CASE("per-class bases are built from each class's own transform") {
    // class 0 along e1, class 1 along e2, distinct per-class transforms
    LabeledDataset data;
    data.Y.resize(2, 6);
    data.Y << 0.4, 0.9, -0.7, 0, 0, 0,
              0,   0,    0,   0.5, -0.8, 1.0;
    data.labels = {0, 0, 0, 1, 1, 1};

    TransformModel tm;
    tm.kind = TransformKind::PerClass;
    tm.transforms = {Matrix::Identity(2, 2), 3 * Matrix::Identity(2, 2)};

    ClassifierModel model = train_classifier(
        data, tm, ClassifyMode::OmpReconstruction, 2, 1e9);
    CHECK((model.class_bases[0] - data.Y.leftCols(3)).norm() <= 1e-12);
    CHECK((model.class_bases[1] - 3 * data.Y.rightCols(3)).norm() <= 1e-12);

    // the query is scored against L_c with T_c only, never T_c with L_{c'}
    Vector y(2);
    y << 0, 0.33;
    auto [label, score] = classify_point(model, y);
    CHECK(label == 1);
    CHECK(score == doctest::Approx(0).epsilon(1e-10));
}

TEST_CASE("point in the span of exactly one basis goes to that class") {
    ClassifierModel model;
    model.transform = identity_transform(3);
    model.mode = ClassifyMode::OmpReconstruction;
    model.sparsity = 1;
    model.class_bases = {Matrix::Identity(3, 1),
                         (Matrix(3, 1) << 0, 1, 0).finished(),
                         (Matrix(3, 1) << 0, 0, 1).finished()};
    auto [label, score] = classify_point(model, (Vector(3) << 0, 0.7, 0).finished());
    CHECK(label == 1);
    CHECK(score == doctest::Approx(0));
}

TEST_CASE("identical classes tie to the lower id") {
    LabeledDataset data;
    data.Y.resize(2, 4);
    data.Y << 1, 0, 1, 0,
              0, 1, 0, 1;
    data.labels = {0, 0, 1, 1};
    for (ClassifyMode mode :
         {ClassifyMode::OmpReconstruction, ClassifyMode::NearestNeighbor}) {
        ClassifierModel model =
            train_classifier(data, identity_transform(2), mode, 2, 1e9);
        CHECK(classify_point(model, (Vector(2) << 0.6, 0.8).finished()).first == 0);
    }
}

TEST_CASE("residuals are nonnegative and invariant under common rescaling") {
    SyntheticData fx = orthogonal_subspaces(3, 2, 10, 0.05, 7);
    ClassifierModel model = train_classifier(
        fx.data, identity_transform(6), ClassifyMode::OmpReconstruction, 3, 1e9);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0, 1);
    for (int t = 0; t < 10; ++t) {
        Vector y(6);
        for (int i = 0; i < 6; ++i) y(i) = g(rng);
        auto [label, score] = classify_point(model, y);
        CHECK(score >= 0);

        ClassifierModel scaled = model;
        for (Matrix& L : scaled.class_bases) L *= 5.0;
        auto [label5, score5] = classify_point(scaled, (5.0 * y).eval());
        CHECK(label5 == label);
        CHECK(score5 == doctest::Approx(5 * score).epsilon(1e-9));
    }
}

TEST_CASE("nn mode with identity transform is plain 1-NN on raw features") {
    SyntheticData fx = orthogonal_subspaces(3, 2, 12, 0.2, 9);
    ClassifierModel model = train_classifier(
        fx.data, identity_transform(6), ClassifyMode::NearestNeighbor);
    std::mt19937_64 rng(10);
    std::normal_distribution<double> g(0, 1);
    for (int t = 0; t < 20; ++t) {
        Vector y(6);
        for (int i = 0; i < 6; ++i) y(i) = g(rng);
        int nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < fx.data.size(); ++j) {
            double d = (y - fx.data.Y.col(j)).norm();
            if (d < best) {
                best = d;
                nearest = j;
            }
        }
        auto [label, score] = classify_point(model, y);
        CHECK(label == fx.data.labels[nearest]);
        CHECK(score == doctest::Approx(best));
    }
}

TEST_CASE("random balanced labels give chance-level accuracy") {
    double total = 0;
    int trials = 5;
    for (std::uint64_t seed = 1; seed <= static_cast<std::uint64_t>(trials); ++seed) {
        LabeledDataset data;
        data.Y = random_matrix(5, 200, seed * 101);
        data.labels.resize(200);
        for (int i = 0; i < 200; ++i) data.labels[i] = i % 2;
        std::mt19937_64 rng(seed);
        std::shuffle(data.labels.begin(), data.labels.end(), rng);
        auto [train, test] = split_dataset(data, 0.5, seed);
        ClassifierModel model = train_classifier(
            train, identity_transform(5), ClassifyMode::OmpReconstruction, 5);
        total += evaluate_accuracy(model, test);
    }
    double mean = total / trials;
    CHECK(mean > 0.4);
    CHECK(mean < 0.6);
}

TEST_CASE("global transform plus omp is at least as accurate as raw 1-NN") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        SyntheticData fx = orthogonal_subspaces(3, 2, 40, 0.05, seed);
        auto [train, test] = split_dataset(fx.data, 0.5, seed);

        LearnConfig cfg;
        cfg.seed = seed;
        TransformModel learned = learn_global(train, cfg);
        ClassifierModel lrt_omp = train_classifier(
            train, learned, ClassifyMode::OmpReconstruction, 2);
        ClassifierModel raw_nn = train_classifier(
            train, identity_transform(6), ClassifyMode::NearestNeighbor);

        double acc_lrt = evaluate_accuracy(lrt_omp, test);
        double acc_nn = evaluate_accuracy(raw_nn, test);
        CHECK(acc_lrt >= acc_nn);
    }
}

TEST_CASE("training and query validation errors") {
    SyntheticData fx = orthogonal_subspaces(2, 2, 5, 0, 11);
    CHECK_THROWS_AS(train_classifier(fx.data, identity_transform(4),
                                     ClassifyMode::OmpReconstruction, 0),
                    std::invalid_argument);

    LabeledDataset gap = fx.data;
    for (int& l : gap.labels) l = l == 1 ? 2 : 0;  // class 1 empty
    CHECK_THROWS_AS(train_classifier(gap, identity_transform(4),
                                     ClassifyMode::OmpReconstruction, 2),
                    std::invalid_argument);

    ClassifierModel model = train_classifier(
        fx.data, identity_transform(4), ClassifyMode::OmpReconstruction, 2);
    CHECK_THROWS_AS(classify_point(model, Vector::Ones(3)), std::invalid_argument);
    CHECK(evaluate_accuracy(model, LabeledDataset{}) == 0);
}
