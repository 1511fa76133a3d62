#include "lrt/cluster.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "lrt/matrix_core.hpp"
#include "lrt/robust_decomp.hpp"

namespace lrt {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

Vector lle_code(const Vector& point, const Matrix& neighbors) {
    const int K = static_cast<int>(neighbors.cols());
    if (K < 1) throw std::invalid_argument("lle_code: need at least one neighbor");
    if (neighbors.rows() != point.size())
        throw std::invalid_argument("lle_code: dimension mismatch");

    Matrix centered = neighbors.colwise() - point;
    Matrix gram = centered.transpose() * centered;  // K x K

    Vector eig = Eigen::SelfAdjointEigenSolver<Matrix>(gram).eigenvalues();
    double emax = eig(K - 1), emin = eig(0);
    if (emin <= 0 || emax / emin > 1e10) {
        double eps = 1e-3 * gram.trace() / K;
        if (eps <= 0) eps = 1e-12;
        gram += eps * Matrix::Identity(K, K);
    }

    Vector w = gram.ldlt().solve(Vector::Ones(K));
    double sum = w.sum();
    if (std::abs(sum) < 1e-12)
        throw std::runtime_error("lle_code: degenerate geometry, weights sum to zero");
    return w / sum;
}

Matrix rssc_coding_matrix(const Matrix& TY, int K, double beta) {
    const int N = static_cast<int>(TY.cols());
    if (K < 1 || K >= N) throw std::invalid_argument("rssc: K must satisfy 1 <= K < N");

    Matrix L = rpca(TY, beta).L;
    Matrix X = Matrix::Zero(N, N);
    std::vector<std::pair<double, int>> dist(N);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j)
            dist[j] = {(L.col(j) - TY.col(i)).norm(), j};
        dist[i] = {std::numeric_limits<double>::infinity(), i};  // exclude self
        std::partial_sort(dist.begin(), dist.begin() + K, dist.end());

        Matrix neighbors(TY.rows(), K);
        for (int k = 0; k < K; ++k) neighbors.col(k) = L.col(dist[k].second);
        Vector w = lle_code(TY.col(i), neighbors);
        for (int k = 0; k < K; ++k) X(i, dist[k].second) = w(k);
    }
    return X;
}

AffinityMatrix rssc_affinity(const Matrix& TY, int K, double beta) {
    Matrix X = rssc_coding_matrix(TY, K, beta);
    Matrix W = X.cwiseAbs() + X.transpose().cwiseAbs();
    W.diagonal().setZero();
    return AffinityMatrix{std::move(W)};
}

std::vector<int> kmeans(const Matrix& points, int k, std::uint64_t seed,
                        int restarts, int max_iter) {
    const int n = static_cast<int>(points.rows());
    if (k < 1 || k > n) throw std::invalid_argument("kmeans: k out of range");

    std::vector<int> best_labels(n, 0);
    double best_inertia = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < restarts; ++restart) {
        std::mt19937_64 rng(derive_seed(seed, restart));

        // k-means++ seeding
        Matrix centers(k, points.cols());
        Vector d2 = Vector::Constant(n, std::numeric_limits<double>::infinity());
        int first = static_cast<int>(uniform01(rng) * n);
        if (first >= n) first = n - 1;
        centers.row(0) = points.row(first);
        for (int c = 1; c < k; ++c) {
            for (int i = 0; i < n; ++i)
                d2(i) = std::min(d2(i), (points.row(i) - centers.row(c - 1)).squaredNorm());
            double total = d2.sum();
            int pick = 0;
            if (total > 0) {
                double target = uniform01(rng) * total, acc = 0;
                for (int i = 0; i < n; ++i) {
                    acc += d2(i);
                    if (acc >= target) { pick = i; break; }
                }
            } else {
                pick = static_cast<int>(uniform01(rng) * n) % n;
            }
            centers.row(c) = points.row(pick);
        }

        std::vector<int> labels(n, -1);
        double inertia = 0;
        for (int it = 0; it < max_iter; ++it) {
            bool changed = false;
            inertia = 0;
            for (int i = 0; i < n; ++i) {
                int arg = 0;
                double best = (points.row(i) - centers.row(0)).squaredNorm();
                for (int c = 1; c < k; ++c) {
                    double d = (points.row(i) - centers.row(c)).squaredNorm();
                    if (d < best) { best = d; arg = c; }
                }
                if (labels[i] != arg) { labels[i] = arg; changed = true; }
                inertia += best;
            }
            if (!changed && it > 0) break;

            Matrix sums = Matrix::Zero(k, points.cols());
            std::vector<int> counts(k, 0);
            for (int i = 0; i < n; ++i) {
                sums.row(labels[i]) += points.row(i);
                ++counts[labels[i]];
            }
            for (int c = 0; c < k; ++c) {
                if (counts[c] > 0) {
                    centers.row(c) = sums.row(c) / counts[c];
                } else {
                    // re-seed an empty cluster at the point farthest from its center
                    int far = 0;
                    double far_d = -1;
                    for (int i = 0; i < n; ++i) {
                        double d = (points.row(i) - centers.row(labels[i])).squaredNorm();
                        if (d > far_d) { far_d = d; far = i; }
                    }
                    centers.row(c) = points.row(far);
                }
            }
        }
        if (inertia < best_inertia) {
            best_inertia = inertia;
            best_labels = labels;
        }
    }
    return best_labels;
}

std::vector<int> spectral_cluster(const AffinityMatrix& affinity, int C,
                                  std::uint64_t seed) {
    const Matrix& W = affinity.W;
    const int N = static_cast<int>(W.rows());
    if (C < 1 || C > N) throw std::invalid_argument("spectral_cluster: C out of range");
    if (C == 1) return std::vector<int>(N, 0);

    Vector deg = W.rowwise().sum();
    Vector dinv_sqrt(N);
    for (int i = 0; i < N; ++i)
        dinv_sqrt(i) = 1.0 / std::sqrt(std::max(deg(i), 1e-12));

    Matrix lsym = Matrix::Identity(N, N) -
                  dinv_sqrt.asDiagonal() * W * dinv_sqrt.asDiagonal();
    lsym = 0.5 * (lsym + lsym.transpose());  // enforce exact symmetry

    Eigen::SelfAdjointEigenSolver<Matrix> solver(lsym);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("spectral_cluster: eigensolver failed");
    Matrix embedding = solver.eigenvectors().leftCols(C);  // smallest eigenvalues

    for (int i = 0; i < N; ++i) {
        double norm = embedding.row(i).norm();
        if (norm > 0) embedding.row(i) /= norm;
    }
    return kmeans(embedding, C, seed);
}

ClusteringResult rssc(const Matrix& TY, int C, int K, double beta,
                      std::uint64_t seed) {
    ClusteringResult result;
    result.num_clusters = C;
    if (C == 1) {
        result.assignments.assign(TY.cols(), 0);
    } else {
        AffinityMatrix W = rssc_affinity(TY, K, beta);
        result.assignments = spectral_cluster(W, C, seed);
    }
    result.per_cluster_nuclear_norms.assign(C, 0.0);
    for (int c = 0; c < C; ++c) {
        std::vector<int> idx;
        for (int i = 0; i < static_cast<int>(result.assignments.size()); ++i)
            if (result.assignments[i] == c) idx.push_back(i);
        if (idx.empty()) {
            result.empty_clusters.push_back(c);
            continue;
        }
        Matrix Yc(TY.rows(), idx.size());
        for (size_t j = 0; j < idx.size(); ++j) Yc.col(j) = TY.col(idx[j]);
        result.per_cluster_nuclear_norms[c] = nuclear_norm(Yc);
    }
    return result;
}

namespace {

std::vector<int> hungarian_min(const Matrix& cost) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) { minv[j] = cur; way[j] = j0; }
                if (minv[j] < delta) { delta = minv[j]; j1 = j; }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) { u[p[j]] += delta; v[j] -= delta; }
                else minv[j] -= delta;
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> match(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) match[p[j] - 1] = j - 1;
    return match;
}

} // namespace

std::vector<int> max_weight_assignment(const Matrix& weights) {
    if (weights.rows() != weights.cols())
        throw std::invalid_argument("max_weight_assignment: matrix must be square");
    double top = weights.maxCoeff();
    Matrix cost = Matrix::Constant(weights.rows(), weights.cols(), top) - weights;
    return hungarian_min(cost);
}

double misclassification_rate(const std::vector<int>& predicted,
                              const std::vector<int>& truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("misclassification_rate: length mismatch");
    const int N = static_cast<int>(predicted.size());
    if (N == 0) return 0;
    int C = 1;
    for (int i = 0; i < N; ++i) C = std::max({C, predicted[i] + 1, truth[i] + 1});
    Matrix confusion = Matrix::Zero(C, C);
    for (int i = 0; i < N; ++i) confusion(predicted[i], truth[i]) += 1;
    std::vector<int> match = max_weight_assignment(confusion);
    double correct = 0;
    for (int r = 0; r < C; ++r) correct += confusion(r, match[r]);
    return 1.0 - correct / N;
}

double lrsc_objective(const Matrix& T, const std::vector<int>& assignments,
                      const Matrix& Y, double lambda) {
    const int N = static_cast<int>(Y.cols());
    if (static_cast<int>(assignments.size()) != N)
        throw std::invalid_argument("lrsc_objective: assignment length mismatch");
    int C = 1;
    for (int a : assignments) C = std::max(C, a + 1);

    Matrix TY = T * Y;
    double fit = 0, norms = 0;
    for (int c = 0; c < C; ++c) {
        std::vector<int> idx;
        for (int i = 0; i < N; ++i)
            if (assignments[i] == c) idx.push_back(i);
        if (idx.empty()) continue;
        Matrix TYc(TY.rows(), idx.size());
        for (size_t j = 0; j < idx.size(); ++j) TYc.col(j) = TY.col(idx[j]);
        SvdFactors f = svd(TYc);
        double cut = 1e-8 * f.singular_values(0);
        int r = 0;
        for (int i = 0; i < f.singular_values.size(); ++i)
            if (f.singular_values(i) > cut) ++r;
        if (r > 0) {
            Matrix basis = f.U.leftCols(r);
            Matrix residual = TYc - basis * (basis.transpose() * TYc);
            fit += residual.squaredNorm();
        } else {
            fit += TYc.squaredNorm();
        }
        norms += f.singular_values.sum();
    }
    return fit + lambda * (norms - nuclear_norm(TY));
}

LrscResult lrsc(const Matrix& Y, int C, const ClustererSpec& clusterer,
                const LearnConfig& learn_cfg, int max_outer,
                const std::vector<int>* ground_truth, bool warm_restart) {
    if (max_outer < 1) throw std::invalid_argument("lrsc: max_outer must be >= 1");
    const int d = static_cast<int>(Y.rows());
    const int r = learn_cfg.out_dim == 0 ? d : learn_cfg.out_dim;

    auto assign = [&](const Matrix& TY, std::uint64_t seed) {
        if (clusterer.custom) return clusterer.custom(TY, C, seed);
        return rssc(TY, C, clusterer.K, clusterer.beta, seed).assignments;
    };
    auto has_empty = [&](const std::vector<int>& a) {
        std::vector<char> seen(C, 0);
        for (int l : a) seen[l] = 1;
        for (int c = 0; c < C; ++c)
            if (!seen[c]) return true;
        return false;
    };

    Matrix T = Matrix::Identity(r, d);
    TransformModel model;
    model.kind = TransformKind::Global;
    model.config = learn_cfg;
    model.transforms.push_back(T);

    ClusteringResult result;
    result.num_clusters = C;
    std::vector<int> prev;

    for (int outer = 0; outer < max_outer; ++outer) {
        // constant across outer iterations so an unchanged TY clustering is a
        // literal fixed point of the assignment vector
        std::uint64_t outer_seed = derive_seed(learn_cfg.seed, 5000);
        Matrix TY = T * Y;
        std::vector<int> assignments = assign(TY, outer_seed);
        if (has_empty(assignments))
            assignments = assign(TY, derive_seed(outer_seed, 1));  // re-seed once

        result.outer_iterations = outer + 1;
        result.objective_trace.push_back(
            lrsc_objective(T, assignments, Y, learn_cfg.lambda));
        if (ground_truth)
            result.misclassification_trace.push_back(
                misclassification_rate(assignments, *ground_truth));

        result.assignments = assignments;
        if (!prev.empty() && assignments == prev) {
            result.converged = true;
            break;
        }
        prev = assignments;
        if (outer + 1 == max_outer) break;

        // relearn T on the induced labels (empty clusters dropped by remap)
        LabeledDataset induced;
        induced.Y = Y;
        induced.labels = assignments;
        std::vector<int> remap(C, -1);
        int next = 0;
        for (int& l : induced.labels) {
            if (remap[l] < 0) remap[l] = next++;
            l = remap[l];
        }
        LearnConfig cfg = learn_cfg;
        cfg.seed = derive_seed(learn_cfg.seed, 6000 + outer);
        model = learn_global(induced, cfg, warm_restart ? &T : nullptr);
        T = model.global();
    }

    // final per-cluster nuclear norms (in the transformed space)
    Matrix TY = T * Y;
    result.per_cluster_nuclear_norms.assign(C, 0.0);
    result.empty_clusters.clear();
    for (int c = 0; c < C; ++c) {
        std::vector<int> idx;
        for (int i = 0; i < static_cast<int>(result.assignments.size()); ++i)
            if (result.assignments[i] == c) idx.push_back(i);
        if (idx.empty()) {
            result.empty_clusters.push_back(c);
            continue;
        }
        Matrix TYc(TY.rows(), idx.size());
        for (size_t j = 0; j < idx.size(); ++j) TYc.col(j) = TY.col(idx[j]);
        result.per_cluster_nuclear_norms[c] = nuclear_norm(TYc);
    }
    return {std::move(result), std::move(model)};
}

} // namespace lrt
