// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lrt/classify.hpp"
#include "lrt/cluster.hpp"
#include "lrt/data_io.hpp"
#include "lrt/matrix_core.hpp"
#include "lrt/robust_decomp.hpp"
#include "lrt/transform_learn.hpp"
#include "test_helpers.hpp"

using namespace lrt;
using lrt::testing::line_clouds;
using lrt::testing::random_matrix;
using lrt::testing::random_orthonormal;
using lrt::testing::two_lines;

namespace {

int failures = 0;

void report(int idx, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d %-28s %s\n", ok ? "PASS" : "FAIL", idx, name,
                detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

Matrix concat(const Matrix& A, const Matrix& B) {
    Matrix M(A.rows(), A.cols() + B.cols());
    M << A, B;
    return M;
}

// --- criterion 1: norm concatenation theorem suite ------------------------

void criterion_1() {
    std::mt19937_64 rng(1001);
    double worst_ineq = -1e30, worst_eq = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        int m = 2 + static_cast<int>(rng() % 19);   // <= 20 rows
        int n1 = 1 + static_cast<int>(rng() % 15);  // <= 30 total cols
        int n2 = 1 + static_cast<int>(rng() % 15);
        Matrix A = random_matrix(m, n1, rng());
        Matrix B = random_matrix(m, n2, rng());
        Matrix AB = concat(A, B);

        worst_ineq = std::max(worst_ineq,
                              nuclear_norm(AB) - nuclear_norm(A) - nuclear_norm(B));
        worst_ineq = std::max(worst_ineq,
                              spectral_norm(AB) - spectral_norm(A) - spectral_norm(B));
        worst_ineq = std::max(
            worst_ineq, frobenius_norm(AB) - frobenius_norm(A) - frobenius_norm(B));

        // orthogonal column spaces: disjoint slices of one orthonormal frame
        int k1 = 1 + static_cast<int>(rng() % 4);
        int k2 = 1 + static_cast<int>(rng() % 4);
        int rows = k1 + k2 + static_cast<int>(rng() % 5);
        Matrix Q = random_orthonormal(rows, k1 + k2, rng());
        Matrix Ao = Q.leftCols(k1) * random_matrix(k1, 1 + rng() % 8, rng());
        Matrix Bo = Q.rightCols(k2) * random_matrix(k2, 1 + rng() % 8, rng());
        worst_eq = std::max(worst_eq,
                            std::abs(nuclear_norm(concat(Ao, Bo)) - nuclear_norm(Ao) -
                                     nuclear_norm(Bo)));
    }
    report(1, "theorem suite", worst_ineq <= 1e-8 && worst_eq <= 1e-6,
           "1000 pairs, worst inequality slack " + fmt(worst_ineq) +
               " (tol 1e-8), worst orthogonal-equality gap " + fmt(worst_eq) +
               " (tol 1e-6)");
}

// --- criterion 2: subgradient validity -------------------------------------

void criterion_2() {
    std::mt19937_64 rng(2002);
    double worst_fd = 0, worst_norm = 0;
    const double h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        int m = 3 + static_cast<int>(rng() % 6);
        int n = 3 + static_cast<int>(rng() % 6);
        Matrix A;
        do {  // keep sigma_min away from 0 so the norm is smooth at A
            A = random_matrix(m, n, rng());
        } while (svd(A).singular_values.minCoeff() < 0.3);
        double delta = 1e-6 * spectral_norm(A);
        Matrix G = nuclear_subdifferential(A, delta, rng());
        worst_norm = std::max(worst_norm, spectral_norm(G) - 1.0);
        for (int k = 0; k < 10; ++k) {
            Matrix D = random_matrix(m, n, rng());
            double fd = (nuclear_norm(A + h * D) - nuclear_norm(A - h * D)) / (2 * h);
            worst_fd = std::max(worst_fd, std::abs(fd - (G.array() * D.array()).sum()));
        }
    }
    report(2, "subgradient validity", worst_fd <= 1e-4 && worst_norm <= 1e-8,
           "100 matrices x 10 directions, worst FD mismatch " + fmt(worst_fd) +
               " (tol 1e-4), worst ||G||_2 excess " + fmt(worst_norm) + " (tol 1e-8)");
}

// --- criterion 3: angle-growth direction reproduction ----------------------

SubspaceBasis class_line(const Matrix& Y, const LabeledDataset& d, int c) {
    std::vector<int> idx = d.class_indices(c);
    Matrix Yc(Y.rows(), idx.size());
    for (size_t j = 0; j < idx.size(); ++j) Yc.col(j) = Y.col(idx[j]);
    return fit_subspace_basis(Yc, 1);
}

double relative_line_rms(const Matrix& Y, const LabeledDataset& d, int C) {
    double sq = 0;
    for (int c = 0; c < C; ++c) {
        std::vector<int> idx = d.class_indices(c);
        Matrix Yc(Y.rows(), idx.size());
        for (size_t j = 0; j < idx.size(); ++j) Yc.col(j) = Y.col(idx[j]);
        SubspaceBasis b = fit_subspace_basis(Yc, 1);
        sq += (Yc - b.basis * (b.basis.transpose() * Yc)).squaredNorm();
    }
    return std::sqrt(sq) / Y.norm();  // scale-free
}

void criterion_3() {
    bool ok = true;
    std::string detail;
    for (double sigma : {0.0, 0.01}) {
        LabeledDataset d = two_lines(M_PI / 4, 200, sigma, 11);
        LearnConfig cfg;
        cfg.iterations = 300;
        cfg.seed = 11;
        TransformModel m = learn_global(d, cfg);
        Matrix TY = m.global() * d.Y;
        double angle = smallest_principal_angle(class_line(TY, d, 0),
                                                class_line(TY, d, 1));
        double sum_after = 0, sum_base = 0;
        for (int c = 0; c < 2; ++c) {
            std::vector<int> idx = d.class_indices(c);
            Matrix Yc(2, idx.size());
            for (size_t j = 0; j < idx.size(); ++j) Yc.col(j) = d.Y.col(idx[j]);
            sum_after += nuclear_norm(m.global() * Yc);
            sum_base += nuclear_norm(cfg.gamma * Yc);
        }
        ok = ok && angle >= 1.4 && sum_after < sum_base;
        detail += "sigma=" + fmt(sigma) + ": angle " + fmt(angle) +
                  " (>= 1.4), nuclear sum " + fmt(sum_after) + " < baseline " +
                  fmt(sum_base) + "; ";
    }
    // three lines, sigma = 0.1: relative RMS to fitted lines decreases
    std::vector<Vector> dirs = {Vector::Unit(3, 0), Vector::Unit(3, 1),
                                Vector::Unit(3, 2)};
    LabeledDataset d3 = line_clouds(dirs, 200, 0.1, -1.0, 11);
    LearnConfig cfg;
    cfg.iterations = 100;
    cfg.seed = 11;
    TransformModel m = learn_global(d3, cfg);
    double rms_before = relative_line_rms(d3.Y, d3, 3);
    double rms_after = relative_line_rms(m.global() * d3.Y, d3, 3);
    ok = ok && rms_after < rms_before;
    detail += "three-line RMS " + fmt(rms_before) + " -> " + fmt(rms_after);
    report(3, "angle-growth direction", ok, detail);
}

// --- criterion 4: D.C. monotonicity ----------------------------------------

void criterion_4() {
    auto worst_increase = [](const LabeledDataset& d) {
        LearnConfig cfg;
        cfg.iterations = 200;
        cfg.dc_outer_iterations = 10;
        cfg.step_size = 0.0005;  // inner sub-problem run to small step
        cfg.seed = 5;
        TransformModel m = learn_global(d, cfg);
        double worst = -1e30;
        for (int o = 1; o <= 10; ++o)
            worst = std::max(worst, m.objective_trace[o * 200] -
                                        m.objective_trace[(o - 1) * 200]);
        return worst;
    };
    std::vector<Vector> dirs = {Vector::Unit(3, 0), Vector::Unit(3, 1),
                                Vector::Unit(3, 2)};
    double w1 = worst_increase(two_lines(M_PI / 4, 200, 0.0, 11));
    double w2 = worst_increase(two_lines(M_PI / 4, 200, 0.01, 11));
    double w3 = worst_increase(line_clouds(dirs, 200, 0.1, -1.0, 11));
    double worst = std::max({w1, w2, w3});
    report(4, "D.C. monotonicity", worst <= 1e-3,
           "10 outer x 200 inner on three fixtures, worst boundary increase " +
               fmt(worst) + " (tol 1e-3)");
}

// --- criterion 5: RPCA oracle -----------------------------------------------

void criterion_5() {
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        std::mt19937_64 rng(seed);
        Matrix L0 = random_matrix(100, 2, rng()) * random_matrix(2, 100, rng()) / 10.0;
        Matrix S0 = Matrix::Zero(100, 100);
        std::uniform_real_distribution<double> u(0, 1);
        for (int i = 0; i < 100; ++i)
            for (int j = 0; j < 100; ++j)
                if (u(rng) < 0.05) S0(i, j) = u(rng) < 0.5 ? 5.0 : -5.0;
        RpcaResult r = rpca(L0 + S0, 1.0 / std::sqrt(100.0));
        worst = std::max(worst, (r.L - L0).norm() / L0.norm());
    }
    report(5, "RPCA oracle", worst <= 1e-3,
           "10 seeds of 100x100 rank-2 + 5% spikes, worst relative L error " +
               fmt(worst) + " (tol 1e-3)");
}

// --- criterion 6: R-SSC exactness --------------------------------------------

void criterion_6() {
    std::vector<Vector> dirs = {Vector::Unit(3, 0), Vector::Unit(3, 1),
                                Vector::Unit(3, 2)};
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        LabeledDataset d = line_clouds(dirs, 50, 0, 0.2, seed);
        ClusteringResult r = rssc(d.Y, 3, 6, -1, seed);
        worst = std::max(worst, misclassification_rate(r.assignments, d.labels));
    }
    // exact recovery from an already block-diagonal affinity
    Matrix W = Matrix::Zero(60, 60);
    std::vector<int> truth(60);
    int off = 0;
    for (int s : {25, 20, 15}) {
        W.block(off, off, s, s).setOnes();
        for (int i = off; i < off + s; ++i) truth[i] = off >= 45 ? 2 : (off >= 25 ? 1 : 0);
        off += s;
    }
    W.diagonal().setZero();
    double block_err = misclassification_rate(
        spectral_cluster(AffinityMatrix{W}, 3, 99), truth);
    report(6, "R-SSC exactness", worst == 0 && block_err == 0,
           "10 seeds of 3 orthogonal lines (K=6): worst misclassification " +
               fmt(worst) + "; block-affinity recovery error " + fmt(block_err));
}

// --- criterion 7: LRSC improvement -------------------------------------------

void criterion_7() {
    auto run = [](std::function<LabeledDataset(std::uint64_t)> make, int C, int& leq,
                  int& strict) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            LabeledDataset d = make(seed);
            ClustererSpec spec;
            spec.K = 6;
            LearnConfig cfg;
            cfg.iterations = 50;
            cfg.seed = seed;
            LrscResult r = lrsc(d.Y, C, spec, cfg, 8, &d.labels);
            double first = r.clustering.misclassification_trace.front();
            double last = r.clustering.misclassification_trace.back();
            if (last <= first) ++leq;
            if (last < first) ++strict;
        }
    };
    int leq_a = 0, strict_a = 0, leq_b = 0, strict_b = 0;
    run(
        [](std::uint64_t s) {
            std::vector<Vector> dirs = {
                (Vector(2) << 1, 0).finished(),
                (Vector(2) << std::cos(M_PI / 4), std::sin(M_PI / 4)).finished()};
            return line_clouds(dirs, 100, 0.05, 0.2, s);
        },
        2, leq_a, strict_a);
    run(
        [](std::uint64_t s) {
            // 5 lines in R^10, pairwise angle arccos(cos^2 0.35) ~ 0.49 <= pi/6
            std::vector<Vector> dirs;
            for (int i = 1; i <= 5; ++i) {
                Vector u = Vector::Zero(10);
                u(0) = std::cos(0.35);
                u(i) = std::sin(0.35);
                dirs.push_back(u);
            }
            return line_clouds(dirs, 50, 0.01, 0.2, s);
        },
        5, leq_b, strict_b);
    report(7, "LRSC improvement", leq_a == 10 && leq_b == 10 && strict_a >= 7 &&
                                      strict_b >= 7,
           "pi/4 two-line: <= on " + fmt(leq_a) + "/10, strict on " + fmt(strict_a) +
               "/10; 5-subspace R^10: <= on " + fmt(leq_b) + "/10, strict on " +
               fmt(strict_b) + "/10 (need 10 and >= 7)");
}

// --- criterion 8: classification direction -----------------------------------

void criterion_8() {
    int ok_seeds = 0;
    double worst_gap = 1e30;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Matrix Q = random_orthonormal(6, 6, seed * 31 + 5);
        std::vector<Matrix> bases = {Q.middleCols(0, 2), Q.middleCols(2, 2),
                                     Q.middleCols(4, 2)};
        SyntheticData fx = generate_from_bases(bases, 40, 0.05, 0, seed);
        auto [train, test] = split_dataset(fx.data, 0.5, seed);

        LearnConfig cfg;
        cfg.seed = seed;
        TransformModel learned = learn_global(train, cfg);
        TransformModel ident;
        ident.kind = TransformKind::Global;
        ident.transforms.push_back(Matrix::Identity(6, 6));

        double acc_lrt = evaluate_accuracy(
            train_classifier(train, learned, ClassifyMode::OmpReconstruction, 2), test);
        double acc_nn = evaluate_accuracy(
            train_classifier(train, ident, ClassifyMode::NearestNeighbor), test);
        if (acc_lrt >= acc_nn) ++ok_seeds;
        worst_gap = std::min(worst_gap, acc_lrt - acc_nn);
    }
    report(8, "classification direction", ok_seeds == 10,
           "LRT+OMP >= raw NN on " + fmt(ok_seeds) + "/10 seeds, worst margin " +
               fmt(worst_gap));
}

// --- criterion 9: online/batch agreement -------------------------------------

void criterion_9() {
    LabeledDataset d = two_lines(M_PI / 4, 200, 0.01, 42);
    LearnConfig cfg;
    cfg.seed = 42;
    TransformModel batch = learn_global(d, cfg);
    LearnConfig ocfg = cfg;
    ocfg.minibatches = 5;
    TransformModel online = learn_online(d, ocfg);
    double fb = objective_nuclear(batch.global(), d);
    double fo = objective_nuclear(online.global(), d);
    double rel = std::abs(fo - fb) / std::max(fb, 1e-12);
    report(9, "online/batch agreement", rel <= 0.10,
           "B=5 sequential: batch objective " + fmt(fb) + ", online " + fmt(fo) +
               ", relative gap " + fmt(rel) + " (tol 0.10)");
}

// --- criterion 10: determinism ------------------------------------------------

std::string pipeline_csv(std::uint64_t root_seed) {
    // representative run: synth -> learn (trace) -> cluster -> angles
    std::vector<Vector> dirs = {Vector::Unit(3, 0), Vector::Unit(3, 1),
                                Vector::Unit(3, 2)};
    LabeledDataset d = line_clouds(dirs, 50, 0.02, 0.2, root_seed);
    LearnConfig cfg;
    cfg.iterations = 40;
    cfg.seed = root_seed;
    TransformModel m = learn_global(d, cfg);
    ClusteringResult r = rssc(m.global() * d.Y, 3, 6, -1, derive_seed(root_seed, 1));

    std::ostringstream out;
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    out << "iteration,objective\n";
    for (size_t i = 0; i < m.objective_trace.size(); ++i) {
        out << i << ",";
        put(m.objective_trace[i]);
        out << "\n";
    }
    out << "point,assignment\n";
    for (size_t i = 0; i < r.assignments.size(); ++i)
        out << i << "," << r.assignments[i] << "\n";
    out << "pair,angle\n";
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            out << a << b << ",";
            put(smallest_principal_angle(class_line(d.Y, d, a), class_line(d.Y, d, b)));
            out << "\n";
        }
    return out.str();
}

void criterion_10() {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "lrt_acceptance_determinism";
    fs::create_directories(dir);
    std::string run1 = pipeline_csv(42);
    std::string run2 = pipeline_csv(42);
    atomic_write((dir / "run1.csv").string(), run1);
    atomic_write((dir / "run2.csv").string(), run2);
    std::ifstream f1(dir / "run1.csv", std::ios::binary), f2(dir / "run2.csv",
                                                             std::ios::binary);
    std::string b1((std::istreambuf_iterator<char>(f1)), {});
    std::string b2((std::istreambuf_iterator<char>(f2)), {});
    fs::remove_all(dir);
    report(10, "determinism", !b1.empty() && b1 == b2,
           "repeated root-seed-42 pipeline CSVs are byte-identical (" +
               fmt(static_cast<double>(b1.size())) + " bytes)");
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all 10 acceptance criteria passed\n");
    return 0;
}
