#include "lrt/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace lrt {

namespace {

constexpr char kMagic[4] = {'L', 'R', 'T', 'M'};

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double parse_number(const std::string& token, int line_no) {
    const char* begin = token.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0'))
        throw std::runtime_error("csv parse error at line " + std::to_string(line_no) +
                                 ": bad number '" + token + "'");
    if (!std::isfinite(v))
        throw std::runtime_error("csv parse error at line " + std::to_string(line_no) +
                                 ": non-finite entry");
    return v;
}

Matrix load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string token;
        while (std::getline(ss, token, ','))
            row.push_back(parse_number(token, line_no));
        if (!rows.empty() && row.size() != rows[0].size())
            throw std::runtime_error("csv parse error at line " + std::to_string(line_no) +
                                     ": inconsistent field count");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("csv parse error: empty file " + path);
    // rows are points; transpose to points-as-columns
    Matrix A(rows[0].size(), rows.size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) A(j, i) = rows[i][j];
    return A;
}

void save_csv(const std::string& path, const Matrix& A) {
    std::ostringstream out;
    char buf[40];
    for (int j = 0; j < A.cols(); ++j) {  // one point per row on disk
        for (int i = 0; i < A.rows(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", A(i, j));
            out << (i ? "," : "") << buf;
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

Matrix load_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("binary parse error: bad magic in " + path);
    std::uint32_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 4);
    in.read(reinterpret_cast<char*>(&cols), 4);
    if (!in || rows == 0 || cols == 0)
        throw std::runtime_error("binary parse error: bad header in " + path);
    const std::streamsize expected =
        static_cast<std::streamsize>(rows) * cols * sizeof(double);
    std::vector<double> payload(static_cast<size_t>(rows) * cols);
    in.read(reinterpret_cast<char*>(payload.data()), expected);
    if (in.gcount() != expected)
        throw std::runtime_error("binary parse error in " + path + ": expected " +
                                 std::to_string(expected) + " payload bytes, got " +
                                 std::to_string(in.gcount()));
    Matrix A(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t j = 0; j < cols; ++j)
            A(i, j) = payload[static_cast<size_t>(i) * cols + j];
    if (!A.allFinite())
        throw std::runtime_error("binary parse error: non-finite entries in " + path);
    return A;
}

void save_binary(const std::string& path, const Matrix& A) {
    std::string out;
    out.append(kMagic, 4);
    std::uint32_t rows = static_cast<std::uint32_t>(A.rows());
    std::uint32_t cols = static_cast<std::uint32_t>(A.cols());
    out.append(reinterpret_cast<const char*>(&rows), 4);
    out.append(reinterpret_cast<const char*>(&cols), 4);
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) {
            double v = A(i, j);
            out.append(reinterpret_cast<const char*>(&v), sizeof(double));
        }
    atomic_write(path, out);
}

} // namespace

void atomic_write(const std::string& path, const std::string& contents) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Matrix load_matrix(const std::string& path, MatrixFormat format) {
    Matrix A = format == MatrixFormat::Csv ? load_csv(path) : load_binary(path);
    check_finite(A, "load_matrix");
    return A;
}

void save_matrix(const std::string& path, const Matrix& A, MatrixFormat format) {
    check_finite(A, "save_matrix");
    if (format == MatrixFormat::Csv)
        save_csv(path, A);
    else
        save_binary(path, A);
}

std::vector<int> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<int> labels;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        size_t pos = 0;
        int v;
        try {
            v = std::stoi(line, &pos);
        } catch (const std::exception&) {
            throw std::runtime_error("labels parse error at line " +
                                     std::to_string(line_no) + ": '" + line + "'");
        }
        while (pos < line.size() && line[pos] == ' ') ++pos;
        if (pos != line.size())
            throw std::runtime_error("labels parse error at line " +
                                     std::to_string(line_no) + ": '" + line + "'");
        labels.push_back(v);
    }
    return labels;
}

void save_labels(const std::string& path, const std::vector<int>& labels) {
    std::ostringstream out;
    for (int l : labels) out << l << '\n';
    atomic_write(path, out.str());
}

LabeledDataset assemble_dataset(Matrix Y, std::vector<int> labels) {
    if (static_cast<int>(labels.size()) != Y.cols())
        throw std::invalid_argument("assemble_dataset: label count " +
                                    std::to_string(labels.size()) + " != columns " +
                                    std::to_string(Y.cols()));
    std::vector<int> ids = labels;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    bool contiguous = ids.front() == 0 && ids.back() == static_cast<int>(ids.size()) - 1;
    if (!contiguous) {
        std::cerr << "warning: remapping non-contiguous class ids to 0.."
                  << ids.size() - 1 << "\n";
        for (int& l : labels)
            l = static_cast<int>(std::lower_bound(ids.begin(), ids.end(), l) - ids.begin());
    }
    return LabeledDataset{std::move(Y), std::move(labels)};
}

void SyntheticSpec::validate() const {
    if (ambient_dim < 1) throw std::invalid_argument("synthetic: ambient_dim must be >= 1");
    if (subspace_dims.empty())
        throw std::invalid_argument("synthetic: need at least one subspace");
    for (int k : subspace_dims)
        if (k < 1 || k > ambient_dim)
            throw std::invalid_argument("synthetic: subspace dim out of range");
    if (!angles.empty()) {
        if (angles.size() != subspace_dims.size())
            throw std::invalid_argument("synthetic: one angle per subspace required");
        if (ambient_dim < 2)
            throw std::invalid_argument("synthetic: angles need ambient_dim >= 2");
        for (int k : subspace_dims)
            if (k != 1)
                throw std::invalid_argument("synthetic: angles only valid for 1-d subspaces");
    }
    if (points_per_subspace < 1)
        throw std::invalid_argument("synthetic: points_per_subspace must be >= 1");
    if (sigma < 0) throw std::invalid_argument("invalid noise sigma");
    if (outlier_fraction < 0 || outlier_fraction >= 1)
        throw std::invalid_argument("synthetic: outlier_fraction must be in [0,1)");
}

SyntheticData generate_from_bases(const std::vector<Matrix>& bases,
                                  int points_per_subspace, double sigma,
                                  double outlier_fraction, std::uint64_t seed) {
    if (bases.empty()) throw std::invalid_argument("generate_from_bases: no bases");
    const int d = static_cast<int>(bases[0].rows());
    const int n = points_per_subspace;
    const int C = static_cast<int>(bases.size());

    SyntheticData out;
    out.data.Y.resize(d, static_cast<Eigen::Index>(C) * n);
    out.data.labels.assign(static_cast<size_t>(C) * n, 0);

    for (int c = 0; c < C; ++c) {
        const Matrix& B = bases[c];
        if (B.rows() != d) throw std::invalid_argument("generate_from_bases: dim mismatch");
        out.bases.push_back(SubspaceBasis{B});
        std::mt19937_64 rng(derive_seed(seed, 100 + c));
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int i = 0; i < n; ++i) {
            Vector coeff(B.cols());
            for (int k = 0; k < coeff.size(); ++k) coeff(k) = 2 * uniform01(rng) - 1;
            Vector x = B * coeff;
            if (sigma > 0)
                for (int k = 0; k < d; ++k) x(k) += sigma * gauss(rng);
            if (outlier_fraction > 0 && uniform01(rng) < outlier_fraction) {
                // uniform in the unit ball
                Vector dir(d);
                for (int k = 0; k < d; ++k) dir(k) = gauss(rng);
                dir.normalize();
                x = std::pow(uniform01(rng), 1.0 / d) * dir;
            }
            out.data.Y.col(static_cast<Eigen::Index>(c) * n + i) = x;
            out.data.labels[static_cast<size_t>(c) * n + i] = c;
        }
    }
    return out;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    const int d = spec.ambient_dim;
    std::vector<Matrix> bases;
    if (!spec.angles.empty()) {
        for (double theta : spec.angles) {
            Vector dir = Vector::Zero(d);
            dir(0) = std::cos(theta);
            dir(1) = std::sin(theta);
            bases.push_back(dir);
        }
    } else {
        for (size_t c = 0; c < spec.subspace_dims.size(); ++c) {
            std::mt19937_64 rng(derive_seed(seed, c));
            std::normal_distribution<double> gauss(0.0, 1.0);
            Matrix G(d, spec.subspace_dims[c]);
            for (int i = 0; i < G.rows(); ++i)
                for (int j = 0; j < G.cols(); ++j) G(i, j) = gauss(rng);
            Eigen::HouseholderQR<Matrix> qr(G);
            bases.push_back(qr.householderQ() *
                            Matrix::Identity(d, spec.subspace_dims[c]));
        }
    }
    return generate_from_bases(bases, spec.points_per_subspace, spec.sigma,
                               spec.outlier_fraction, seed);
}

std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& data,
                                                        double train_fraction,
                                                        std::uint64_t seed) {
    if (train_fraction < 0 || train_fraction > 1)
        throw std::invalid_argument("split_dataset: fraction out of range");
    const int C = data.num_classes();
    std::vector<int> train_idx, test_idx;
    for (int c = 0; c < C; ++c) {
        std::vector<int> idx = data.class_indices(c);
        const int n = static_cast<int>(idx.size());
        int n_train = static_cast<int>(std::lround(train_fraction * n));
        if (train_fraction > 0 && train_fraction < 1 && (n_train == 0 || n_train == n))
            throw std::invalid_argument("split_dataset: class " + std::to_string(c) +
                                        " too small to stratify");
        std::mt19937_64 rng(derive_seed(seed, c));
        std::shuffle(idx.begin(), idx.end(), rng);
        std::sort(idx.begin(), idx.begin() + n_train);
        std::sort(idx.begin() + n_train, idx.end());
        train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + n_train);
        test_idx.insert(test_idx.end(), idx.begin() + n_train, idx.end());
    }
    auto take = [&](const std::vector<int>& idx) {
        LabeledDataset out;
        out.Y.resize(data.Y.rows(), idx.size());
        out.labels.resize(idx.size());
        for (size_t j = 0; j < idx.size(); ++j) {
            out.Y.col(j) = data.Y.col(idx[j]);
            out.labels[j] = data.labels[idx[j]];
        }
        return out;
    };
    return {take(train_idx), take(test_idx)};
}

} // namespace lrt
