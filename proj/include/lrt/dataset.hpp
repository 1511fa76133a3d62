#ifndef LRT_DATASET_HPP
#define LRT_DATASET_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace lrt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Points stored as columns of Y; labels[i] is the class of column i.
/// Class ids are 0-based and contiguous.
struct LabeledDataset {
    Matrix Y;
    std::vector<int> labels;

    int dim() const { return static_cast<int>(Y.rows()); }
    int size() const { return static_cast<int>(Y.cols()); }

    int num_classes() const {
        int c = 0;
        for (int l : labels) c = std::max(c, l + 1);
        return c;
    }

    std::vector<int> class_indices(int c) const {
        std::vector<int> idx;
        for (int i = 0; i < static_cast<int>(labels.size()); ++i)
            if (labels[i] == c) idx.push_back(i);
        return idx;
    }

    Matrix class_matrix(int c) const {
        std::vector<int> idx = class_indices(c);
        Matrix Yc(Y.rows(), idx.size());
        for (size_t j = 0; j < idx.size(); ++j) Yc.col(j) = Y.col(idx[j]);
        return Yc;
    }

    /// All columns not belonging to class c.
    Matrix complement_matrix(int c) const {
        std::vector<int> idx;
        for (int i = 0; i < static_cast<int>(labels.size()); ++i)
            if (labels[i] != c) idx.push_back(i);
        Matrix Yn(Y.rows(), idx.size());
        for (size_t j = 0; j < idx.size(); ++j) Yn.col(j) = Y.col(idx[j]);
        return Yn;
    }
};

/// splitmix64 mix; used to derive independent child seeds from one root seed.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t offset) {
    std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (offset + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace lrt

#endif
