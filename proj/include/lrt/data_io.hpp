#ifndef LRT_DATA_IO_HPP
#define LRT_DATA_IO_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lrt/dataset.hpp"
#include "lrt/matrix_core.hpp"

namespace lrt {

enum class MatrixFormat { Csv, Binary };

/// CSV: one data point per row, no header; transposed to points-as-columns
/// on load. Binary: magic "LRTM", u32 rows, u32 cols (little-endian),
/// row-major f64 payload, stored points-as-columns as in memory.
Matrix load_matrix(const std::string& path, MatrixFormat format);
void save_matrix(const std::string& path, const Matrix& A, MatrixFormat format);

std::vector<int> load_labels(const std::string& path);
void save_labels(const std::string& path, const std::vector<int>& labels);

/// Validates label count and remaps ids to contiguous 0-based if needed
/// (with a warning on stderr).
LabeledDataset assemble_dataset(Matrix Y, std::vector<int> labels);

struct SyntheticSpec {
    int ambient_dim = 2;
    std::vector<int> subspace_dims;   // k_c per subspace
    std::vector<double> angles;       // line angles in the (e1,e2) plane; empty = random bases
    int points_per_subspace = 200;
    double sigma = 0;                 // Gaussian noise std dev
    double outlier_fraction = 0;

    void validate() const;
};

struct SyntheticData {
    LabeledDataset data;
    std::vector<SubspaceBasis> bases;  // ground truth
};

SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

/// Sample points on explicitly given orthonormal bases (columns), with
/// uniform [-1,1] coefficients, Gaussian noise and optional outliers.
SyntheticData generate_from_bases(const std::vector<Matrix>& bases,
                                  int points_per_subspace, double sigma,
                                  double outlier_fraction, std::uint64_t seed);

/// Stratified, seeded, disjoint and exhaustive per-class split.
std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& data,
                                                        double train_fraction,
                                                        std::uint64_t seed);

/// Write a file atomically (temp + rename).
void atomic_write(const std::string& path, const std::string& contents);

} // namespace lrt

#endif
