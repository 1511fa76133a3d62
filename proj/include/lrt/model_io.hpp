#ifndef LRT_MODEL_IO_HPP
#define LRT_MODEL_IO_HPP

#include <string>

#include "lrt/classify.hpp"
#include "lrt/transform_learn.hpp"

namespace lrt {

/// Transform models persist as a JSON manifest at `path` plus one binary
/// matrix file per transform next to it (path + ".T<c>.bin").
void save_model(const std::string& path, const TransformModel& model);
TransformModel load_model(const std::string& path);

} // namespace lrt

#endif
