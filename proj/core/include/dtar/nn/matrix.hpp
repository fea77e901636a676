#pragma once

#include <Eigen/Core>

namespace dtar::nn {

/// Row-major dense matrix of doubles; the storage type behind every tensor.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace dtar::nn
