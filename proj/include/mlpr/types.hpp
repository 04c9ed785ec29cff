#pragma once

#include <Eigen/Core>

namespace mlpr {

/// Number of per-edge features (f1..f6).
inline constexpr int kFeatureCount = 6;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One row per edge, columns f1..f6. Row-major so a feature row is contiguous.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, kFeatureCount, Eigen::RowMajor>;
using FeatureVector = Eigen::Matrix<double, kFeatureCount, 1>;

} // namespace mlpr
