#pragma once

#include <Eigen/Dense>

namespace sdstein {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A Monte Carlo estimate together with its standard error.
struct ValueWithError {
  double value = 0.0;
  double se = 0.0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace sdstein
