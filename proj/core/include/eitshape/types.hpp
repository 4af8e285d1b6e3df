#pragma once

#include <Eigen/Dense>

namespace eitshape {

using Vec3 = Eigen::Vector3d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace eitshape
