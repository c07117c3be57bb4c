#pragma once

#include <Eigen/Dense>

namespace dsfa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Per-pixel change map, true = changed.
using BinaryMask = Eigen::Array<bool, Eigen::Dynamic, 1>;

}  // namespace dsfa
