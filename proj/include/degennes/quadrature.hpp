#pragma once

#include <Eigen/Dense>

namespace degennes {

/// Legendre–Gauss–Lobatto rule of polynomial degree n on [-1, 1]:
/// n+1 ascending nodes, weights, and the nodal differentiation matrix
/// D(i, j) = l_j'(x_i).
struct LobattoRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
    Eigen::MatrixXd diff;
};

LobattoRule lobatto_rule(int degree);

}  // namespace degennes
