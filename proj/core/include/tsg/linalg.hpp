#pragma once

#include <Eigen/Dense>

namespace tsg {

// Symmetric positive semidefinite square root Q diag(sqrt(max(l,0))) Q^T.
// Throws std::invalid_argument if a is not symmetric.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a);

bool is_symmetric(const Eigen::MatrixXd& a, double tol = 1e-9);

double min_eigenvalue(const Eigen::MatrixXd& a);

}  // namespace tsg
