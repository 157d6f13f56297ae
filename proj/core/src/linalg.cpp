#include "tsg/linalg.hpp"

#include <stdexcept>

namespace tsg {

bool is_symmetric(const Eigen::MatrixXd& a, double tol) {
  if (a.rows() != a.cols()) return false;
  double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

double min_eigenvalue(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a) {
  if (!is_symmetric(a)) throw std::invalid_argument("psd_sqrt: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::VectorXd ev = es.eigenvalues();
  double rho = std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  // Eigenvalues slightly negative from rounding are clipped; genuinely
  // indefinite inputs are rejected.
  if (ev.minCoeff() < -1e-10 * std::max(rho, 1.0))
    throw std::invalid_argument("psd_sqrt: matrix not positive semidefinite");
  Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace tsg
