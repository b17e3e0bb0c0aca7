#include <Eigen/Eigenvalues>
#include <cmath>

#include "semeq/errors.hpp"
#include "semeq/partition.hpp"

namespace semeq {

PcaProjection pca_project(const std::vector<Eigen::VectorXd>& points) {
  if (points.size() < 3) throw UsageError("pca_project: need at least 3 points");
  const Eigen::Index dim = points[0].size();
  if (dim < 2) throw UsageError("pca_project: points must have dimension >= 2");
  for (const auto& p : points) {
    if (p.size() != dim) throw UsageError("pca_project: mixed point dimensions");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(n);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& p : points) {
    const Eigen::VectorXd d = p - mean;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);

  PcaProjection out;
  out.eigenvalues = solver.eigenvalues().reverse();  // descending
  out.directions.resize(dim, 2);
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd direction = solver.eigenvectors().col(dim - 1 - c);
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (std::abs(direction(i)) > 1e-12) {
        if (direction(i) < 0.0) direction = -direction;
        break;
      }
    }
    out.directions.col(c) = direction;
  }

  out.coords.reserve(points.size());
  for (const auto& p : points) {
    const Eigen::VectorXd d = p - mean;
    out.coords.emplace_back(out.directions.col(0).dot(d), out.directions.col(1).dot(d));
  }

  const double total = out.eigenvalues.sum();
  out.explained_fraction =
      total > 0.0 ? (out.eigenvalues(0) + out.eigenvalues(1)) / total : 0.0;
  return out;
}

}  // namespace semeq
