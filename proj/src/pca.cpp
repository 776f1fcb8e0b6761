#include <Eigen/Eigenvalues>

#include "dpsn/error.hpp"
#include "dpsn/features.hpp"

namespace dpsn {

Eigen::MatrixXd PcaModel::transform(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != mean.size()) throw Error("PCA input dimension mismatch");
  return (rows.rowwise() - mean) * components.transpose();
}

Eigen::MatrixXd PcaModel::reconstruct(const Eigen::MatrixXd& projected) const {
  return (projected * components).rowwise() + mean;
}

PcaModel fit_pca(const Eigen::MatrixXd& rows, double retain) {
  const Eigen::Index i = rows.rows();
  if (i < 2) throw PreconditionError("PCA needs at least 2 rows");
  if (!(retain > 0.0 && retain <= 1.0)) throw PreconditionError("retain must be in (0, 1]");

  PcaModel model;
  model.mean = rows.colwise().mean();
  const Eigen::MatrixXd centred = rows.rowwise() - model.mean;

  // Eigen-decompose the i x i Gram matrix; feature dimensions are usually
  // far larger than the number of domains.
  Eigen::MatrixXd gram = centred * centred.transpose();
  gram = 0.5 * (gram + gram.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) throw Error("PCA eigen-decomposition failed");

  const Eigen::VectorXd values = solver.eigenvalues();  // ascending
  const double trace = gram.trace();
  if (!(trace > 0.0)) throw Error("PCA: zero total variance");
  model.total_variance = trace / static_cast<double>(i - 1);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = values.size() - 1; k >= 0; --k)
    if (values[k] > 1e-12 * trace) keep.push_back(k);
  double nonzero = 0.0;
  for (auto k : keep) nonzero += values[k];

  const Eigen::Index dim = rows.cols();
  model.explained_ratio.resize(static_cast<Eigen::Index>(keep.size()));
  Eigen::MatrixXd all(static_cast<Eigen::Index>(keep.size()), dim);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const Eigen::Index k = keep[r];
    model.explained_ratio[r] = values[k] / nonzero;
    Eigen::VectorXd v = centred.transpose() * solver.eigenvectors().col(k) / std::sqrt(values[k]);
    v.normalize();
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    all.row(r) = v.transpose();
  }

  double cumulative = 0.0;
  int d = 0;
  while (d < static_cast<int>(keep.size())) {
    cumulative += model.explained_ratio[d];
    ++d;
    if (cumulative >= retain - 1e-12) break;
  }
  model.d = d;
  model.components = all.topRows(d);
  return model;
}

}  // namespace dpsn
