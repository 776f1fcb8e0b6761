#include <algorithm>
#include <numeric>

#include "dpsn/error.hpp"
#include "dpsn/features.hpp"

namespace dpsn {
namespace {

Eigen::VectorXd average_ranks(const Eigen::VectorXd& column) {
  const Eigen::Index n = column.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return column[a] < column[b]; });
  Eigen::VectorXd ranks(n);
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j + 1 < n && column[order[j + 1]] == column[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::string to_string(CorrelationKind kind) { return kind == CorrelationKind::kSpearman ? "spearman" : "pearson"; }

CorrelationKind parse_correlation_kind(const std::string& name) {
  if (name == "spearman") return CorrelationKind::kSpearman;
  if (name == "pearson") return CorrelationKind::kPearson;
  throw Error("unknown correlation kind: " + name);
}

Eigen::MatrixXd compute_gcm(const Eigen::MatrixXd& matrix, CorrelationKind kind) {
  const Eigen::Index n = matrix.rows();
  const Eigen::Index c = matrix.cols();
  if (n < 2) throw PreconditionError("GCM needs at least 2 rows");

  Eigen::MatrixXd z(n, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    const Eigen::VectorXd col = matrix.col(j);
    const bool constant = (col.array() == col[0]).all();
    if (constant) {
      z.col(j).setZero();
      continue;
    }
    Eigen::VectorXd v = kind == CorrelationKind::kSpearman ? average_ranks(col) : col;
    v.array() -= v.mean();
    z.col(j) = v / v.norm();
  }

  Eigen::MatrixXd gcm(c, c);
  for (Eigen::Index a = 0; a < c; ++a) {
    gcm(a, a) = 1.0;
    for (Eigen::Index b = a + 1; b < c; ++b) {
      const double r = std::clamp(z.col(a).dot(z.col(b)), -1.0, 1.0);
      gcm(a, b) = r;
      gcm(b, a) = r;
    }
  }
  return gcm;
}

Eigen::VectorXd flatten_upper(const Eigen::MatrixXd& gcm) {
  const Eigen::Index c = gcm.rows();
  Eigen::VectorXd out(c * (c - 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index a = 0; a < c; ++a)
    for (Eigen::Index b = a + 1; b < c; ++b) out[k++] = gcm(a, b);
  return out;
}

}  // namespace dpsn
