#include <algorithm>
#include <iterator>

#include "dpsn/error.hpp"
#include "dpsn/features.hpp"

namespace dpsn {

std::string to_string(PcaScope scope) { return scope == PcaScope::kDataset ? "dataset" : "training-folds"; }

PcaScope parse_pca_scope(const std::string& name) {
  if (name == "dataset") return PcaScope::kDataset;
  if (name == "training-folds" || name == "fold") return PcaScope::kTrainingFolds;
  throw Error("unknown PCA scope: " + name);
}

ColumnFilter fit_column_filter(std::span<const Gdvm> corpus, std::string source) {
  if (corpus.empty()) throw PreconditionError("column filter needs a non-empty corpus");
  const std::size_t cols = corpus.front().counts.cols();
  std::vector<bool> nonzero(cols, false);
  for (const auto& g : corpus) {
    if (g.counts.cols() != cols) throw Error("GDVM column counts differ across the corpus");
    for (std::size_t r = 0; r < g.counts.rows(); ++r) {
      const auto row = g.counts.row(r);
      for (std::size_t c = 0; c < cols; ++c)
        if (row[c] != 0) nonzero[c] = true;
    }
  }
  ColumnFilter filter;
  filter.source = std::move(source);
  for (std::size_t c = 0; c < cols; ++c)
    if (nonzero[c]) filter.kept.push_back(static_cast<int>(c));
  if (filter.kept.empty()) throw Error("every orbit column is zero across the corpus");
  return filter;
}

Eigen::MatrixXd apply_column_filter(const Gdvm& gdvm, const ColumnFilter& filter) {
  const auto rows = static_cast<Eigen::Index>(gdvm.counts.rows());
  Eigen::MatrixXd out(rows, static_cast<Eigen::Index>(filter.kept.size()));
  for (Eigen::Index r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < filter.kept.size(); ++j)
      out(r, static_cast<Eigen::Index>(j)) = static_cast<double>(gdvm.counts(r, filter.kept[j]));
  return out;
}

ColumnFilter merge_column_filters(const ColumnFilter& a, const ColumnFilter& b) {
  ColumnFilter out;
  out.source = a.source;
  std::set_union(a.kept.begin(), a.kept.end(), b.kept.begin(), b.kept.end(), std::back_inserter(out.kept));
  return out;
}

Eigen::MatrixXd gcm_features(std::span<const Eigen::MatrixXd> filtered, CorrelationKind kind) {
  if (filtered.empty()) return {};
  const auto c = filtered.front().cols();
  const auto n = static_cast<long>(filtered.size());
  Eigen::MatrixXd out(n, c * (c - 1) / 2);
  std::string failure;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      out.row(i) = flatten_upper(compute_gcm(filtered[i], kind));
    } catch (const std::exception& e) {
#pragma omp critical(dpsn_gcm_error)
      if (failure.empty()) failure = "row " + std::to_string(i) + ": " + e.what();
    }
  }
  if (!failure.empty()) throw Error(failure);
  return out;
}

Eigen::MatrixXd gcm_features_serial(std::span<const Gdvm> corpus, const ColumnFilter& filter,
                                    CorrelationKind kind) {
  const auto c = static_cast<Eigen::Index>(filter.kept.size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(corpus.size()), c * (c - 1) / 2);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = flatten_upper(compute_gcm(apply_column_filter(corpus[i], filter), kind));
  return out;
}

Eigen::MatrixXd gcm_features(std::span<const Gdvm> corpus, const ColumnFilter& filter, CorrelationKind kind) {
  const auto c = static_cast<Eigen::Index>(filter.kept.size());
  const auto n = static_cast<long>(corpus.size());
  Eigen::MatrixXd out(n, c * (c - 1) / 2);
  std::string failure;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      out.row(i) = flatten_upper(compute_gcm(apply_column_filter(corpus[i], filter), kind));
    } catch (const std::exception& e) {
#pragma omp critical(dpsn_gcm_error)
      if (failure.empty()) failure = corpus[i].id + ": " + e.what();
    }
  }
  if (!failure.empty()) throw Error(failure);
  return out;
}

FeatureSet apply_pipeline(std::span<const Gdvm> corpus, const FeatureConfig& config) {
  FeatureSet set;
  set.filter = fit_column_filter(corpus);
  for (const auto& g : corpus) set.ids.push_back(g.id);
  Eigen::MatrixXd flat = gcm_features(corpus, set.filter, config.correlation);
  if (config.scope == PcaScope::kTrainingFolds) {
    set.values = std::move(flat);
    return set;
  }
  set.pca = fit_pca(flat, config.retain);
  set.values = set.pca->transform(flat);
  return set;
}

}  // namespace dpsn
