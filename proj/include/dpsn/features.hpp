#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpsn/count_matrix.hpp"

namespace dpsn {

enum class CorrelationKind { kSpearman, kPearson };
enum class PcaScope { kDataset, kTrainingFolds };

std::string to_string(CorrelationKind kind);
CorrelationKind parse_correlation_kind(const std::string& name);
std::string to_string(PcaScope scope);
PcaScope parse_pca_scope(const std::string& name);

// Orbit columns that are non-zero somewhere in the corpus.
struct ColumnFilter {
  std::vector<int> kept;
  std::string source;

  bool operator==(const ColumnFilter&) const = default;
};

ColumnFilter fit_column_filter(std::span<const Gdvm> corpus, std::string source = {});

// Rows of `gdvm` restricted to the kept columns, as doubles.
Eigen::MatrixXd apply_column_filter(const Gdvm& gdvm, const ColumnFilter& filter);

// Graphlet correlation matrix: correlations between the columns over the
// rows. Constant columns correlate 0 with everything else; the diagonal is 1.
// Spearman uses average ranks for ties. Throws for fewer than 2 rows.
Eigen::MatrixXd compute_gcm(const Eigen::MatrixXd& matrix, CorrelationKind kind = CorrelationKind::kSpearman);

// Strictly-upper entries in row-major order: length c(c-1)/2.
Eigen::VectorXd flatten_upper(const Eigen::MatrixXd& gcm);

struct PcaModel {
  Eigen::RowVectorXd mean;
  Eigen::MatrixXd components;       // d x input_dim, orthonormal rows
  Eigen::VectorXd explained_ratio;  // every non-zero component, descending
  double total_variance = 0.0;      // trace of the sample covariance
  int d = 0;

  double retained() const { return explained_ratio.head(d).sum(); }
  Eigen::MatrixXd transform(const Eigen::MatrixXd& rows) const;
  Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& projected) const;
};

// Mean-centred PCA keeping the fewest leading components whose cumulative
// explained variance reaches `retain`. Eigenvalues below 1e-12 * trace are
// treated as zero. Throws on zero total variance.
PcaModel fit_pca(const Eigen::MatrixXd& rows, double retain = 0.90);

struct FeatureConfig {
  CorrelationKind correlation = CorrelationKind::kSpearman;
  double retain = 0.90;
  PcaScope scope = PcaScope::kDataset;
};

ColumnFilter merge_column_filters(const ColumnFilter& a, const ColumnFilter& b);

// GCM upper-triangle vectors, one row per already-filtered matrix.
Eigen::MatrixXd gcm_features(std::span<const Eigen::MatrixXd> filtered, CorrelationKind kind);

// GCM upper-triangle vectors, one row per domain; OpenMP over domains.
Eigen::MatrixXd gcm_features(std::span<const Gdvm> corpus, const ColumnFilter& filter, CorrelationKind kind);
Eigen::MatrixXd gcm_features_serial(std::span<const Gdvm> corpus, const ColumnFilter& filter,
                                    CorrelationKind kind);

struct FeatureSet {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;  // i x d after PCA, i x c(c-1)/2 when PCA is deferred
  ColumnFilter filter;
  std::optional<PcaModel> pca;
};

// filter -> GCM -> flatten -> PCA. With PcaScope::kTrainingFolds the PCA
// step is left to the cross-validation driver and `values` holds the
// flattened vectors.
FeatureSet apply_pipeline(std::span<const Gdvm> corpus, const FeatureConfig& config);

}  // namespace dpsn
