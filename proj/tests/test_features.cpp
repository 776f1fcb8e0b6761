#include <numeric>

#include <doctest.h>

#include "dpsn/error.hpp"
#include "dpsn/features.hpp"
#include "dpsn/formats.hpp"
#include "dpsn/rng.hpp"

using namespace dpsn;
using Eigen::MatrixXd;

namespace {

Gdvm gdvm_from(const std::string& id, const std::vector<std::vector<std::uint64_t>>& rows) {
  Gdvm g{id, CountMatrix(rows.size(), rows.front().size())};
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) g.counts(r, c) = rows[r][c];
  return g;
}

Gdvm random_gdvm(std::uint64_t seed, std::size_t rows, std::size_t cols) {
  SplitMix64 rng(seed);
  Gdvm g{"g" + std::to_string(seed), CountMatrix(rows, cols)};
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) g.counts(r, c) = c % 4 == 3 ? 0 : rng.below(9);
  return g;
}

MatrixXd random_rows(std::uint64_t seed, int rows, int cols) {
  SplitMix64 rng(seed);
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("column filter keeps columns non-zero somewhere") {
    std::vector<Gdvm> corpus = {gdvm_from("a", {{1, 0, 0, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 2, 0, 0, 0, 0}}),
                                gdvm_from("b", {{0, 0, 0, 0, 0, 0, 0, 0, 0, 7}})};
    CHECK(fit_column_filter(corpus).kept == std::vector<int>{0, 5, 9});
    const auto single = fit_column_filter(std::vector<Gdvm>{gdvm_from("c", {{1, 2, 3}, {4, 5, 6}})});
    CHECK(single.kept == std::vector<int>{0, 1, 2});
    const auto m = apply_column_filter(corpus[0], fit_column_filter(corpus));
    CHECK(m.cols() == 3);
    CHECK(m(1, 1) == 2.0);
    const ColumnFilter x{{0, 4}, ""}, y{{2, 4, 7}, ""};
    CHECK(merge_column_filters(x, y).kept == std::vector<int>{0, 2, 4, 7});
  }

  TEST_CASE("4x3 Spearman fixture") {
    MatrixXd m(4, 3);
    m << 1, 2, 4, 2, 1, 3, 3, 4, 1, 4, 3, 2;
    const MatrixXd g = compute_gcm(m);
    MatrixXd expected(3, 3);
    expected << 1, 0.6, -0.8, 0.6, 1, -0.8, -0.8, -0.8, 1;
    CHECK((g - expected).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("ties use average ranks; Pearson on the same data") {
    MatrixXd m(4, 3);
    m << 1, 2, 2, 2, 2, 3, 3, 5, 3, 3, 1, 9;
    MatrixXd spearman(3, 3), pearson(3, 3);
    spearman << 1, 0, 0.83333333333333337, 0, 1, -0.5, 0.83333333333333337, -0.5, 1;
    pearson << 1, 0.30151134457776363, 0.6252863350010923, 0.30151134457776363, 1, -0.510946126311545,
        0.6252863350010923, -0.510946126311545, 1;
    CHECK((compute_gcm(m) - spearman).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((compute_gcm(m, CorrelationKind::kPearson) - pearson).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("identical columns correlate 1; reversed columns -1; constant columns 0") {
    MatrixXd same(5, 3);
    for (int i = 0; i < 5; ++i) same.row(i).setConstant(i * i);
    CHECK((compute_gcm(same).array() - 1.0).abs().maxCoeff() < 1e-12);

    MatrixXd rev(5, 3);
    for (int i = 0; i < 5; ++i) rev.row(i) << i, -i, 7;
    const MatrixXd g = compute_gcm(rev);
    CHECK(g(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(g(0, 2) == 0.0);
    CHECK(g(2, 2) == 1.0);
    CHECK_THROWS_AS(compute_gcm(MatrixXd::Ones(1, 3)), PreconditionError);
  }

  TEST_CASE("GCM symmetry, unit diagonal, joint row permutation invariance") {
    const auto g = random_gdvm(3, 40, 12);
    const MatrixXd m = apply_column_filter(g, fit_column_filter(std::vector<Gdvm>{g}));
    for (auto kind : {CorrelationKind::kSpearman, CorrelationKind::kPearson}) {
      const MatrixXd c = compute_gcm(m, kind);
      CHECK((c - c.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((c.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-12);
      CHECK(c.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
      MatrixXd shuffled = m;
      std::vector<int> order(static_cast<std::size_t>(m.rows()));
      std::iota(order.begin(), order.end(), 0);
      SplitMix64 rng(9);
      shuffle(order, rng);
      for (int i = 0; i < m.rows(); ++i) shuffled.row(i) = m.row(order[static_cast<std::size_t>(i)]);
      CHECK((compute_gcm(shuffled, kind) - c).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("flatten_upper order and length") {
    MatrixXd g(3, 3);
    g << 1, 0.1, 0.2, 0.1, 1, 0.3, 0.2, 0.3, 1;
    const Eigen::VectorXd v = flatten_upper(g);
    REQUIRE(v.size() == 3);
    CHECK(v(0) == 0.1);
    CHECK(v(1) == 0.2);
    CHECK(v(2) == 0.3);
    CHECK(flatten_upper(MatrixXd::Identity(2, 2)).size() == 1);
    CHECK(flatten_upper(MatrixXd::Identity(211, 211)).size() == 22155);
  }

  TEST_CASE("PCA: one direction gives d = 1") {
    MatrixXd rows(20, 4);
    Eigen::RowVectorXd dir(4);
    dir << 1, 2, -1, 0.5;
    for (int i = 0; i < 20; ++i) rows.row(i) = (i - 7.5) * dir;
    const auto pca = fit_pca(rows, 0.9);
    CHECK(pca.d == 1);
    CHECK(pca.retained() == doctest::Approx(1.0));
  }

  TEST_CASE("PCA: isotropic 3-d data keeps all three components") {
    MatrixXd rows(6, 3);
    rows << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1;
    const auto pca = fit_pca(rows, 0.9);
    CHECK(pca.d == 3);
    for (int i = 0; i < 3; ++i) CHECK(pca.explained_ratio(i) == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("PCA: minimal d, orthonormal components, reconstruction bound") {
    const MatrixXd base = random_rows(11, 30, 8);
    MatrixXd rows = base;
    for (int j = 0; j < 8; ++j) rows.col(j) *= 1.0 + j;  // unequal variances
    for (double retain : {0.5, 0.9, 0.99, 1.0}) {
      const auto pca = fit_pca(rows, retain);
      CHECK(pca.retained() >= retain - 1e-12);
      if (pca.d > 1) CHECK(pca.explained_ratio.head(pca.d - 1).sum() < retain);
      CHECK(pca.explained_ratio.sum() <= 1.0 + 1e-9);
      const MatrixXd gram = pca.components * pca.components.transpose();
      CHECK((gram - MatrixXd::Identity(pca.d, pca.d)).cwiseAbs().maxCoeff() < 1e-8);
      const MatrixXd back = pca.reconstruct(pca.transform(rows));
      const double residual = (rows - back).squaredNorm() / static_cast<double>(rows.rows() - 1);
      // Discarded variance is exactly the residual.
      CHECK(residual == doctest::Approx((1.0 - pca.retained()) * pca.total_variance).epsilon(1e-9));
    }
  }

  TEST_CASE("PCA refuses zero variance") {
    CHECK_THROWS(fit_pca(MatrixXd::Ones(5, 3), 0.9));
  }

  TEST_CASE("pipeline: shapes, scopes, determinism, serial agreement") {
    std::vector<Gdvm> corpus;
    for (std::uint64_t s = 1; s <= 12; ++s) corpus.push_back(random_gdvm(s, 25, 16));
    FeatureConfig cfg;
    const auto a = apply_pipeline(corpus, cfg);
    const std::size_t c = a.filter.kept.size();
    CHECK(c == 12);
    REQUIRE(a.pca);
    CHECK(a.values.rows() == 12);
    CHECK(a.values.cols() == a.pca->d);
    CHECK(a.pca->components.cols() == static_cast<Eigen::Index>(c * (c - 1) / 2));
    const auto b = apply_pipeline(corpus, cfg);
    CHECK(write_feature_file(a.ids, a.values) == write_feature_file(b.ids, b.values));

    const MatrixXd par = gcm_features(corpus, a.filter, cfg.correlation);
    const MatrixXd ser = gcm_features_serial(corpus, a.filter, cfg.correlation);
    CHECK(par == ser);

    cfg.scope = PcaScope::kTrainingFolds;
    const auto deferred = apply_pipeline(corpus, cfg);
    CHECK_FALSE(deferred.pca);
    CHECK(deferred.values == par);
  }

  TEST_CASE("enum names round-trip") {
    CHECK(parse_correlation_kind(to_string(CorrelationKind::kPearson)) == CorrelationKind::kPearson);
    CHECK(parse_pca_scope(to_string(PcaScope::kTrainingFolds)) == PcaScope::kTrainingFolds);
    CHECK_THROWS(parse_pca_scope("nope"));
  }
}
