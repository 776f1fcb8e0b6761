#include "dpsn/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "dpsn/error.hpp"
#include "dpsn/evaluation.hpp"
#include "dpsn/formats.hpp"

namespace dpsn {
namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double BinaryLRModel::probability(const Eigen::VectorXd& x) const { return sigmoid(decision(x)); }

double lr_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double bias,
                    double l2) {
  const Eigen::VectorXd z = (x * w).array() + bias;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) loss += softplus(z[i]) - y[i] * z[i];
  return loss / static_cast<double>(x.rows()) + 0.5 * l2 * w.squaredNorm();
}

Eigen::VectorXd lr_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                            double bias, double l2) {
  const Eigen::Index d = x.cols();
  const Eigen::VectorXd z = (x * w).array() + bias;
  Eigen::VectorXd r(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) r[i] = sigmoid(z[i]) - y[i];
  Eigen::VectorXd g(d + 1);
  const double inv = 1.0 / static_cast<double>(x.rows());
  g.head(d) = x.transpose() * r * inv + l2 * w;
  g[d] = r.sum() * inv;
  return g;
}

BinaryLRModel train_binary(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, double l2,
                           const LRTrainOptions& options) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (n < 2 || targets.size() != n) throw PreconditionError("binary LR needs >= 2 rows with matching targets");
  if (!(l2 > 0)) throw PreconditionError("l2 strength must be positive");
  const double positives = targets.sum();
  if (positives <= 0 || positives >= static_cast<double>(n))
    throw DegenerateTargetError("binary LR targets are single-valued");

  BinaryLRModel model;
  model.l2 = l2;
  model.weights = Eigen::VectorXd::Zero(d);
  const double inv = 1.0 / static_cast<double>(n);

  double obj = lr_objective(features, targets, model.weights, model.bias, l2);
  Eigen::VectorXd g = lr_gradient(features, targets, model.weights, model.bias, l2);
  int it = 0;
  for (; it < options.max_iterations && g.norm() > options.tolerance; ++it) {
    // Hessian of the objective in (w, bias).
    const Eigen::VectorXd z = (features * model.weights).array() + model.bias;
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = sigmoid(z[i]);
      s[i] = p * (1.0 - p);
    }
    Eigen::MatrixXd h(d + 1, d + 1);
    h.topLeftCorner(d, d) = features.transpose() * s.asDiagonal() * features * inv;
    h.topLeftCorner(d, d).diagonal().array() += l2;
    h.topRightCorner(d, 1) = features.transpose() * s * inv;
    h.bottomLeftCorner(1, d) = h.topRightCorner(d, 1).transpose();
    h(d, d) = s.sum() * inv + 1e-12;

    Eigen::VectorXd step = -h.ldlt().solve(g);
    if (!step.allFinite() || step.dot(g) >= 0) step = -g;

    double alpha = 1.0;
    const double slope = step.dot(g);
    bool accepted = false;
    while (alpha > 1e-20) {
      const Eigen::VectorXd w = model.weights + alpha * step.head(d);
      const double b = model.bias + alpha * step[d];
      const double next = lr_objective(features, targets, w, b, l2);
      if (next <= obj + 1e-4 * alpha * slope && next <= obj) {
        model.weights = w;
        model.bias = b;
        obj = next;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    if (options.objective_trace) options.objective_trace->push_back(obj);
    g = lr_gradient(features, targets, model.weights, model.bias, l2);
  }
  model.iterations = it;
  model.gradient_norm = g.norm();
  model.trained = true;
  return model;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& rows) {
  Standardizer s;
  s.mean = rows.colwise().mean();
  s.scale.resize(rows.cols());
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const double var = (rows.col(j).array() - s.mean[j]).square().sum() / static_cast<double>(rows.rows());
    s.scale[j] = var > 0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& rows) const {
  return (rows.rowwise() - mean).array().rowwise() / scale.array();
}

Prediction predict(const OvRModel& model, const Eigen::VectorXd& feature) {
  if (feature.size() != model.standardizer.mean.size()) throw Error("feature dimension mismatch");
  const Eigen::VectorXd x = model.standardizer.apply(feature.transpose()).transpose();
  Prediction p;
  std::size_t best = 0;
  for (std::size_t c = 0; c < model.models.size(); ++c) {
    p.scores.push_back(model.models[c].probability(x));
    if (p.scores[c] > p.scores[best]) best = c;
  }
  p.label = model.classes.at(best);
  return p;
}

std::vector<double> default_l2_grid() {
  std::vector<double> grid;
  for (int e = -4; e <= 4; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

OvRModel fit_ovr(const Eigen::MatrixXd& features, const std::vector<std::string>& labels, double l2,
                 const LRTrainOptions& options) {
  OvRModel model;
  model.l2 = l2;
  const std::set<std::string> distinct(labels.begin(), labels.end());
  model.classes.assign(distinct.begin(), distinct.end());
  model.standardizer = Standardizer::fit(features);
  const Eigen::MatrixXd x = model.standardizer.apply(features);
  model.models.resize(model.classes.size());
  std::string failure;
#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < static_cast<long>(model.classes.size()); ++c) {
    Eigen::VectorXd y(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) y[i] = labels[i] == model.classes[c] ? 1.0 : 0.0;
    try {
      LRTrainOptions local = options;
      local.objective_trace = nullptr;
      model.models[c] = train_binary(x, y, l2, local);
      model.models[c].target = model.classes[c];
    } catch (const std::exception& e) {
#pragma omp critical(dpsn_ovr_error)
      failure = e.what();
    }
  }
  if (!failure.empty()) throw Error(failure);
  return model;
}

OvRFit train_ovr(const Eigen::MatrixXd& features, const std::vector<std::string>& labels,
                 const OvRTrainOptions& options) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) throw PreconditionError("features/labels length");
  if (options.l2_grid.empty()) throw PreconditionError("empty l2 grid");
  auto grid = options.l2_grid;
  std::sort(grid.begin(), grid.end());

  std::vector<std::string> ids(labels.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = std::to_string(i);
  const auto inner = stratified_folds(ids, labels, options.inner_folds, options.seed);

  OvRFit fit;
  fit.inner_error.assign(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (int f = 0; f < options.inner_folds; ++f) {
      std::vector<Eigen::Index> train, val;
      for (std::size_t i = 0; i < labels.size(); ++i) (inner.fold[i] == f ? val : train).push_back(i);
      std::vector<std::string> train_labels;
      for (auto i : train) train_labels.push_back(labels[i]);
      const OvRModel m = fit_ovr(features(train, Eigen::placeholders::all), train_labels, grid[g], options.lr);
      std::size_t wrong = 0;
      for (auto i : val)
        if (predict(m, features.row(i).transpose()).label != labels[i]) ++wrong;
      sum += static_cast<double>(wrong) / static_cast<double>(val.size());
    }
    fit.inner_error[g] = sum / options.inner_folds;
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (fit.inner_error[g] < fit.inner_error[best]) best = g;
  fit.chosen_l2 = grid[best];
  fit.model = fit_ovr(features, labels, fit.chosen_l2, options.lr);
  return fit;
}

std::string write_model_file(const OvRModel& model) {
  std::ostringstream out;
  const auto dim = model.standardizer.mean.size();
  out << "OVR v1 " << model.classes.size() << ' ' << dim << ' ' << format_double(model.l2) << '\n';
  out << "mean";
  for (Eigen::Index j = 0; j < dim; ++j) out << ' ' << format_double(model.standardizer.mean[j]);
  out << "\nscale";
  for (Eigen::Index j = 0; j < dim; ++j) out << ' ' << format_double(model.standardizer.scale[j]);
  out << '\n';
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    out << model.classes[c] << ' ' << format_double(model.models[c].bias);
    for (Eigen::Index j = 0; j < dim; ++j) out << ' ' << format_double(model.models[c].weights[j]);
    out << '\n';
  }
  return out.str();
}

OvRModel read_model_file(const std::string& text) {
  std::istringstream in(text);
  std::string magic, version, tag;
  std::size_t classes = 0;
  Eigen::Index dim = 0;
  OvRModel model;
  if (!(in >> magic >> version >> classes >> dim >> model.l2) || magic != "OVR" || version != "v1")
    throw ParseError(1, "bad OVR header");
  model.standardizer.mean.resize(dim);
  model.standardizer.scale.resize(dim);
  if (!(in >> tag) || tag != "mean") throw ParseError(2, "expected mean row");
  for (Eigen::Index j = 0; j < dim; ++j) in >> model.standardizer.mean[j];
  if (!(in >> tag) || tag != "scale") throw ParseError(3, "expected scale row");
  for (Eigen::Index j = 0; j < dim; ++j) in >> model.standardizer.scale[j];
  for (std::size_t c = 0; c < classes; ++c) {
    BinaryLRModel m;
    m.l2 = model.l2;
    m.weights.resize(dim);
    if (!(in >> m.target >> m.bias)) throw ParseError(4 + c, "truncated class row");
    for (Eigen::Index j = 0; j < dim; ++j) in >> m.weights[j];
    m.trained = true;
    model.classes.push_back(m.target);
    model.models.push_back(std::move(m));
  }
  if (!in) throw ParseError(4, "truncated model file");
  return model;
}

}  // namespace dpsn
