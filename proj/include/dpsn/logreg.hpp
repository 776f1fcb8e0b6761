#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dpsn {

struct BinaryLRModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double l2 = 1.0;
  std::string target;
  bool trained = false;
  int iterations = 0;
  double gradient_norm = 0.0;

  double decision(const Eigen::VectorXd& x) const { return weights.dot(x) + bias; }
  double probability(const Eigen::VectorXd& x) const;
};

struct LRTrainOptions {
  double tolerance = 1e-6;
  int max_iterations = 1000;
  // Filled with the objective after every accepted iteration when non-null.
  std::vector<double>* objective_trace = nullptr;
};

// Objective: mean log-loss + l2 * |w|^2 / 2 (bias unpenalized).
double lr_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double bias,
                    double l2);
// Gradient w.r.t. (w, bias), bias last.
Eigen::VectorXd lr_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                            double bias, double l2);

// Damped Newton from zero with backtracking (Armijo) line search; stops when
// the gradient norm is <= tolerance or after max_iterations. `targets` holds
// 0/1 values; both must be present (DegenerateTargetError otherwise).
BinaryLRModel train_binary(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, double l2,
                           const LRTrainOptions& options = {});

// Per-dimension z-scoring fitted on training rows; zero-variance dimensions
// keep scale 1.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& rows);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
};

struct OvRModel {
  std::vector<std::string> classes;  // lexicographic
  std::vector<BinaryLRModel> models;  // parallel to classes
  Standardizer standardizer;
  double l2 = 1.0;
};

struct Prediction {
  std::string label;
  std::vector<double> scores;  // per class, same order as OvRModel::classes
};

// Independent sigmoid scores; the highest wins, ties go to the
// lexicographically first class.
Prediction predict(const OvRModel& model, const Eigen::VectorXd& feature);

// 9 strengths, log-spaced over [1e-4, 1e4].
std::vector<double> default_l2_grid();

struct OvRTrainOptions {
  std::vector<double> l2_grid = default_l2_grid();
  int inner_folds = 5;
  std::uint64_t seed = 0;
  LRTrainOptions lr;
};

struct OvRFit {
  OvRModel model;
  double chosen_l2 = 0.0;
  std::vector<double> inner_error;  // mean inner misclassification per grid value
};

// Fits the standardizer and c binary models on all rows with the given l2.
OvRModel fit_ovr(const Eigen::MatrixXd& features, const std::vector<std::string>& labels, double l2,
                 const LRTrainOptions& options = {});

// Nested selection: every l2 is scored by mean misclassification over
// stratified inner folds; the lowest wins (smaller l2 on ties) and the final
// model is refit on all rows.
OvRFit train_ovr(const Eigen::MatrixXd& features, const std::vector<std::string>& labels,
                 const OvRTrainOptions& options = {});

// Text form: "OVR v1 <classes> <dim> <l2>", standardizer rows, then one
// "<label> <bias> <w...>" line per class, 17 significant digits.
std::string write_model_file(const OvRModel& model);
OvRModel read_model_file(const std::string& text);

}  // namespace dpsn
