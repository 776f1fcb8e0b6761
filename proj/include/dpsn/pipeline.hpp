#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpsn/features.hpp"
#include "dpsn/graphlets.hpp"
#include "dpsn/structure_io.hpp"

namespace dpsn {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
  std::filesystem::path corpus;  // manifest (.json) or canonical domain file (.jsonl)
  std::string dataset_id = "dataset";
  std::filesystem::path out = "run";
  int k = 5;
  double threshold = 6.0;
  GraphletLimits limits;
  std::optional<int> max_gap;
  int static_max_nodes = 4;
  CorrelationKind correlation = CorrelationKind::kSpearman;
  double pca_retain = 0.90;
  PcaScope pca_scope = PcaScope::kDataset;
  std::vector<double> l2_grid;  // empty: default grid
  int folds = 5;
  int inner_folds = 5;
  std::uint64_t seed = 7;
  double relaxed_threshold = 0.02;
  std::size_t min_length = 30;
  std::size_t min_class_size = 30;
  int jobs = 0;  // 0: OpenMP default

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  // Throws PreconditionError for out-of-range fields.
  void validate() const;
};

RunConfig load_config(const std::filesystem::path& path);

// Hash of the configuration fields that `stage` and its upstream stages read.
std::string stage_config_hash(const RunConfig& config, const std::string& stage);

struct StageResult {
  std::string stage;
  double seconds = 0.0;
  std::vector<std::filesystem::path> outputs;
};

// Writes <dir>/synthetic.jsonl.
std::filesystem::path cmd_synth(const SyntheticSpec& spec, const std::filesystem::path& dir);

StageResult cmd_build(const RunConfig& config);
StageResult cmd_count(const RunConfig& config);
StageResult cmd_featurize(const RunConfig& config);
StageResult cmd_train_lr(const RunConfig& config);
StageResult cmd_evaluate(const RunConfig& config, const std::vector<std::filesystem::path>& extra_predictions = {});
StageResult cmd_rank(const RunConfig& config, const std::vector<std::filesystem::path>& extra_results = {});
StageResult cmd_stats(const RunConfig& config, const std::vector<std::filesystem::path>& extra_results = {});
StageResult cmd_report(const RunConfig& config);

// Every stage from build through report.
std::vector<StageResult> run_pipeline(const RunConfig& config);

struct OracleOptions {
  GraphletLimits limits;
  int streams = 50;
  int max_stream_nodes = 12;
  int max_stream_events = 20;
  std::uint64_t seed = 1;
  bool inject_fault = false;
};

struct OracleReport {
  std::vector<std::string> lines;  // "PASS ..." / "FAIL ..."
  bool passed = true;
};

// Catalogue size check plus fast-vs-brute-force comparisons on seeded random
// streams; failures carry a shrunk counterexample stream.
OracleReport cmd_oracle(const OracleOptions& options);

// Seeded random stream for property tests: events sorted by (t, u, v), pairs
// may repeat at later times.
EventStream random_stream(std::uint64_t seed, int nodes, int events, int max_t);

// Standalone SVG charts with their data embedded as comments.
// values[s][c] is series s at category c; stacked bars sum the series.
std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& categories,
                          const std::vector<std::string>& series,
                          const std::vector<std::vector<double>>& values, const std::string& y_label,
                          bool stacked = false);
std::string svg_box_chart(const std::string& title, const std::vector<std::string>& categories,
                          const std::vector<std::vector<double>>& samples, const std::string& y_label);

}  // namespace dpsn
