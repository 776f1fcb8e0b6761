#include <fstream>

#include "dpsn/error.hpp"
#include "dpsn/formats.hpp"
#include "dpsn/logreg.hpp"
#include "dpsn/pipeline.hpp"

namespace dpsn {

using nlohmann::json;

json RunConfig::to_json() const {
  json j = json::object();
  j["corpus"] = corpus.string();
  j["dataset_id"] = dataset_id;
  j["out"] = out.string();
  j["k"] = k;
  j["threshold"] = threshold;
  j["max_nodes"] = limits.max_nodes;
  j["max_events"] = limits.max_events;
  j["extension_rule"] = to_string(limits.rule);
  j["max_gap"] = max_gap ? json(*max_gap) : json(nullptr);
  j["static_max_nodes"] = static_max_nodes;
  j["correlation"] = to_string(correlation);
  j["pca_retain"] = pca_retain;
  j["pca_scope"] = to_string(pca_scope);
  j["l2_grid"] = l2_grid.empty() ? default_l2_grid() : l2_grid;
  j["folds"] = folds;
  j["inner_folds"] = inner_folds;
  j["seed"] = seed;
  j["relaxed_threshold"] = relaxed_threshold;
  j["min_length"] = min_length;
  j["min_class_size"] = min_class_size;
  j["jobs"] = jobs;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  if (!j.is_object()) throw Error("config must be a JSON object");
  if (j.contains("corpus")) c.corpus = j["corpus"].get<std::string>();
  c.dataset_id = j.value("dataset_id", c.dataset_id);
  if (j.contains("out")) c.out = j["out"].get<std::string>();
  c.k = j.value("k", c.k);
  c.threshold = j.value("threshold", c.threshold);
  c.limits.max_nodes = j.value("max_nodes", c.limits.max_nodes);
  c.limits.max_events = j.value("max_events", c.limits.max_events);
  if (j.contains("extension_rule")) c.limits.rule = parse_extension_rule(j["extension_rule"].get<std::string>());
  if (j.contains("max_gap") && !j["max_gap"].is_null()) c.max_gap = j["max_gap"].get<int>();
  c.static_max_nodes = j.value("static_max_nodes", c.static_max_nodes);
  if (j.contains("correlation")) c.correlation = parse_correlation_kind(j["correlation"].get<std::string>());
  c.pca_retain = j.value("pca_retain", c.pca_retain);
  if (j.contains("pca_scope")) c.pca_scope = parse_pca_scope(j["pca_scope"].get<std::string>());
  if (j.contains("l2_grid")) c.l2_grid = j["l2_grid"].get<std::vector<double>>();
  c.folds = j.value("folds", c.folds);
  c.inner_folds = j.value("inner_folds", c.inner_folds);
  c.seed = j.value("seed", c.seed);
  c.relaxed_threshold = j.value("relaxed_threshold", c.relaxed_threshold);
  c.min_length = j.value("min_length", c.min_length);
  c.min_class_size = j.value("min_class_size", c.min_class_size);
  c.jobs = j.value("jobs", c.jobs);
  return c;
}

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw PreconditionError("config: " + what);
  };
  require(k >= 1, "k must be >= 1");
  require(threshold > 0, "threshold must be > 0");
  require(limits.max_nodes >= 2 && limits.max_nodes <= DynamicOrbitTable::kMaxNodes, "max_nodes in [2, 5]");
  require(limits.max_events >= 1 && limits.max_events <= DynamicOrbitTable::kMaxEvents, "max_events in [1, 8]");
  require(!max_gap || *max_gap >= 0, "max_gap must be >= 0");
  require(static_max_nodes >= 2 && static_max_nodes <= 5, "static_max_nodes in [2, 5]");
  require(pca_retain > 0 && pca_retain <= 1, "pca_retain in (0, 1]");
  for (double l2 : l2_grid) require(l2 > 0, "l2 grid values must be > 0");
  require(folds >= 2, "folds must be >= 2");
  require(inner_folds >= 2, "inner_folds must be >= 2");
  require(relaxed_threshold >= 0 && relaxed_threshold < 1, "relaxed_threshold in [0, 1)");
  require(jobs >= 0, "jobs must be >= 0");
  require(!dataset_id.empty() && dataset_id.find_first_of(",\n") == std::string::npos,
          "dataset_id must be non-empty without commas");
}

RunConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw Error("config " + path.string() + ": " + e.what());
  }
  auto c = RunConfig::from_json(j);
  if (!c.corpus.empty() && c.corpus.is_relative()) c.corpus = path.parent_path() / c.corpus;
  return c;
}

std::string stage_config_hash(const RunConfig& config, const std::string& stage) {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> fields = {
      {"build", {"corpus", "dataset_id", "k", "threshold", "min_length", "min_class_size", "folds", "seed"}},
      {"count", {"max_nodes", "max_events", "extension_rule", "max_gap", "static_max_nodes"}},
      {"featurize", {"correlation", "pca_retain", "pca_scope"}},
      {"train-lr", {"l2_grid", "inner_folds"}},
      {"evaluate", {}},
      {"rank", {"relaxed_threshold"}},
      {"stats", {}},
      {"report", {}},
  };
  const json all = config.to_json();
  json subset = json::object();
  bool found = false;
  for (const auto& [name, keys] : fields) {
    for (const auto& key : keys) subset[key] = all[key];
    if (name == stage) {
      found = true;
      break;
    }
  }
  if (!found) throw Error("unknown stage: " + stage);
  return hex64(fnv1a64(subset.dump()));
}

}  // namespace dpsn
