#include <omp.h>

#include <algorithm>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "dpsn/error.hpp"
#include "dpsn/evaluation.hpp"
#include "dpsn/formats.hpp"
#include "dpsn/log.hpp"
#include "dpsn/logreg.hpp"
#include "dpsn/pipeline.hpp"
#include "dpsn/psn.hpp"
#include "dpsn/rng.hpp"
#include "dpsn/static_graphlets.hpp"

namespace dpsn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

const std::vector<std::string> kMethods = {"dyn_graphlets_lr", "static_graphlets_lr"};
const char* kBaseline = "majority_baseline";

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

void set_jobs(const RunConfig& config) {
  if (config.jobs > 0) omp_set_num_threads(config.jobs);
}

fs::path stamp_path(const RunConfig& config, const std::string& stage) {
  return config.out / ".stages" / (stage + ".json");
}

void require_stage(const RunConfig& config, const std::string& stage) {
  const fs::path p = stamp_path(config, stage);
  if (!fs::exists(p))
    throw DependencyError("stage '" + stage + "' has not been run in " + config.out.string());
  const json stamp = json::parse(read_text_file(p));
  if (stamp.value("config_hash", std::string{}) != stage_config_hash(config, stage))
    throw DependencyError("outputs of stage '" + stage + "' are stale for this configuration; rerun '" + stage +
                          "'");
}

std::string corpus_hash(const RunConfig& config) {
  if (config.corpus.empty() || !fs::exists(config.corpus)) return {};
  return hex64(fnv1a64(read_text_file(config.corpus)));
}

void update_metadata(const RunConfig& config, const StageResult& result) {
  const fs::path p = config.out / "run_metadata.json";
  json meta = json::object();
  if (fs::exists(p)) {
    try {
      meta = json::parse(read_text_file(p));
    } catch (const json::exception&) {
      meta = json::object();
    }
  }
  meta["config"] = config.to_json();
  meta["version"] = kToolVersion;
  meta["stage_seconds"][result.stage] = result.seconds;
  if (result.stage == "build") meta["input_hashes"]["corpus"] = corpus_hash(config);
  meta["notes"] = {
      {"extension_rule", to_string(config.limits.rule)},
      {"lr_solver", "damped Newton, Armijo backtracking, tol 1e-6, max 1000 iterations, bias unpenalized"},
      {"standardization", "z-score fitted on training rows"},
      {"l2_selection", "stratified inner CV, smaller l2 wins ties"},
      {"bonferroni_divisor", "ordered method pairs M(M-1)"},
      {"pca_scope", to_string(config.pca_scope)},
  };
  write_text_file_atomic(p, meta.dump(2) + "\n");
}

StageResult finish(const RunConfig& config, const std::string& stage, Clock::time_point start,
                   std::vector<fs::path> outputs) {
  StageResult r{stage, seconds_since(start), std::move(outputs)};
  json stamp = {{"stage", stage}, {"config_hash", stage_config_hash(config, stage)}};
  fs::create_directories(stamp_path(config, stage).parent_path());
  write_text_file_atomic(stamp_path(config, stage), stamp.dump() + "\n");
  update_metadata(config, r);
  log::info(stage + " done in " + format_double(r.seconds) + " s");
  return r;
}

struct Labels {
  std::vector<std::string> ids;
  std::vector<std::string> labels;
};

Labels read_labels(const RunConfig& config) {
  Labels out;
  auto rows = lines_of(read_text_file(config.out / "labels.csv"));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].empty()) continue;
    auto f = split(rows[i]);
    if (f.size() != 2) throw ParseError(i + 1, "labels.csv: expected domain_id,label");
    out.ids.push_back(f[0]);
    out.labels.push_back(f[1]);
  }
  return out;
}

// Runs body(i) for i in [0, n) across OpenMP threads, rethrowing the first
// exception on the calling thread.
template <class F>
void parallel_for(std::size_t n, F body) {
  std::exception_ptr failure;
  std::mutex mu;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

struct ResultRow {
  std::string dataset;
  std::string method;
  double aggregate = 0.0;
  double average = 0.0;
  std::size_t n = 0;
};

std::vector<ResultRow> read_results(const fs::path& path) {
  std::vector<ResultRow> out;
  auto rows = lines_of(read_text_file(path));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].empty()) continue;
    if (rows[i][0] == '#') break;
    auto f = split(rows[i]);
    if (f.size() != 5) throw ParseError(i + 1, path.string() + ": expected 5 fields");
    out.push_back({f[0], f[1], std::stod(f[2]), std::stod(f[3]), std::stoul(f[4])});
  }
  return out;
}

std::vector<DatasetRates> gather_rates(const RunConfig& config, const std::vector<fs::path>& extra) {
  std::vector<ResultRow> rows = read_results(config.out / "results.csv");
  for (const auto& p : extra) {
    auto more = read_results(p);
    rows.insert(rows.end(), more.begin(), more.end());
  }
  std::map<std::string, DatasetRates> by_dataset;
  for (const auto& r : rows) {
    auto& d = by_dataset[r.dataset];
    d.dataset_id = r.dataset;
    if (!d.rates.emplace(r.method, r.aggregate).second)
      throw Error("duplicate result for " + r.dataset + "/" + r.method);
  }
  std::vector<DatasetRates> out;
  for (auto& [_, d] : by_dataset) out.push_back(std::move(d));
  return out;
}

}  // namespace

fs::path cmd_synth(const SyntheticSpec& spec, const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path p = dir / "synthetic.jsonl";
  write_text_file_atomic(p, write_canonical_corpus(generate_synthetic_corpus(spec)));
  return p;
}

StageResult cmd_build(const RunConfig& config) {
  config.validate();
  const auto start = Clock::now();
  if (config.corpus.empty()) throw PreconditionError("no corpus given");
  if (!fs::exists(config.corpus)) throw MissingFileError(config.corpus.string());

  std::vector<ProteinDomain> domains;
  if (config.corpus.extension() == ".jsonl") {
    for (auto& d : read_canonical_corpus(read_text_file(config.corpus))) {
      if (d.size() < config.min_length) {
        log::warn("dropping domain " + d.id + ": length " + std::to_string(d.size()) + " < " +
                  std::to_string(config.min_length));
        continue;
      }
      domains.push_back(std::move(d));
    }
  } else {
    domains = load_corpus(read_manifest(config.corpus), {config.min_length, 0});
  }

  std::vector<ProteinDomain> kept;
  std::vector<EventStream> streams;
  for (auto& d : domains) {
    if (!check_connectivity(build_static_psn(d, config.threshold))) {
      log::warn("dropping domain " + d.id + ": disconnected PSN");
      continue;
    }
    kept.push_back(std::move(d));
  }
  kept = apply_class_floor(std::move(kept), config.min_class_size);
  if (kept.empty()) throw CorpusError("corpus is empty after filtering");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  fs::create_directories(config.out / "events");
  std::vector<fs::path> outputs;
  auto emit = [&](const fs::path& p, const std::string& text) {
    write_text_file_atomic(p, text);
    outputs.push_back(p);
  };
  emit(config.out / "domains.jsonl", write_canonical_corpus(kept));

  std::string labels = "domain_id,label\n";
  std::vector<std::string> ids, classes;
  for (const auto& d : kept) {
    labels += d.id + "," + d.label + "\n";
    ids.push_back(d.id);
    classes.push_back(d.label);
    auto stream = derive_event_stream(build_dynamic_psn(d, config.k, config.threshold), d.id);
    emit(config.out / "events" / (d.id + ".events"), write_event_file(stream));
  }
  emit(config.out / "labels.csv", labels);
  emit(config.out / "folds.csv", write_folds_file(stratified_folds(ids, classes, config.folds, config.seed)));
  log::info("build: " + std::to_string(kept.size()) + " domains");
  return finish(config, "build", start, std::move(outputs));
}

StageResult cmd_count(const RunConfig& config) {
  config.validate();
  require_stage(config, "build");
  set_jobs(config);
  const auto start = Clock::now();
  const auto table = DynamicOrbitTable::enumerate(config.limits);
  const auto static_table = StaticOrbitTable::enumerate(config.static_max_nodes);
  const Labels labels = read_labels(config);

  fs::create_directories(config.out / "dgdvm");
  fs::create_directories(config.out / "sgdvm");
  write_text_file_atomic(config.out / "orbits.txt", table.serialize());
  write_text_file_atomic(config.out / "static_orbits.txt", static_table.serialize());

  CountOptions opts;
  opts.max_gap = config.max_gap;
  opts.expect_limits = config.limits;
  parallel_for(labels.ids.size(), [&](std::size_t i) {
    const std::string& id = labels.ids[i];
    const auto stream = read_event_file(read_text_file(config.out / "events" / (id + ".events")));
    auto dyn = count_dynamic_orbits_serial(stream, table, opts);
    dyn.id = id;
    write_text_file_atomic(config.out / "dgdvm" / (id + ".dgdvm"), write_gdvm_file(dyn, "DGDVM"));
    const auto sgdvm = count_static_orbits_serial(rebuild_final_snapshot(stream), static_table, id);
    write_text_file_atomic(config.out / "sgdvm" / (id + ".sgdvm"), write_gdvm_file(sgdvm, "SGDVM"));
  });
  return finish(config, "count", start, {config.out / "orbits.txt", config.out / "dgdvm", config.out / "sgdvm"});
}

namespace {

struct Featurized {
  ColumnFilter filter;
  Eigen::MatrixXd flat;
};

Featurized featurize_kind(const RunConfig& config, const std::vector<std::string>& ids, const std::string& dir,
                          const std::string& magic) {
  auto load = [&](const std::string& id) {
    return read_gdvm_file(read_text_file(config.out / dir / (id + "." + dir)), magic);
  };
  // Pass 1: union of non-zero columns.
  std::vector<ColumnFilter> partial(ids.size());
  parallel_for(ids.size(), [&](std::size_t i) {
    const Gdvm g = load(ids[i]);
    partial[i] = fit_column_filter(std::span<const Gdvm>(&g, 1));
  });
  Featurized out;
  out.filter.source = dir;
  for (const auto& f : partial) out.filter = merge_column_filters(out.filter, f);
  out.filter.source = dir;
  const std::size_t c = out.filter.kept.size();
  if (c < 2) throw PreconditionError(dir + ": fewer than two non-zero orbit columns");

  // Pass 2: filtered matrix -> GCM -> upper triangle.
  out.flat.resize(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(c * (c - 1) / 2));
  parallel_for(ids.size(), [&](std::size_t i) {
    const Gdvm g = load(ids[i]);
    out.flat.row(static_cast<Eigen::Index>(i)) =
        flatten_upper(compute_gcm(apply_column_filter(g, out.filter), config.correlation)).transpose();
  });
  return out;
}

}  // namespace

StageResult cmd_featurize(const RunConfig& config) {
  config.validate();
  require_stage(config, "count");
  set_jobs(config);
  const auto start = Clock::now();
  const Labels labels = read_labels(config);
  fs::create_directories(config.out / "features");
  std::vector<fs::path> outputs;
  for (const auto& [kind, dir, magic] : {std::tuple{"dynamic", "dgdvm", "DGDVM"}, {"static", "sgdvm", "SGDVM"}}) {
    Featurized f = featurize_kind(config, labels.ids, dir, magic);
    const fs::path base = config.out / "features" / kind;
    write_text_file_atomic(base.string() + ".cols", write_column_filter(f.filter));
    outputs.push_back(base.string() + ".cols");
    const fs::path pca_path = base.string() + ".pca";
    if (config.pca_scope == PcaScope::kDataset) {
      const PcaModel pca = fit_pca(f.flat, config.pca_retain);
      write_text_file_atomic(pca_path, write_pca_file(pca));
      write_text_file_atomic(base.string() + ".feat", write_feature_file(labels.ids, pca.transform(f.flat)));
      outputs.push_back(pca_path);
      log::info(std::string("featurize ") + kind + ": " + std::to_string(f.filter.kept.size()) + " columns, d = " +
                std::to_string(pca.d));
    } else {
      std::error_code ec;
      fs::remove(pca_path, ec);
      write_text_file_atomic(base.string() + ".feat", write_feature_file(labels.ids, f.flat));
    }
    outputs.push_back(base.string() + ".feat");
  }
  return finish(config, "featurize", start, std::move(outputs));
}

namespace {

std::uint64_t inner_seed(std::uint64_t seed, int fold) {
  SplitMix64 rng(seed ^ (0xD1B54A32D192ED03ull * static_cast<std::uint64_t>(fold + 1)));
  return rng.next();
}

std::vector<Eigen::Index> rows_where(const std::vector<int>& fold, int f, bool equal) {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < fold.size(); ++i)
    if ((fold[i] == f) == equal) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace

StageResult cmd_train_lr(const RunConfig& config) {
  config.validate();
  require_stage(config, "featurize");
  set_jobs(config);
  const auto start = Clock::now();
  const Labels labels = read_labels(config);
  const FoldAssignment folds = read_folds_file(read_text_file(config.out / "folds.csv"));
  std::vector<int> fold_of(labels.ids.size());
  for (std::size_t i = 0; i < labels.ids.size(); ++i) {
    auto f = folds.fold_of(labels.ids[i]);
    if (!f) throw Error("folds.csv has no entry for " + labels.ids[i]);
    fold_of[i] = *f;
  }
  const int n_folds = *std::max_element(fold_of.begin(), fold_of.end()) + 1;

  fs::create_directories(config.out / "predictions");
  fs::create_directories(config.out / "models");
  std::vector<fs::path> outputs;
  for (const auto& method : kMethods) {
    const auto method_start = Clock::now();
    const std::string kind = method == "dyn_graphlets_lr" ? "dynamic" : "static";
    std::vector<std::string> ids;
    Eigen::MatrixXd x;
    read_feature_file(read_text_file(config.out / "features" / (kind + ".feat")), ids, x);
    if (ids != labels.ids) throw DependencyError("features/" + kind + ".feat does not match labels.csv; rerun 'featurize'");

    PredictionSet preds;
    preds.method_id = method;
    preds.dataset_id = config.dataset_id;
    std::string l2_log = "fold,chosen_l2";
    const auto grid = config.l2_grid.empty() ? default_l2_grid() : config.l2_grid;
    for (double l2 : grid) l2_log += ",inner_error_" + format_double(l2);
    l2_log += "\n";

    for (int f = 0; f < n_folds; ++f) {
      const auto train = rows_where(fold_of, f, false);
      const auto test = rows_where(fold_of, f, true);
      Eigen::MatrixXd x_train = x(train, Eigen::placeholders::all);
      Eigen::MatrixXd x_test = x(test, Eigen::placeholders::all);
      if (config.pca_scope == PcaScope::kTrainingFolds) {
        const PcaModel pca = fit_pca(x_train, config.pca_retain);
        x_train = pca.transform(x_train);
        x_test = pca.transform(x_test);
      }
      std::vector<std::string> y_train;
      for (auto i : train) y_train.push_back(labels.labels[static_cast<std::size_t>(i)]);

      OvRTrainOptions opts;
      opts.l2_grid = grid;
      opts.inner_folds = config.inner_folds;
      opts.seed = inner_seed(config.seed, f);
      const OvRFit fit = train_ovr(x_train, y_train, opts);
      write_text_file_atomic(config.out / "models" / (method + ".fold" + std::to_string(f) + ".model"),
                             write_model_file(fit.model));
      l2_log += std::to_string(f) + "," + format_double(fit.chosen_l2);
      for (double e : fit.inner_error) l2_log += "," + format_double(e);
      l2_log += "\n";

      for (std::size_t j = 0; j < test.size(); ++j) {
        const auto i = static_cast<std::size_t>(test[j]);
        const Prediction p = predict(fit.model, x_test.row(static_cast<Eigen::Index>(j)).transpose());
        preds.rows.push_back({labels.ids[i], f, labels.labels[i], p.label, p.scores});
      }
    }
    std::sort(preds.rows.begin(), preds.rows.end(),
              [](const auto& a, const auto& b) { return a.domain_id < b.domain_id; });
    preds.runtime_seconds = seconds_since(method_start);
    const fs::path p = config.out / "predictions" / (method + ".csv");
    write_text_file_atomic(p, write_predictions_file(preds));
    write_text_file_atomic(config.out / "models" / (method + ".l2.csv"), l2_log);
    json runtime = {{"dataset_id", preds.dataset_id}, {"method_id", method}, {"runtime_seconds", preds.runtime_seconds}};
    write_text_file_atomic(config.out / "predictions" / (method + ".runtime.json"), runtime.dump() + "\n");
    outputs.push_back(p);
  }
  return finish(config, "train-lr", start, std::move(outputs));
}

StageResult cmd_evaluate(const RunConfig& config, const std::vector<fs::path>& extra_predictions) {
  config.validate();
  require_stage(config, "build");
  const auto start = Clock::now();

  std::vector<fs::path> files;
  const fs::path pred_dir = config.out / "predictions";
  if (fs::exists(pred_dir)) {
    require_stage(config, "train-lr");
    for (const auto& e : fs::directory_iterator(pred_dir))
      if (e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
  }
  for (const auto& p : extra_predictions) {
    if (!fs::exists(p)) throw MissingFileError(p.string());
    files.push_back(p);
  }
  if (files.empty()) throw DependencyError("no predictions found; run 'train-lr' first");

  const FoldAssignment folds = read_folds_file(read_text_file(config.out / "folds.csv"));
  std::vector<ResultRow> results;
  std::map<std::string, std::vector<std::string>> dataset_labels;
  std::string runtimes = "dataset_id,method_id,seconds\n";
  for (const auto& file : files) {
    std::optional<double> runtime;
    fs::path sidecar = file;
    sidecar.replace_extension(".runtime.json");
    if (fs::exists(sidecar)) runtime = json::parse(read_text_file(sidecar)).value("runtime_seconds", 0.0);
    for (const auto& set : read_predictions_file(read_text_file(file))) {
      const FoldAssignment* ref = set.dataset_id == config.dataset_id ? &folds : nullptr;
      const auto m = misclassification(set, ref);
      results.push_back({set.dataset_id, set.method_id, m.aggregate, m.average, set.rows.size()});
      auto& labels = dataset_labels[set.dataset_id];
      if (labels.empty())
        for (const auto& r : set.rows) labels.push_back(r.true_label);
      if (runtime) runtimes += set.dataset_id + "," + set.method_id + "," + format_double(*runtime) + "\n";
    }
  }
  for (const auto& [dataset, labels] : dataset_labels) {
    const double b = majority_baseline(labels);
    results.push_back({dataset, kBaseline, b, b, labels.size()});
  }
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    return std::tie(a.dataset, a.method) < std::tie(b.dataset, b.method);
  });
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].dataset == results[i - 1].dataset && results[i].method == results[i - 1].method)
      throw Error("duplicate predictions for " + results[i].dataset + "/" + results[i].method);

  std::string out = "dataset_id,method_id,aggregate,average,n\n";
  std::map<std::string, std::vector<double>> per_method;
  for (const auto& r : results) {
    out += r.dataset + "," + r.method + "," + format_double(r.aggregate) + "," + format_double(r.average) + "," +
           std::to_string(r.n) + "\n";
    per_method[r.method].push_back(r.aggregate);
  }
  out += "# summary\n# method_id,datasets,mean_aggregate,median_aggregate\n";
  for (const auto& [method, rates] : per_method) {
    const auto s = runtime_summary(rates);
    out += "# " + method + "," + std::to_string(rates.size()) + "," + format_double(s.mean) + "," +
           format_double(s.median) + "\n";
  }
  write_text_file_atomic(config.out / "results.csv", out);
  write_text_file_atomic(config.out / "runtimes.csv", runtimes);
  return finish(config, "evaluate", start, {config.out / "results.csv", config.out / "runtimes.csv"});
}

StageResult cmd_rank(const RunConfig& config, const std::vector<fs::path>& extra_results) {
  config.validate();
  require_stage(config, "evaluate");
  const auto start = Clock::now();
  const auto rates = gather_rates(config, extra_results);
  std::string ranks = "policy,threshold,dataset_id,method_id,rate,rank\n";
  std::string summary = "policy,threshold,method_id,datasets,percent_rank1,percent_absolute,percent_tied\n";
  for (const auto& [policy, threshold, name] :
       {std::tuple{RankPolicy::kStrict, 0.0, "strict"}, {RankPolicy::kRelaxed, config.relaxed_threshold, "relaxed"}}) {
    const RankTable table = rank_methods(rates, policy, threshold);
    for (std::size_t d = 0; d < table.datasets.size(); ++d)
      for (const auto& [method, rank] : table.ranks[d])
        ranks += std::string(name) + "," + format_double(threshold) + "," + table.datasets[d] + "," + method + "," +
                 format_double(rates[d].rates.at(method)) + "," + std::to_string(rank) + "\n";
    for (const auto& [method, s] : table.summary)
      summary += std::string(name) + "," + format_double(threshold) + "," + method + "," +
                 std::to_string(s.datasets) + "," + format_double(s.percent_rank1()) + "," +
                 format_double(s.percent_absolute()) + "," + format_double(s.percent_tied()) + "\n";
  }
  write_text_file_atomic(config.out / "ranks.csv", ranks);
  write_text_file_atomic(config.out / "rank_summary.csv", summary);
  return finish(config, "rank", start, {config.out / "ranks.csv", config.out / "rank_summary.csv"});
}

StageResult cmd_stats(const RunConfig& config, const std::vector<fs::path>& extra_results) {
  config.validate();
  require_stage(config, "evaluate");
  const auto start = Clock::now();
  const auto rates = gather_rates(config, extra_results);
  std::set<std::string> method_set;
  for (const auto& d : rates)
    for (const auto& [m, _] : d.rates) method_set.insert(m);
  const std::vector<std::string> methods(method_set.begin(), method_set.end());
  const std::size_t m = methods.size();
  const std::size_t comparisons = m * (m - 1);
  log::info("stats: Bonferroni divisor " + std::to_string(comparisons) + " (ordered pairs)");

  std::string stats = "x_method,y_method,datasets,n_effective,zeros_discarded,p,q,exact,flag\n";
  std::map<std::pair<std::string, std::string>, double> q;
  for (const auto& x : methods) {
    for (const auto& y : methods) {
      if (x == y) continue;
      std::vector<double> xr, yr;
      for (const auto& d : rates) {
        auto ix = d.rates.find(x), iy = d.rates.find(y);
        if (ix != d.rates.end() && iy != d.rates.end()) {
          xr.push_back(ix->second);
          yr.push_back(iy->second);
        }
      }
      StatResult r;
      r.x_method = x;
      r.y_method = y;
      std::string flag;
      if (xr.size() < 5) {
        flag = "insufficient";
      } else {
        r = wilcoxon_one_sided(xr, yr, comparisons);
        if (r.undefined) flag = "undefined";
      }
      q[{x, y}] = r.q;
      stats += x + "," + y + "," + std::to_string(xr.size()) + "," + std::to_string(r.n_effective) + "," +
               std::to_string(r.zeros_discarded) + "," + format_double(r.p) + "," + format_double(r.q) + "," +
               (r.exact ? "1" : "0") + "," + flag + "\n";
    }
  }
  std::string matrix = "method";
  for (const auto& y : methods) matrix += "," + y;
  matrix += "\n";
  for (const auto& x : methods) {
    matrix += x;
    for (const auto& y : methods) matrix += "," + (x == y ? std::string() : format_double(q.at({x, y})));
    matrix += "\n";
  }
  write_text_file_atomic(config.out / "stats.csv", stats);
  write_text_file_atomic(config.out / "qvalues.csv", matrix);
  return finish(config, "stats", start, {config.out / "stats.csv", config.out / "qvalues.csv"});
}

namespace {

std::vector<std::vector<std::string>> read_table(const fs::path& path) {
  std::vector<std::vector<std::string>> out;
  auto rows = lines_of(read_text_file(path));
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!rows[i].empty() && rows[i][0] != '#') out.push_back(split(rows[i]));
  return out;
}

}  // namespace

StageResult cmd_report(const RunConfig& config) {
  config.validate();
  require_stage(config, "rank");
  require_stage(config, "stats");
  const auto start = Clock::now();
  const fs::path dir = config.out / "report";
  fs::create_directories(dir);
  std::vector<fs::path> outputs;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text_file_atomic(dir / name, text);
    outputs.push_back(dir / name);
  };

  // Rank-1 percentages, absolute vs tied, one chart per policy.
  std::map<std::string, std::map<std::string, std::pair<double, double>>> rank1;
  for (const auto& f : read_table(config.out / "rank_summary.csv"))
    rank1[f.at(0)][f.at(2)] = {std::stod(f.at(5)), std::stod(f.at(6))};
  std::string rank_table = "policy,method_id,percent_absolute,percent_tied\n";
  for (const auto& [policy, methods] : rank1) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values(2);
    for (const auto& [m, v] : methods) {
      names.push_back(m);
      values[0].push_back(v.first);
      values[1].push_back(v.second);
      rank_table += policy + "," + m + "," + format_double(v.first) + "," + format_double(v.second) + "\n";
    }
    emit("rank1_" + policy + ".svg",
         svg_bar_chart("Rank-1 datasets (" + policy + ")", names, {"absolute", "tied"}, values, "% of datasets", true));
  }
  emit("rank1.csv", rank_table);

  // Misclassification distribution over datasets.
  std::map<std::string, std::vector<double>> rates;
  for (const auto& f : read_table(config.out / "results.csv")) rates[f.at(1)].push_back(std::stod(f.at(2)));
  std::vector<std::string> names;
  std::vector<std::vector<double>> samples;
  std::string rate_table = "method_id,datasets,mean_aggregate,median_aggregate\n";
  for (const auto& [m, v] : rates) {
    names.push_back(m);
    samples.push_back(v);
    const auto s = runtime_summary(v);
    rate_table += m + "," + std::to_string(v.size()) + "," + format_double(s.mean) + "," + format_double(s.median) +
                  "\n";
  }
  emit("misclassification.svg", svg_box_chart("Aggregate misclassification", names, samples, "misclassification"));
  emit("misclassification.csv", rate_table);
  emit("qvalues.csv", read_text_file(config.out / "qvalues.csv"));

  // Runtimes vary run to run; they stay in files named runtime*.
  std::map<std::string, std::vector<double>> seconds;
  for (const auto& f : read_table(config.out / "runtimes.csv")) seconds[f.at(1)].push_back(std::stod(f.at(2)));
  if (!seconds.empty()) {
    std::vector<std::string> rn;
    std::vector<std::vector<double>> rv(2);
    std::string rt = "method_id,datasets,median_seconds,mean_seconds,stdev_seconds,single_value,median_hours,mean_hours\n";
    for (const auto& [m, v] : seconds) {
      const auto s = runtime_summary(v);
      rn.push_back(m);
      rv[0].push_back(s.median);
      rv[1].push_back(s.mean);
      rt += m + "," + std::to_string(v.size()) + "," + format_double(s.median) + "," + format_double(s.mean) + "," +
            format_double(s.stdev) + "," + (s.single_value ? "1" : "0") + "," +
            format_double(RuntimeSummary::hours(s.median)) + "," + format_double(RuntimeSummary::hours(s.mean)) +
            "\n";
    }
    emit("runtime_summary.csv", rt);
    emit("runtime.svg", svg_bar_chart("Runtime per dataset", rn, {"median", "mean"}, rv, "seconds"));
  }
  return finish(config, "report", start, std::move(outputs));
}

std::vector<StageResult> run_pipeline(const RunConfig& config) {
  std::vector<StageResult> out;
  out.push_back(cmd_build(config));
  out.push_back(cmd_count(config));
  out.push_back(cmd_featurize(config));
  out.push_back(cmd_train_lr(config));
  out.push_back(cmd_evaluate(config));
  out.push_back(cmd_rank(config));
  out.push_back(cmd_stats(config));
  out.push_back(cmd_report(config));
  return out;
}

}  // namespace dpsn
