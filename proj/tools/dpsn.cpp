// dpsn: protein structure classification from dynamic graphlet features.

#include <iostream>

#include <CLI11.hpp>

#include "dpsn/error.hpp"
#include "dpsn/log.hpp"
#include "dpsn/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string config;
  std::string corpus;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<double> relaxed_threshold;
  std::string correlation;
  std::string pca_scope;
  std::string dataset_id;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON run configuration");
  app->add_option("--corpus", o.corpus, "corpus manifest (.json) or domain records (.jsonl)");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--seed", o.seed, "fold seed");
  app->add_option("--jobs", o.jobs, "worker threads (0 = all)");
  app->add_option("--relaxed-threshold", o.relaxed_threshold, "relaxed ranking threshold");
  app->add_option("--correlation", o.correlation, "spearman | pearson");
  app->add_option("--pca-scope", o.pca_scope, "dataset | training-folds");
  app->add_option("--dataset-id", o.dataset_id, "dataset identifier written into predictions");
}

dpsn::RunConfig resolve(const Overrides& o) {
  dpsn::RunConfig c;
  if (!o.config.empty()) c = dpsn::load_config(o.config);
  if (!o.corpus.empty()) c.corpus = o.corpus;
  if (!o.out.empty()) c.out = o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.relaxed_threshold) c.relaxed_threshold = *o.relaxed_threshold;
  if (!o.correlation.empty()) c.correlation = dpsn::parse_correlation_kind(o.correlation);
  if (!o.pca_scope.empty()) c.pca_scope = dpsn::parse_pca_scope(o.pca_scope);
  if (!o.dataset_id.empty()) c.dataset_id = o.dataset_id;
  c.validate();
  return c;
}

void print(const dpsn::StageResult& r) {
  std::cout << r.stage << ": " << r.seconds << " s\n";
}

std::vector<fs::path> as_paths(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic protein structure network graphlet pipeline"};
  app.require_subcommand(1);
  Overrides o;
  std::vector<std::string> extra;

  auto* build = app.add_subcommand("build", "load the corpus, build event streams and folds");
  auto* count = app.add_subcommand("count", "count dynamic and static graphlet orbits per domain");
  auto* featurize = app.add_subcommand("featurize", "GCM features and PCA");
  auto* train = app.add_subcommand("train-lr", "cross-validated one-vs-rest logistic regression");
  auto* evaluate = app.add_subcommand("evaluate", "misclassification rates from prediction files");
  auto* rank = app.add_subcommand("rank", "strict and relaxed method ranks");
  auto* stats = app.add_subcommand("stats", "paired Wilcoxon tests with Bonferroni correction");
  auto* report = app.add_subcommand("report", "tables and SVG charts");
  auto* run = app.add_subcommand("run", "every stage from build to report");
  for (auto* s : {build, count, featurize, train, evaluate, rank, stats, report, run}) add_common(s, o);
  evaluate->add_option("--predictions", extra, "additional prediction files")->check(CLI::ExistingFile);
  rank->add_option("--results", extra, "additional results files")->check(CLI::ExistingFile);
  stats->add_option("--results", extra, "additional results files")->check(CLI::ExistingFile);

  dpsn::SyntheticSpec synth_spec;
  std::string synth_out = ".";
  auto* synth = app.add_subcommand("synth", "write a seeded synthetic corpus");
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--seed", synth_spec.seed, "generator seed");
  synth->add_option("--classes", synth_spec.classes, "number of classes");
  synth->add_option("--per-class", synth_spec.per_class, "domains per class");
  synth->add_option("--min-length", synth_spec.min_length, "shortest domain");
  synth->add_option("--max-length", synth_spec.max_length, "longest domain");
  synth->add_option("--class-floor", synth_spec.class_floor, "minimum domains per class");

  dpsn::OracleOptions oracle_opts;
  std::string rule;
  auto* oracle = app.add_subcommand("oracle", "check the fast counter against the brute-force oracle");
  oracle->add_option("--max-nodes", oracle_opts.limits.max_nodes, "graphlet node limit");
  oracle->add_option("--max-events", oracle_opts.limits.max_events, "graphlet event limit");
  oracle->add_option("--rule", rule, "consecutive | prefix");
  oracle->add_option("--streams", oracle_opts.streams, "random streams to compare");
  oracle->add_option("--seed", oracle_opts.seed, "stream seed");
  oracle->add_flag("--inject-fault", oracle_opts.inject_fault, "corrupt the fast counter's orbit map");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      std::cout << dpsn::cmd_synth(synth_spec, synth_out).string() << "\n";
      return 0;
    }
    if (oracle->parsed()) {
      if (!rule.empty()) oracle_opts.limits.rule = dpsn::parse_extension_rule(rule);
      const auto r = dpsn::cmd_oracle(oracle_opts);
      for (const auto& line : r.lines) std::cout << line << "\n";
      return r.passed ? 0 : 1;
    }
    const auto config = resolve(o);
    if (build->parsed()) print(dpsn::cmd_build(config));
    if (count->parsed()) print(dpsn::cmd_count(config));
    if (featurize->parsed()) print(dpsn::cmd_featurize(config));
    if (train->parsed()) print(dpsn::cmd_train_lr(config));
    if (evaluate->parsed()) print(dpsn::cmd_evaluate(config, as_paths(extra)));
    if (rank->parsed()) print(dpsn::cmd_rank(config, as_paths(extra)));
    if (stats->parsed()) print(dpsn::cmd_stats(config, as_paths(extra)));
    if (report->parsed()) print(dpsn::cmd_report(config));
    if (run->parsed())
      for (const auto& r : dpsn::run_pipeline(config)) print(r);
  } catch (const dpsn::MissingFileError& e) {
    std::cerr << "error: missing file: " << e.path() << "\n";
    return 2;
  } catch (const dpsn::DependencyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
