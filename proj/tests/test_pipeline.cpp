#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include <doctest.h>
#include <json.hpp>

#include "dpsn/error.hpp"
#include "dpsn/evaluation.hpp"
#include "dpsn/formats.hpp"
#include "dpsn/pipeline.hpp"
#include "helpers.hpp"

using namespace dpsn;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(DPSN_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig small_config(const std::string& name) {
  const auto dir = testing::scratch(name);
  SyntheticSpec spec;
  spec.per_class = 10;
  spec.class_floor = 10;
  spec.max_length = 50;
  RunConfig c;
  c.corpus = cmd_synth(spec, dir);
  c.out = dir / "out";
  c.min_class_size = 10;
  c.inner_folds = 3;
  c.l2_grid = {0.01, 1.0};
  return c;
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("config JSON round-trips; validation rejects out-of-range fields") {
    RunConfig c;
    c.max_gap = 3;
    c.correlation = CorrelationKind::kPearson;
    c.pca_scope = PcaScope::kTrainingFolds;
    c.limits.rule = ExtensionRule::kPrefix;
    const auto back = RunConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    CHECK_NOTHROW(c.validate());
    for (auto mutate : std::vector<std::function<void(RunConfig&)>>{
             [](RunConfig& r) { r.k = 0; }, [](RunConfig& r) { r.threshold = -1; },
             [](RunConfig& r) { r.limits.max_nodes = 6; }, [](RunConfig& r) { r.pca_retain = 1.5; },
             [](RunConfig& r) { r.folds = 1; }, [](RunConfig& r) { r.relaxed_threshold = -0.1; },
             [](RunConfig& r) { r.l2_grid = {0.0}; }, [](RunConfig& r) { r.dataset_id = "a,b"; }}) {
      RunConfig bad;
      mutate(bad);
      CHECK_THROWS_AS(bad.validate(), PreconditionError);
    }
  }

  TEST_CASE("stage hashes are cumulative") {
    RunConfig a, b;
    b.relaxed_threshold = 0.05;
    CHECK(stage_config_hash(a, "featurize") == stage_config_hash(b, "featurize"));
    CHECK(stage_config_hash(a, "rank") != stage_config_hash(b, "rank"));
    b = a;
    b.seed = 8;
    CHECK(stage_config_hash(a, "report") != stage_config_hash(b, "report"));
    CHECK_THROWS(stage_config_hash(a, "nope"));
  }

  TEST_CASE("stages refuse missing or stale upstream outputs") {
    auto c = small_config("deps");
    try {
      cmd_count(c);
      FAIL("expected DependencyError");
    } catch (const DependencyError& e) {
      CHECK(std::string(e.what()).find("'build'") != std::string::npos);
    }
    cmd_build(c);
    auto changed = c;
    changed.k = 4;
    CHECK_THROWS_AS(cmd_count(changed), DependencyError);
    CHECK_NOTHROW(cmd_count(c));
    CHECK_THROWS_AS(cmd_train_lr(c), DependencyError);
  }

  TEST_CASE("disconnected domains are dropped and named") {
    const auto dir = testing::scratch("disconnected");
    std::vector<ProteinDomain> corpus;
    for (int i = 0; i < 6; ++i) corpus.push_back(testing::collinear("a" + std::to_string(i), 35, 3.8, "a"));
    for (int i = 0; i < 6; ++i) corpus.push_back(testing::collinear("b" + std::to_string(i), 40, 3.8, "b"));
    corpus.push_back(testing::collinear("gappy", 40, 6.5, "b"));
    write_text_file_atomic(dir / "c.jsonl", write_canonical_corpus(corpus));
    RunConfig c;
    c.corpus = dir / "c.jsonl";
    c.out = dir / "out";
    c.min_class_size = 5;
    testing::WarnCapture warn;
    cmd_build(c);
    CHECK(warn.mentions("gappy"));
    const auto labels = read_text_file(c.out / "labels.csv");
    CHECK(labels.find("gappy") == std::string::npos);
    CHECK(count_lines(labels) == 13);
  }

  TEST_CASE("full run on a small corpus, and external predictions") {
    auto c = small_config("full");
    run_pipeline(c);
    for (const char* f : {"domains.jsonl", "labels.csv", "folds.csv", "orbits.txt", "features/dynamic.feat",
                          "features/static.pca", "predictions/dyn_graphlets_lr.csv", "results.csv", "ranks.csv",
                          "rank_summary.csv", "stats.csv", "qvalues.csv", "report/misclassification.svg",
                          "report/rank1_strict.svg", "report/runtime.svg", "run_metadata.json"})
      CHECK_MESSAGE(fs::exists(c.out / f), f);

    // Three methods: 3 x 3 q-value table plus header.
    const auto q = read_text_file(c.out / "qvalues.csv");
    CHECK(count_lines(q) == 4);
    CHECK(q.starts_with("method,dyn_graphlets_lr,majority_baseline,static_graphlets_lr\n"));
    const auto svg = read_text_file(c.out / "report/misclassification.svg");
    CHECK(svg.find("<!-- data") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);

    const auto meta = nlohmann::json::parse(read_text_file(c.out / "run_metadata.json"));
    CHECK(meta["config"] == c.to_json());
    CHECK(meta["stage_seconds"].size() == 8);

    // A predictions file from elsewhere (same format) is treated like an internal one.
    auto external = read_predictions_file(read_text_file(c.out / "predictions/static_graphlets_lr.csv")).front();
    external.method_id = "outside_model";
    for (auto& r : external.rows) r.predicted_label = r.true_label;
    write_text_file_atomic(c.out.parent_path() / "outside.csv", write_predictions_file(external));
    cmd_evaluate(c, {c.out.parent_path() / "outside.csv"});
    const auto results = read_text_file(c.out / "results.csv");
    CHECK(results.find("dataset,outside_model,0,0,30\n") != std::string::npos);
    cmd_rank(c);
    cmd_stats(c);
    CHECK(count_lines(read_text_file(c.out / "qvalues.csv")) == 5);
    CHECK_THROWS_AS(cmd_evaluate(c, {c.out / "missing.csv"}), MissingFileError);
  }

  TEST_CASE("SVG charts embed their data") {
    const auto bar = svg_bar_chart("t", {"a", "b"}, {"s1", "s2"}, {{1, 2}, {3, 4}}, "y", true);
    CHECK(bar.find("a,1,3") != std::string::npos);
    const auto box = svg_box_chart("t", {"m"}, {{0.1, 0.2, 0.3}}, "rate");
    CHECK(box.find("m,0.20000000000000001") != std::string::npos);
    CHECK_THROWS(svg_bar_chart("t", {"a"}, {"s"}, {{1, 2}}, "y"));
  }

  TEST_CASE("CLI exit codes") {
    const auto dir = testing::scratch("cli");
    std::ofstream(dir / "m.json") << R"([{"id":"x","label":"y","pdb":"absent.pdb","chain":"A"}])";
    CHECK(run_cli("build --corpus " + (dir / "m.json").string() + " --out " + (dir / "o").string(), dir / "log1") == 2);
    CHECK(read_text_file(dir / "log1").find("absent.pdb") != std::string::npos);
    CHECK(run_cli("count --out " + (dir / "o2").string(), dir / "log2") == 3);
    CHECK(run_cli("build --config " + (dir / "none.json").string(), dir / "log3") == 2);
    CHECK(run_cli("oracle", dir / "log4") == 0);
    CHECK(read_text_file(dir / "log4").find("PASS orbits(4,6) == 3727") != std::string::npos);
    CHECK(run_cli("oracle --inject-fault", dir / "log5") == 1);
    CHECK(read_text_file(dir / "log5").find("counterexample") != std::string::npos);
    CHECK(run_cli("oracle --max-events 8", dir / "log6") == 1);
  }

  TEST_CASE("config file with flag overrides") {
    auto c = small_config("cli_config");
    auto j = c.to_json();
    j["seed"] = 11;
    std::ofstream(c.out.parent_path() / "run.json") << j.dump();
    const auto log = c.out.parent_path() / "log";
    REQUIRE(run_cli("build --config " + (c.out.parent_path() / "run.json").string() + " --seed 12", log) == 0);
    const auto meta = nlohmann::json::parse(read_text_file(c.out / "run_metadata.json"));
    CHECK(meta["config"]["seed"] == 12);
    CHECK(meta["config"]["min_class_size"] == 10);
  }
}
