// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: dpsn_acceptance <work-dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "dpsn/error.hpp"
#include "dpsn/evaluation.hpp"
#include "dpsn/features.hpp"
#include "dpsn/formats.hpp"
#include "dpsn/graphlets.hpp"
#include "dpsn/log.hpp"
#include "dpsn/logreg.hpp"
#include "dpsn/pipeline.hpp"
#include "dpsn/psn.hpp"
#include "dpsn/rng.hpp"

using namespace dpsn;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// Collects failed checks for one criterion.
struct Checks {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome run(const std::function<std::string(Checks&)>& body) {
  Checks c;
  std::string detail;
  try {
    detail = body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  if (!c.failures.empty()) {
    detail += detail.empty() ? "" : "; ";
    for (std::size_t i = 0; i < c.failures.size(); ++i) detail += (i ? "; " : "") + c.failures[i];
  }
  return {c.failures.empty(), detail};
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// Files under `root` (relative paths), skipping run-to-run timing records.
std::set<fs::path> artifact_files(const fs::path& root) {
  std::set<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root);
    const std::string name = rel.filename().string();
    if (name == "run_metadata.json" || name.find("runtime") != std::string::npos) continue;
    out.insert(rel);
  }
  return out;
}

std::string compare_trees(const fs::path& a, const fs::path& b, std::size_t& compared) {
  const auto fa = artifact_files(a), fb = artifact_files(b);
  if (fa != fb) return "file sets differ";
  compared = 0;
  for (const auto& rel : fa) {
    if (read_text_file(a / rel) != read_text_file(b / rel)) return "differs: " + rel.string();
    ++compared;
  }
  return {};
}

double result_rate(const fs::path& results, const std::string& method) {
  std::istringstream in(read_text_file(results));
  std::string line;
  while (std::getline(in, line)) {
    if (line.starts_with("#")) break;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    if (f.size() == 5 && f[1] == method) return std::stod(f[2]);
  }
  throw Error("no result for " + method);
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "dpsn_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  log::set_sink([](log::Level, const std::string&) {});

  // The seeded synthetic corpus (3 classes x 30 domains) and two full runs.
  const fs::path corpus = cmd_synth(SyntheticSpec{}, work);
  RunConfig config;
  config.corpus = corpus;
  config.dataset_id = "synthetic";
  std::vector<double> run_seconds;
  std::string pipeline_error;
  for (const char* name : {"run_a", "run_b"}) {
    config.out = work / name;
    const auto t = Clock::now();
    try {
      run_pipeline(config);
    } catch (const std::exception& e) {
      pipeline_error = e.what();
    }
    run_seconds.push_back(since(t));
  }
  const fs::path run_a = work / "run_a", run_b = work / "run_b";
  config.out = run_a;

  std::vector<std::pair<std::string, Outcome>> rows;

  rows.emplace_back("orbit catalogue", run([](Checks& c) {
    const auto t = Clock::now();
    const auto table = DynamicOrbitTable::enumerate({4, 6});
    const double s = since(t);
    c.expect(table.total_orbits() == 3727, "orbits(4,6) = " + std::to_string(table.total_orbits()));
    c.expect(s < 300.0, "enumeration took " + fmt(s) + " s");
    return "orbits(4,6) = " + std::to_string(table.total_orbits()) + " in " + fmt(s, 3) + " s";
  }));

  rows.emplace_back("counting vs brute force", run([](Checks& c) {
    const auto t = Clock::now();
    const auto table = DynamicOrbitTable::enumerate({4, 6});
    SplitMix64 rng(2024);
    int random_ok = 0;
    for (int i = 0; i < 60; ++i) {
      const int nodes = 2 + static_cast<int>(rng.below(11));
      const int events = 1 + static_cast<int>(rng.below(20));
      const auto s = random_stream(rng.next(), nodes, events, 1 + static_cast<int>(rng.below(6)));
      if (count_dynamic_orbits(s, table).counts == brute_force_count(s, table).counts)
        ++random_ok;
      else
        c.expect(false, "random stream " + s.id + " differs");
    }
    // PSN streams of the corpus domains cut to their first 15 residues.
    int psn_ok = 0, psn_total = 0;
    std::size_t longest = 0;
    BruteForceOptions guard;
    guard.max_stream_events = 64;
    for (auto d : generate_synthetic_corpus(SyntheticSpec{})) {
      d.residues.resize(std::min<std::size_t>(d.residues.size(), 15));
      const auto s = derive_event_stream(build_dynamic_psn(d, 5), d.id);
      longest = std::max(longest, s.events.size());
      ++psn_total;
      if (count_dynamic_orbits(s, table).counts == brute_force_count(s, table, guard).counts)
        ++psn_ok;
      else
        c.expect(false, "PSN stream " + d.id + " differs");
    }
    const double secs = since(t);
    c.expect(secs < 600.0, "took " + fmt(secs) + " s");
    return std::to_string(random_ok) + "/60 random streams, " + std::to_string(psn_ok) + "/" +
           std::to_string(psn_total) + " PSN streams (n = 15, up to " + std::to_string(longest) + " events) in " +
           fmt(secs, 3) + " s";
  }));

  rows.emplace_back("feature pipeline", run([&](Checks& c) {
    if (!pipeline_error.empty()) throw Error("pipeline: " + pipeline_error);
    c.expect(flatten_upper(Eigen::MatrixXd::Identity(211, 211)).size() == 22155, "c = 211 length");
    std::string detail;
    for (const char* kind : {"dynamic", "static"}) {
      const auto filter = read_column_filter(read_text_file(run_a / "features" / (std::string(kind) + ".cols")));
      const std::size_t cols = filter.kept.size();
      const auto pca = read_pca_file(read_text_file(run_a / "features" / (std::string(kind) + ".pca")));
      c.expect(pca.components.cols() == static_cast<Eigen::Index>(cols * (cols - 1) / 2),
               std::string(kind) + ": PCA input width is not c(c-1)/2");
      c.expect(pca.retained() >= 0.90 - 1e-12, std::string(kind) + ": retained " + fmt(pca.retained()));
      if (pca.d > 1)
        c.expect(pca.explained_ratio.head(pca.d - 1).sum() < 0.90, std::string(kind) + ": d not minimal");
      detail += std::string(kind) + " c = " + std::to_string(cols) + ", d = " + std::to_string(pca.d) + " (" +
                fmt(100 * pca.retained(), 4) + "%); ";
    }
    // GCM symmetry and diagonal on every domain.
    const auto filter = read_column_filter(read_text_file(run_a / "features" / "dynamic.cols"));
    double worst = 0.0;
    std::size_t domains = 0;
    for (const auto& e : fs::directory_iterator(run_a / "dgdvm")) {
      const auto g = read_gdvm_file(read_text_file(e.path()));
      const auto gcm = compute_gcm(apply_column_filter(g, filter));
      worst = std::max(worst, (gcm - gcm.transpose()).cwiseAbs().maxCoeff());
      worst = std::max(worst, (gcm.diagonal().array() - 1.0).abs().maxCoeff());
      const auto flat = flatten_upper(gcm);
      c.expect(static_cast<std::size_t>(flat.size()) == filter.kept.size() * (filter.kept.size() - 1) / 2,
               "flattened length");
      ++domains;
    }
    c.expect(domains == 90, "expected 90 domains, got " + std::to_string(domains));
    c.expect(worst <= 1e-12, "GCM symmetry/diagonal error " + fmt(worst));
    for (const char* f : {"features/dynamic.feat", "features/dynamic.pca", "features/dynamic.cols",
                          "features/static.feat", "features/static.pca", "features/static.cols"})
      c.expect(read_text_file(run_a / f) == read_text_file(run_b / f), std::string("rerun differs: ") + f);
    return detail + "GCM error " + fmt(worst, 3) + "; rerun byte-identical";
  }));

  rows.emplace_back("LR end-to-end", run([&](Checks& c) {
    if (!pipeline_error.empty()) throw Error("pipeline: " + pipeline_error);
    const double dyn = result_rate(run_a / "results.csv", "dyn_graphlets_lr");
    const double base = result_rate(run_a / "results.csv", "majority_baseline");
    c.expect(dyn <= 0.10, "dynamic LR aggregate " + fmt(dyn));
    c.expect(std::abs(base - 2.0 / 3.0) < 1e-12, "majority baseline " + fmt(base));
    c.expect(run_seconds[0] <= 1800.0, "full run took " + fmt(run_seconds[0]) + " s");
    return "dynamic LR " + fmt(dyn) + " vs majority " + fmt(base) + "; full run " + fmt(run_seconds[0], 3) + " s";
  }));

  rows.emplace_back("dynamic vs static ordering", run([&](Checks& c) {
    if (!pipeline_error.empty()) throw Error("pipeline: " + pipeline_error);
    const double dyn = result_rate(run_a / "results.csv", "dyn_graphlets_lr");
    const double stat = result_rate(run_a / "results.csv", "static_graphlets_lr");
    c.expect(dyn <= stat + 0.02, "dynamic " + fmt(dyn) + " > static " + fmt(stat) + " + 0.02");
    return "dynamic " + fmt(dyn) + " <= static " + fmt(stat) + " + 0.02";
  }));

  rows.emplace_back("evaluation protocol", run([](Checks& c) {
    const auto strict = rank_methods({{"d", {{"A", 0.1}, {"B", 0.1}, {"C", 0.2}}}}, RankPolicy::kStrict);
    c.expect(strict.ranks[0].at("A") == 1 && strict.ranks[0].at("B") == 1 && strict.ranks[0].at("C") == 3,
             "competition ranks");
    const auto relaxed = rank_methods({{"d", {{"A", 0.070}, {"B", 0.088}}}}, RankPolicy::kRelaxed, 0.02);
    c.expect(relaxed.ranks[0].at("A") == 1 && relaxed.ranks[0].at("B") == 1, "relaxed tie at 0.018");

    // Aggregate = fold-size-weighted mean of per-fold rates (13 domains, 5 folds).
    std::vector<std::string> ids, labels;
    for (int i = 0; i < 13; ++i) ids.push_back("d" + std::to_string(i)), labels.push_back("a");
    const auto folds = stratified_folds(ids, labels, 5, 3);
    PredictionSet p{"m", "ds", {}, 0};
    for (std::size_t i = 0; i < ids.size(); ++i)
      p.rows.push_back({ids[i], folds.fold[i], "a", i % 4 == 1 ? "b" : "a", {}});
    const auto m = misclassification(p, &folds);
    double weighted = 0;
    for (std::size_t k = 0; k < m.per_fold.size(); ++k) weighted += m.per_fold[k] * static_cast<double>(m.fold_sizes[k]);
    c.expect(std::abs(weighted / 13.0 - m.aggregate) < 1e-15, "fold-weighted identity");

    // Eight uniform wins: exact p = 2^-8, also by listing all 2^8 sign patterns.
    std::vector<double> x(8), y(8);
    for (int i = 0; i < 8; ++i) x[i] = 0.1 * i, y[i] = 0.1 * i + 0.01 * (i + 1);
    const auto w = wilcoxon_one_sided(x, y, 1);
    int hits = 0;
    for (int mask = 0; mask < 256; ++mask) {
      int wplus = 0;
      for (int i = 0; i < 8; ++i)
        if (mask >> i & 1) wplus += i + 1;
      if (wplus <= 0) ++hits;
    }
    c.expect(w.exact && w.p == 0.00390625, "exact p = " + fmt(w.p, 17));
    c.expect(std::abs(w.p - hits / 256.0) <= 1e-12, "enumeration mismatch");

    // p just under 0.04 with 28 comparisons caps q at 1.
    const auto b = wilcoxon_one_sided({9, 8, 7, 6, 15, 4, 3, 2}, std::vector<double>(8, 10.0), 28);
    c.expect(b.p == 10.0 / 256.0 && b.q == 1.0, "Bonferroni cap");
    return "ranks {1,1,3}; relaxed tie; weighted identity; p = 2^-8; q capped at 1";
  }));

  rows.emplace_back("LR numerics", run([](Checks& c) {
    double worst_rel = 0.0;
    std::size_t iterations = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      SplitMix64 rng(seed * 7919);
      const int n = 8 + static_cast<int>(rng.below(20)), d = 1 + static_cast<int>(rng.below(6));
      Eigen::MatrixXd x(n, d);
      Eigen::VectorXd y(n), w(d);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) x(i, j) = rng.normal();
        y[i] = i < 2 ? i : static_cast<double>(rng.below(2));
      }
      for (int j = 0; j < d; ++j) w[j] = rng.normal();
      const double bias = rng.normal(), l2 = std::pow(10.0, rng.uniform(-3, 1));
      const Eigen::VectorXd g = lr_gradient(x, y, w, bias, l2);
      Eigen::VectorXd num(d + 1);
      const double h = 1e-6;
      for (int j = 0; j <= d; ++j) {
        Eigen::VectorXd up = w, down = w;
        double bu = bias, bd = bias;
        if (j < d) up[j] += h, down[j] -= h;
        else bu += h, bd -= h;
        num[j] = (lr_objective(x, y, up, bu, l2) - lr_objective(x, y, down, bd, l2)) / (2 * h);
      }
      worst_rel = std::max(worst_rel, (g - num).norm() / std::max(1e-12, num.norm()));

      std::vector<double> trace;
      LRTrainOptions opts;
      opts.objective_trace = &trace;
      train_binary(x, y, l2, opts);
      iterations += trace.size();
      for (std::size_t i = 1; i < trace.size(); ++i)
        c.expect(trace[i] <= trace[i - 1], "objective rose at seed " + std::to_string(seed));
    }
    c.expect(worst_rel <= 1e-5, "gradient relative error " + fmt(worst_rel));
    return "max gradient relative error " + fmt(worst_rel, 3) + " over 20 instances; " + std::to_string(iterations) +
           " monotone iterations";
  }));

  rows.emplace_back("determinism", run([&](Checks& c) {
    if (!pipeline_error.empty()) throw Error("pipeline: " + pipeline_error);
    std::size_t compared = 0;
    const auto diff = compare_trees(run_a, run_b, compared);
    c.expect(diff.empty(), diff);
    c.expect(compared > 300, "only " + std::to_string(compared) + " files compared");
    return std::to_string(compared) + " artifacts byte-identical across two full runs";
  }));

  bool all = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [name, o] = rows[i];
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " (" << name << "): " << o.detail << "\n";
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
