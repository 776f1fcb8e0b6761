#include <algorithm>
#include <map>
#include <sstream>

#include "dpsn/error.hpp"
#include "dpsn/evaluation.hpp"
#include "dpsn/rng.hpp"

namespace dpsn {

std::optional<int> FoldAssignment::fold_of(const std::string& id) const {
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return fold[i];
  return std::nullopt;
}

FoldAssignment stratified_folds(const std::vector<std::string>& ids, const std::vector<std::string>& labels,
                                int folds, std::uint64_t seed) {
  if (ids.size() != labels.size()) throw PreconditionError("ids and labels differ in length");
  if (folds < 2) throw PreconditionError("need at least 2 folds");
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  for (const auto& [label, idx] : members)
    if (static_cast<int>(idx.size()) < folds)
      throw StratificationError("class '" + label + "' has " + std::to_string(idx.size()) +
                                " members, fewer than " + std::to_string(folds) + " folds");

  FoldAssignment out;
  out.ids = ids;
  out.fold.assign(ids.size(), -1);
  out.folds = folds;
  out.seed = seed;
  SplitMix64 rng(seed);
  int next = 0;
  for (auto& [label, idx] : members) {
    shuffle(idx, rng);
    for (std::size_t i : idx) {
      out.fold[i] = next;
      next = (next + 1) % folds;
    }
  }
  return out;
}

std::string write_folds_file(const FoldAssignment& folds) {
  std::vector<std::size_t> order(folds.ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return folds.ids[a] < folds.ids[b]; });
  std::string out = "domain_id,fold\n";
  for (auto i : order) out += folds.ids[i] + "," + std::to_string(folds.fold[i]) + "\n";
  return out;
}

FoldAssignment read_folds_file(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "domain_id,fold") throw ParseError(1, "folds file header");
  FoldAssignment out;
  int max_fold = -1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw ParseError(line_no, "expected domain_id,fold");
    out.ids.push_back(line.substr(0, comma));
    try {
      out.fold.push_back(std::stoi(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad fold index");
    }
    max_fold = std::max(max_fold, out.fold.back());
  }
  out.folds = max_fold + 1;
  return out;
}

}  // namespace dpsn
