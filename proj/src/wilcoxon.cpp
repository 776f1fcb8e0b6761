#include <algorithm>
#include <cmath>
#include <numeric>

#include "dpsn/error.hpp"
#include "dpsn/evaluation.hpp"

namespace dpsn {
namespace {

constexpr double kZeroTolerance = 1e-12;
constexpr std::size_t kExactLimit = 25;

}  // namespace

StatResult wilcoxon_one_sided(const std::vector<double>& x, const std::vector<double>& y, std::size_t comparisons) {
  if (x.size() != y.size()) throw PreconditionError("paired samples differ in length");
  if (x.size() < 5) throw PreconditionError("Wilcoxon test needs at least 5 pairs");
  if (comparisons < 1) throw PreconditionError("comparisons must be >= 1");

  StatResult res;
  std::vector<double> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (std::abs(d) <= kZeroTolerance)
      ++res.zeros_discarded;
    else
      diffs.push_back(d);
  }
  res.n_effective = diffs.size();
  if (diffs.empty()) {
    res.undefined = true;
    return res;
  }

  // Average ranks of |d|, kept doubled so they stay integral.
  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::abs(diffs[a]) < std::abs(diffs[b]); });
  std::vector<long> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(std::abs(diffs[order[j + 1]]) - std::abs(diffs[order[i]])) <= kZeroTolerance) ++j;
    const long doubled = static_cast<long>(i + j + 2);  // 2 * average of (i+1 .. j+1)
    for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = doubled;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  long w2 = 0;  // doubled W+
  for (std::size_t i = 0; i < n; ++i)
    if (diffs[i] > 0) w2 += rank2[i];

  if (n <= kExactLimit) {
    // Null distribution of doubled W+ over all 2^n sign assignments.
    const long total2 = std::accumulate(rank2.begin(), rank2.end(), 0L);
    std::vector<double> ways(static_cast<std::size_t>(total2) + 1, 0.0);
    ways[0] = 1.0;
    long reach = 0;
    for (long r : rank2) {
      for (long s = reach; s >= 0; --s)
        if (ways[s] != 0.0) ways[s + r] += ways[s];
      reach += r;
    }
    double below = 0.0;
    for (long s = 0; s <= w2; ++s) below += ways[s];
    res.p = below / std::ldexp(1.0, static_cast<int>(n));
    res.exact = true;
  } else {
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double z = (0.5 * static_cast<double>(w2) - mean + 0.5) / std::sqrt(var);
    res.p = 0.5 * std::erfc(-z / std::sqrt(2.0));
  }
  res.p = std::min(1.0, res.p);
  res.q = std::min(1.0, res.p * static_cast<double>(comparisons));
  return res;
}

}  // namespace dpsn
