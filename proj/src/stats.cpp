#include "xdr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xdr/error.hpp"

namespace xdr {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

namespace {

// Midranks of |values|; also reports tie group sizes and whether any tie
// exists.
struct Ranked {
  std::vector<double> ranks;
  std::vector<std::size_t> tie_sizes;
  bool has_ties = false;
};

Ranked midrank(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  Ranked out;
  out.ranks.resize(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = rank;
    out.tie_sizes.push_back(j - i + 1);
    if (j > i) out.has_ties = true;
    i = j + 1;
  }
  return out;
}

// Exact two-sided p-value for the signed-rank statistic with integer ranks
// 1..n and no ties: P(W <= w) from the subset-sum count table, doubled and
// capped. The null distribution is symmetric about n(n+1)/4.
double exact_signed_rank_p(double w_plus, std::size_t n) {
  const std::size_t max_w = n * (n + 1) / 2;
  std::vector<double> counts(max_w + 1, 0.0);
  counts[0] = 1.0;
  for (std::size_t r = 1; r <= n; ++r)
    for (std::size_t w = max_w; w >= r; --w) counts[w] += counts[w - r];

  const double total = std::pow(2.0, static_cast<double>(n));
  const double w = w_plus;
  const double w_low = std::min(w, static_cast<double>(max_w) - w);
  double cum = 0.0;
  for (std::size_t i = 0; i <= static_cast<std::size_t>(w_low + 0.5) && i <= max_w; ++i)
    cum += counts[i];
  return std::min(1.0, 2.0 * cum / total);
}

} // namespace

TestResult wilcoxon_signed_rank(const std::vector<double>& diffs) {
  std::vector<double> abs_d;
  std::vector<int> signs;
  abs_d.reserve(diffs.size());
  for (double d : diffs) {
    if (!std::isfinite(d)) throw ValidationError("wilcoxon: non-finite difference");
    if (d == 0.0) continue;
    abs_d.push_back(std::fabs(d));
    signs.push_back(d > 0.0 ? 1 : -1);
  }
  TestResult res;
  res.n_used = abs_d.size();
  if (abs_d.empty()) {
    res.statistic = 0.0;
    res.p_value = 1.0;
    return res;
  }

  const Ranked ranked = midrank(abs_d);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < abs_d.size(); ++i)
    if (signs[i] > 0) w_plus += ranked.ranks[i];
  res.statistic = w_plus;

  const std::size_t n = abs_d.size();
  if (n <= 50 && !ranked.has_ties) {
    res.p_value = exact_signed_rank_p(w_plus, n);
    return res;
  }

  const double mu = static_cast<double>(n) * (n + 1) / 4.0;
  double var = static_cast<double>(n) * (n + 1) * (2.0 * n + 1) / 24.0;
  for (std::size_t t : ranked.tie_sizes)
    var -= (static_cast<double>(t) * t * t - t) / 48.0;
  if (var <= 0.0) {
    res.p_value = 1.0;
    return res;
  }
  const double num = w_plus - mu;
  const double corrected = std::max(0.0, std::fabs(num) - 0.5);
  res.p_value = std::min(1.0, 2.0 * normal_sf(corrected / std::sqrt(var)));
  return res;
}

TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty())
    throw ValidationError("mann-whitney: empty sample");
  std::vector<double> pooled;
  pooled.reserve(a.size() + b.size());
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  for (double v : pooled)
    if (!std::isfinite(v)) throw ValidationError("mann-whitney: non-finite value");

  const Ranked ranked = midrank(pooled);
  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) rank_sum_a += ranked.ranks[i];

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double u = rank_sum_a - na * (na + 1) / 2.0;

  TestResult res;
  res.statistic = u;
  res.n_used = a.size() + b.size();

  const double mu = na * nb / 2.0;
  double tie_term = 0.0;
  for (std::size_t t : ranked.tie_sizes)
    tie_term += static_cast<double>(t) * t * t - t;
  const double ntot = na + nb;
  const double var =
      na * nb / 12.0 * ((ntot + 1.0) - tie_term / (ntot * (ntot - 1.0)));
  if (var <= 0.0) {
    res.p_value = 1.0;
    return res;
  }
  const double corrected = std::max(0.0, std::fabs(u - mu) - 0.5);
  res.p_value = std::min(1.0, 2.0 * normal_sf(corrected / std::sqrt(var)));
  return res;
}

} // namespace xdr
