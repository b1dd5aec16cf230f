#pragma once

#include <vector>

namespace xdr {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_used = 0; // pairs after dropping zero differences
};

// Two-sided Wilcoxon signed-rank test on paired differences. Zero
// differences are dropped (if all are dropped, p = 1). Uses the exact
// null distribution for n <= 50 without ties in |d|, otherwise the normal
// approximation with midranks, tie correction and continuity correction.
TestResult wilcoxon_signed_rank(const std::vector<double>& diffs);

// Two-sided Mann-Whitney U test on two independent samples, normal
// approximation with tie correction.
TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

// Standard normal survival function, 1 - Phi(z).
double normal_sf(double z);

} // namespace xdr
