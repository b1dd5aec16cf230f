#include <doctest.h>

#include "xdr/error.hpp"
#include "xdr/rng.hpp"
#include "xdr/stats.hpp"

using namespace xdr;

TEST_CASE("all-zero differences give p = 1") {
  const TestResult r = wilcoxon_signed_rank(std::vector<double>(20, 0.0));
  CHECK(r.p_value == 1.0);
  CHECK(r.n_used == 0);
}

TEST_CASE("uniformly shifted differences are extremal") {
  std::vector<double> diffs(1000, -0.5); // distances_b = distances_a + 0.5
  const TestResult r = wilcoxon_signed_rank(diffs);
  CHECK(r.p_value < 1e-10);
  CHECK(r.statistic == 0.0); // no positive differences
}

TEST_CASE("exact small-sample values match the published distribution") {
  // n = 5, W+ = 15 (all positive): two-sided exact p = 2/32
  const TestResult all_pos = wilcoxon_signed_rank({1, 2, 3, 4, 5});
  CHECK(all_pos.statistic == 15.0);
  CHECK(all_pos.p_value == doctest::Approx(2.0 / 32.0));

  // symmetric balanced case stays insignificant
  const TestResult mixed = wilcoxon_signed_rank({1, -2, 3, -4, 5, -6});
  CHECK(mixed.p_value > 0.5);
  CHECK(mixed.p_value <= 1.0);
}

TEST_CASE("exact p is invariant under positive scaling of the differences") {
  Rng rng(3);
  std::vector<double> diffs(40);
  for (auto& d : diffs) d = rng.gaussian() + 0.3;
  const TestResult exact = wilcoxon_signed_rank(diffs);
  std::vector<double> scaled = diffs;
  for (auto& d : scaled) d *= 1.0 + 1e-9; // no change in ranks or signs
  CHECK(wilcoxon_signed_rank(scaled).p_value == doctest::Approx(exact.p_value));
  CHECK(exact.p_value > 0.0);
  CHECK(exact.p_value <= 1.0);
}

TEST_CASE("ties fall back to the corrected normal approximation") {
  std::vector<double> diffs = {1, 1, 1, -1, -1, 2, 2, -2, 3, 3, 3, 3};
  const TestResult r = wilcoxon_signed_rank(diffs);
  CHECK(r.p_value > 0.0);
  CHECK(r.p_value <= 1.0);
}

TEST_CASE("mann-whitney separates shifted samples and rejects empty input") {
  Rng rng(4);
  std::vector<double> a(200), b(200);
  for (auto& v : a) v = rng.gaussian();
  for (auto& v : b) v = rng.gaussian() + 2.0;
  CHECK(mann_whitney_u(a, b).p_value < 1e-10);

  std::vector<double> same_a(a.begin(), a.begin() + 100);
  std::vector<double> same_b(a.begin() + 100, a.end());
  CHECK(mann_whitney_u(same_a, same_b).p_value > 0.01);

  CHECK_THROWS_AS(mann_whitney_u({}, {1.0}), ValidationError);
}

TEST_CASE("normal_sf sanity") {
  CHECK(normal_sf(0.0) == doctest::Approx(0.5));
  CHECK(normal_sf(1.959963985) == doctest::Approx(0.025).epsilon(1e-6));
  CHECK(normal_sf(-1.959963985) == doctest::Approx(0.975).epsilon(1e-6));
}
