#include <doctest.h>

#include "helpers.hpp"
#include "xdr/error.hpp"
#include "xdr/phase_synth.hpp"
#include "xdr/rng.hpp"

using namespace xdr;

namespace {

RealImage random_magnitude(int h, int w, std::uint64_t seed) {
  Rng rng(seed);
  RealImage img(h, w);
  for (auto& v : img.v) v = static_cast<float>(rng.uniform());
  return img;
}

double mean_abs_forward_diff(const std::vector<double>& phi, int h, int w) {
  double acc = 0.0;
  size_t count = 0;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c + 1 < w; ++c, ++count)
      acc += std::fabs(phi[r * w + c + 1] - phi[r * w + c]);
  for (int r = 0; r + 1 < h; ++r)
    for (int c = 0; c < w; ++c, ++count)
      acc += std::fabs(phi[(r + 1) * w + c] - phi[r * w + c]);
  return acc / static_cast<double>(count);
}

} // namespace

TEST_CASE("magnitude is preserved to float precision") {
  PhaseParams params;
  params.seed = 5;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const RealImage mag = random_magnitude(48, 40, seed);
    const ComplexImage out = synthesize_phase(mag, params);
    for (size_t i = 0; i < mag.v.size(); ++i) {
      const double m = std::hypot(static_cast<double>(out.real[i]), out.imag[i]);
      CHECK(std::fabs(m - mag.v[i]) <= 1e-6);
    }
  }
}

TEST_CASE("tiny phase range leaves the imaginary plane near zero") {
  PhaseParams params;
  params.phase_range = 1e-6;
  params.seed = 9;
  const RealImage mag = random_magnitude(32, 32, 7);
  const ComplexImage out = synthesize_phase(mag, params);
  for (size_t i = 0; i < mag.v.size(); ++i)
    CHECK(std::fabs(out.imag[i]) <= 2e-6 * mag.v[i] + 1e-12);
}

TEST_CASE("same magnitude and params give bit-identical output") {
  PhaseParams params;
  params.seed = 123;
  const RealImage mag = random_magnitude(32, 32, 11);
  const ComplexImage a = synthesize_phase(mag, params);
  const ComplexImage b = synthesize_phase(mag, params);
  CHECK(a.real == b.real);
  CHECK(a.imag == b.imag);
}

TEST_CASE("phase stays within the configured range") {
  PhaseParams params;
  params.phase_range = 0.5;
  params.seed = 77;
  const auto phi = phase_field(40, 40, params);
  for (double p : phi) {
    CHECK(p >= -0.5);
    CHECK(p <= 0.5);
  }
  // rescale touches both ends
  CHECK(*std::min_element(phi.begin(), phi.end()) == doctest::Approx(-0.5));
  CHECK(*std::max_element(phi.begin(), phi.end()) == doctest::Approx(0.5));
}

// Reference values from tests/oracles/phase_smoothness.py (numpy pipeline
// with the same RNG): 10-seed means on 256x256, phase_range = pi.
TEST_CASE("phase smoothness matches the reference and is monotone in sigma") {
  auto mean_over_seeds = [](double sigma) {
    double acc = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      PhaseParams p;
      p.smoothness_sigma = sigma;
      p.seed = seed;
      acc += mean_abs_forward_diff(phase_field(256, 256, p), 256, 256);
    }
    return acc / 10.0;
  };
  const double s2 = mean_over_seeds(2.0);
  const double s8 = mean_over_seeds(8.0);
  const double s16 = mean_over_seeds(16.0);
  CHECK(s16 == doctest::Approx(0.041294055210).epsilon(1e-6));
  CHECK(s16 < M_PI / 8.0);
  CHECK(s16 < s8);
  CHECK(s8 < s2);
}

TEST_CASE("invalid inputs are rejected") {
  PhaseParams params;
  RealImage mag(8, 8);
  mag.v[3] = 1.5f; // out of [0, 1]
  CHECK_THROWS_AS(synthesize_phase(mag, params), ValidationError);
  mag.v[3] = -0.1f;
  CHECK_THROWS_AS(synthesize_phase(mag, params), ValidationError);

  PhaseParams bad;
  bad.smoothness_sigma = 0.0;
  CHECK_THROWS_AS(phase_field(8, 8, bad), ValidationError);
  bad = PhaseParams{};
  bad.phase_range = 4.0; // > pi
  CHECK_THROWS_AS(phase_field(8, 8, bad), ValidationError);
}
