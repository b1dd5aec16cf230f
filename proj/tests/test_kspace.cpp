#include <doctest.h>

#include "helpers.hpp"
#include "xdr/data.hpp"
#include "xdr/error.hpp"
#include "xdr/fft.hpp"
#include "xdr/kspace.hpp"
#include "xdr/metrics.hpp"

using namespace xdr;

namespace {

SamplingMask all_mask(int h, int w, bool value) {
  SamplingMask m;
  m.height = h;
  m.width = w;
  m.sampled.assign(static_cast<size_t>(h) * w, value ? 1 : 0);
  m.acceleration = 1.0;
  return m;
}

} // namespace

TEST_CASE("undersample with an all-true mask is the identity pipeline") {
  const ComplexImage gt = test::random_image(32, 32, 4);
  const auto us = undersample(gt, all_mask(32, 32, true));
  CHECK(test::max_abs_diff(us.zero_filled, gt) < 1e-5 * 4.0);
}

TEST_CASE("undersample with an all-false mask is zero") {
  const ComplexImage gt = test::random_image(32, 32, 4);
  const auto us = undersample(gt, all_mask(32, 32, false));
  CHECK(norm2(us.zero_filled) == 0.0);
  CHECK(norm2(us.kspace) == 0.0);
}

TEST_CASE("undersample rejects shape mismatch") {
  const ComplexImage gt = test::random_image(32, 32, 4);
  CHECK_THROWS_AS(undersample(gt, all_mask(16, 32, true)), ValidationError);
}

// Reference value from tests/oracles/zero_filled_psnr.py: the same phantom
// and mask pushed through an independent numpy fft/mask/ifft/psnr pipeline.
TEST_CASE("zero-filled PSNR on the phantom fixture matches the reference") {
  DatasetSpec spec;
  spec.id = "oracle-phantom";
  spec.kind = DatasetKind::Phantom;
  spec.family = PhantomFamily::Ellipses;
  spec.count = 1;
  spec.seed = 11;
  spec.target_height = 128;
  spec.target_width = 128;
  spec.split = Split::Test;
  const Dataset ds = generate_phantoms(spec);
  const SamplingMask mask = generate_mask(128, 128, 4.0, 0.08, 0.25, MaskMode::Lines1D, 7);
  const auto us = undersample(ds.slices[0], mask);
  const double value = psnr(ds.slices[0].magnitude(), us.zero_filled.magnitude());
  CHECK(value == doctest::Approx(27.476069023).epsilon(1e-5));
}

TEST_CASE("hard data consistency pins sampled k-space exactly") {
  const ComplexImage pred = test::random_image(32, 32, 7);
  const ComplexImage gt = test::random_image(32, 32, 8);
  const SamplingMask mask = generate_mask(32, 32, 4.0, 0.08, 0.25, MaskMode::Lines1D, 9);
  const auto us = undersample(gt, mask);

  const ComplexImage out =
      data_consistency(pred, us.kspace, mask, std::numeric_limits<double>::infinity());
  const ComplexImage k_out = fft2c(out);
  const ComplexImage k_pred = fft2c(pred);
  for (size_t i = 0; i < k_out.size(); ++i) {
    if (mask.sampled[i]) {
      CHECK(std::fabs(k_out.real[i] - us.kspace.real[i]) <= 1e-5);
      CHECK(std::fabs(k_out.imag[i] - us.kspace.imag[i]) <= 1e-5);
    } else {
      CHECK(std::fabs(k_out.real[i] - k_pred.real[i]) <= 1e-5);
      CHECK(std::fabs(k_out.imag[i] - k_pred.imag[i]) <= 1e-5);
    }
  }
}

TEST_CASE("lambda 0 returns the prediction unchanged") {
  const ComplexImage pred = test::random_image(16, 16, 3);
  const ComplexImage gt = test::random_image(16, 16, 12);
  const SamplingMask mask = generate_mask(16, 16, 2.0, 0.1, 0.25, MaskMode::Lines1D, 2);
  const auto us = undersample(gt, mask);
  const ComplexImage out = data_consistency(pred, us.kspace, mask, 0.0);
  CHECK(test::max_abs_diff(out, pred) < 1e-5);
}

// 4x4 oracle via the naive DFT: with lambda = 1 the sampled k-space of the
// output must be the arithmetic mean of predicted and measured k-space.
TEST_CASE("lambda 1 averages predicted and measured k-space") {
  const ComplexImage pred = test::random_image(4, 4, 21);
  const ComplexImage gt = test::random_image(4, 4, 22);
  SamplingMask mask = all_mask(4, 4, false);
  mask.sampled[1] = mask.sampled[5] = mask.sampled[10] = mask.sampled[15] = 1;

  ComplexImage k_meas = test::naive_fft2c(gt, false);
  for (size_t i = 0; i < k_meas.size(); ++i)
    if (!mask.sampled[i]) k_meas.real[i] = k_meas.imag[i] = 0.0f;

  const ComplexImage out = data_consistency(pred, k_meas, mask, 1.0);
  const ComplexImage k_out = test::naive_fft2c(out, false);
  const ComplexImage k_pred = test::naive_fft2c(pred, false);
  for (size_t i = 0; i < k_out.size(); ++i) {
    if (mask.sampled[i]) {
      CHECK(k_out.real[i] ==
            doctest::Approx(0.5 * (k_pred.real[i] + k_meas.real[i])).epsilon(1e-4));
      CHECK(k_out.imag[i] ==
            doctest::Approx(0.5 * (k_pred.imag[i] + k_meas.imag[i])).epsilon(1e-4));
    } else {
      CHECK(k_out.real[i] == doctest::Approx(k_pred.real[i]).epsilon(1e-4));
    }
  }
}

TEST_CASE("hard DC is idempotent") {
  const ComplexImage pred = test::random_image(32, 32, 31);
  const ComplexImage gt = test::random_image(32, 32, 32);
  const SamplingMask mask = generate_mask(32, 32, 4.0, 0.08, 0.25, MaskMode::Lines1D, 33);
  const auto us = undersample(gt, mask);
  const double inf = std::numeric_limits<double>::infinity();
  const ComplexImage once = data_consistency(pred, us.kspace, mask, inf);
  const ComplexImage twice = data_consistency(once, us.kspace, mask, inf);
  CHECK(test::max_abs_diff(once, twice) <= 1e-5);
}

TEST_CASE("on-mask output approaches the measurement monotonically in lambda") {
  const ComplexImage pred = test::random_image(16, 16, 41);
  const ComplexImage gt = test::random_image(16, 16, 42);
  const SamplingMask mask = generate_mask(16, 16, 2.0, 0.1, 0.25, MaskMode::Lines1D, 43);
  const auto us = undersample(gt, mask);

  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {0.0, 0.5, 1.0, 4.0, 100.0}) {
    const ComplexImage out = data_consistency(pred, us.kspace, mask, lambda);
    const ComplexImage k_out = fft2c(out);
    double dev = 0.0;
    for (size_t i = 0; i < k_out.size(); ++i) {
      if (!mask.sampled[i]) continue;
      dev += std::hypot(k_out.real[i] - us.kspace.real[i],
                        k_out.imag[i] - us.kspace.imag[i]);
    }
    CHECK(dev <= prev + 1e-6);
    prev = dev;
  }
}

TEST_CASE("negative lambda is rejected") {
  const ComplexImage pred = test::random_image(8, 8, 1);
  const SamplingMask mask = all_mask(8, 8, true);
  CHECK_THROWS_AS(data_consistency(pred, pred, mask, -1.0), ValidationError);
}
