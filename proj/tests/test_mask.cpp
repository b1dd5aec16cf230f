#include <doctest.h>

#include <algorithm>

#include "xdr/error.hpp"
#include "xdr/mask.hpp"

using namespace xdr;

TEST_CASE("256x256 R=4 lines mask: 64 lines, 20-line center, reproducible") {
  const SamplingMask m = generate_mask(256, 256, 4.0, 0.08, 0.25, MaskMode::Lines1D, 7);

  int sampled_lines = 0;
  for (int c = 0; c < 256; ++c) {
    const bool line = m.at(0, c);
    for (int r = 1; r < 256; ++r) CHECK(m.at(r, c) == line); // constant along rows
    sampled_lines += line;
  }
  CHECK(sampled_lines == 64);

  // round(0.08 * 256) = 20 center lines around DC at 128
  for (int c = 118; c < 138; ++c) CHECK(m.at(0, c));

  const SamplingMask again = generate_mask(256, 256, 4.0, 0.08, 0.25, MaskMode::Lines1D, 7);
  CHECK(m.sampled == again.sampled);

  const SamplingMask other = generate_mask(256, 256, 4.0, 0.08, 0.25, MaskMode::Lines1D, 8);
  CHECK(m.sampled != other.sampled);
}

TEST_CASE("sampled fraction stays within the density band") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (double accel : {2.0, 4.0, 8.0}) {
      const SamplingMask m =
          generate_mask(128, 128, accel, 0.05, 0.25, MaskMode::Lines1D, seed);
      const double band = 2.0 / 128.0;
      CHECK(m.fraction() >= 1.0 / accel - band);
      CHECK(m.fraction() <= 1.0 / accel + band);
    }
  }
}

TEST_CASE("acceleration 1 gives an all-true mask") {
  const SamplingMask m = generate_mask(32, 48, 1.0, 0.08, 0.25, MaskMode::Lines1D, 3);
  CHECK(m.count() == m.sampled.size());
}

TEST_CASE("points-2d mode samples the exact budget with a solid center") {
  const SamplingMask m = generate_mask(64, 64, 4.0, 0.1, 0.3, MaskMode::Points2D, 21);
  CHECK(m.count() == 1024); // round(64*64/4)
  // round(0.1*64) = 6 -> 6x6 centered block always on
  for (int r = 29; r < 35; ++r)
    for (int c = 29; c < 35; ++c) CHECK(m.at(r, c));
  const SamplingMask again = generate_mask(64, 64, 4.0, 0.1, 0.3, MaskMode::Points2D, 21);
  CHECK(m.sampled == again.sampled);
}

TEST_CASE("infeasible parameters are configuration errors") {
  CHECK_THROWS_AS(generate_mask(256, 256, 0.5, 0.08, 0.25, MaskMode::Lines1D, 1),
                  ValidationError);
  // center band larger than the budget
  CHECK_THROWS_AS(generate_mask(256, 256, 16.0, 0.5, 0.25, MaskMode::Lines1D, 1),
                  ValidationError);
  CHECK_THROWS_AS(generate_mask(256, 256, 4.0, 1.5, 0.25, MaskMode::Lines1D, 1),
                  ValidationError);
  CHECK_THROWS_AS(generate_mask(0, 256, 4.0, 0.08, 0.25, MaskMode::Lines1D, 1),
                  ValidationError);
  // points-2d: a 32x32 center block does not fit a 16x budget on 64x64
  CHECK_THROWS_AS(generate_mask(64, 64, 16.0, 0.5, 0.25, MaskMode::Points2D, 1),
                  ValidationError);
}

TEST_CASE("variable density concentrates samples near DC") {
  const SamplingMask m = generate_mask(256, 256, 4.0, 0.0, 0.25, MaskMode::Lines1D, 5);
  int inner = 0, outer = 0;
  for (int c = 0; c < 256; ++c) {
    if (!m.at(0, c)) continue;
    (std::abs(c - 128) <= 64 ? inner : outer) += 1;
  }
  CHECK(inner > outer);
}
