#include "xdr/mask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xdr/error.hpp"
#include "xdr/fft.hpp"
#include "xdr/rng.hpp"

namespace xdr {

std::string to_string(MaskMode mode) {
  return mode == MaskMode::Lines1D ? "lines-1d" : "points-2d";
}

MaskMode mask_mode_from_string(const std::string& s) {
  if (s == "lines-1d") return MaskMode::Lines1D;
  if (s == "points-2d") return MaskMode::Points2D;
  throw ValidationError("unknown mask mode '" + s + "' (expected lines-1d or points-2d)");
}

size_t SamplingMask::count() const {
  return static_cast<size_t>(
      std::count(sampled.begin(), sampled.end(), std::uint8_t{1}));
}

double SamplingMask::fraction() const {
  return sampled.empty() ? 0.0 : static_cast<double>(count()) / sampled.size();
}

namespace {

// Iterative weighted draws with removal: at each step walk the cumulative
// weights of the remaining candidates and pick the first index whose
// cumulative sum exceeds u * total.
std::vector<int> weighted_draw_without_replacement(std::vector<double> weights,
                                                   int draws, Rng& rng) {
  std::vector<int> picked;
  picked.reserve(draws);
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (int d = 0; d < draws; ++d) {
    if (total <= 0.0)
      throw std::runtime_error("mask sampling ran out of candidates");
    const double u = rng.uniform() * total;
    double cum = 0.0;
    int chosen = -1;
    for (size_t i = 0; i < weights.size(); ++i) {
      cum += weights[i];
      if (cum > u && weights[i] > 0.0) {
        chosen = static_cast<int>(i);
        break;
      }
    }
    if (chosen < 0) { // numerical tail: take the last positive-weight entry
      for (int i = static_cast<int>(weights.size()) - 1; i >= 0; --i)
        if (weights[i] > 0.0) {
          chosen = i;
          break;
        }
    }
    picked.push_back(chosen);
    total -= weights[chosen];
    weights[chosen] = 0.0;
  }
  return picked;
}

int rounded(double v) { return static_cast<int>(std::llround(v)); }

} // namespace

SamplingMask generate_mask(int height, int width, double acceleration,
                           double center_fraction, double sigma, MaskMode mode,
                           std::uint64_t seed) {
  if (height <= 0 || width <= 0)
    throw ValidationError("generate_mask: non-positive shape");
  if (acceleration < 1.0)
    throw ValidationError("generate_mask: acceleration must be >= 1");
  if (center_fraction < 0.0 || center_fraction > 1.0)
    throw ValidationError("generate_mask: center_fraction must be in [0, 1]");
  if (sigma <= 0.0) throw ValidationError("generate_mask: sigma must be > 0");

  SamplingMask mask;
  mask.height = height;
  mask.width = width;
  mask.sampled.assign(static_cast<size_t>(height) * width, 0);
  mask.acceleration = acceleration;
  mask.center_fraction = center_fraction;
  mask.sigma = sigma;
  mask.mode = mode;
  mask.seed = seed;

  Rng rng(seed);

  if (mode == MaskMode::Lines1D) {
    const int lines = width;
    const int budget = rounded(lines / acceleration);
    const int center = rounded(center_fraction * lines);
    if (center > budget)
      throw ValidationError("generate_mask: center band exceeds sampling budget");

    std::vector<std::uint8_t> line(lines, 0);
    const int dc = dc_index(lines);
    const int start = dc - center / 2;
    for (int i = 0; i < center; ++i) line[start + i] = 1;

    const double sig = sigma * (lines / 2.0);
    std::vector<double> weights(lines, 0.0);
    for (int c = 0; c < lines; ++c) {
      if (line[c]) continue;
      const double d = c - dc;
      weights[c] = std::exp(-d * d / (2.0 * sig * sig));
    }
    for (int c : weighted_draw_without_replacement(weights, budget - center, rng))
      line[c] = 1;

    for (int r = 0; r < height; ++r)
      for (int c = 0; c < lines; ++c)
        mask.sampled[static_cast<size_t>(r) * width + c] = line[c];
  } else {
    const size_t points = static_cast<size_t>(height) * width;
    const int budget = rounded(static_cast<double>(points) / acceleration);
    const int ch = rounded(center_fraction * height);
    const int cw = rounded(center_fraction * width);
    const int center = ch * cw;
    if (center > budget)
      throw ValidationError("generate_mask: center band exceeds sampling budget");

    const int dr = dc_index(height), dcC = dc_index(width);
    const int r0 = dr - ch / 2, c0 = dcC - cw / 2;
    for (int r = 0; r < ch; ++r)
      for (int c = 0; c < cw; ++c)
        mask.sampled[static_cast<size_t>(r0 + r) * width + (c0 + c)] = 1;

    const double sig = sigma * (std::min(height, width) / 2.0);
    std::vector<double> weights(points, 0.0);
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        const size_t i = static_cast<size_t>(r) * width + c;
        if (mask.sampled[i]) continue;
        const double d2 = static_cast<double>(r - dr) * (r - dr) +
                          static_cast<double>(c - dcC) * (c - dcC);
        weights[i] = std::exp(-d2 / (2.0 * sig * sig));
      }
    }
    for (int idx : weighted_draw_without_replacement(weights, budget - center, rng))
      mask.sampled[idx] = 1;
  }
  return mask;
}

} // namespace xdr
