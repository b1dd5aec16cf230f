#include <doctest.h>

#include "helpers.hpp"
#include "xdr/error.hpp"
#include "xdr/fft.hpp"

using namespace xdr;

TEST_CASE("fft2c of a constant image is a single DC bin") {
  ComplexImage img(8, 8);
  for (auto& v : img.real) v = 1.0f;
  const ComplexImage k = fft2c(img);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) {
      const double mag = std::hypot(k.re(r, c), k.im(r, c));
      if (r == 4 && c == 4)
        CHECK(mag == doctest::Approx(8.0).epsilon(1e-6)); // orthonormal: sqrt(64)
      else
        CHECK(mag < 1e-5);
    }
}

TEST_CASE("ifft2c of a center impulse is a constant image") {
  ComplexImage k(8, 8);
  k.re(4, 4) = 8.0f;
  const ComplexImage img = ifft2c(k);
  for (size_t i = 0; i < img.size(); ++i) {
    CHECK(img.real[i] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::fabs(img.imag[i]) < 1e-6);
  }
}

TEST_CASE("round trip and Parseval on random slices") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const ComplexImage x = test::random_image(64, 64, seed);
    const ComplexImage k = fft2c(x);
    const ComplexImage back = ifft2c(k);

    double max_err = 0.0, max_val = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      max_err = std::max<double>(max_err, std::fabs(back.real[i] - x.real[i]));
      max_err = std::max<double>(max_err, std::fabs(back.imag[i] - x.imag[i]));
      max_val = std::max<double>(max_val, std::fabs(x.real[i]));
      max_val = std::max<double>(max_val, std::fabs(x.imag[i]));
    }
    CHECK(max_err <= 1e-5 * max_val);
    CHECK(std::fabs(norm2(k) - norm2(x)) <= 1e-5 * norm2(x));
  }
}

TEST_CASE("fft2c matches the naive centered DFT, including odd sizes") {
  for (auto [h, w] : {std::pair{8, 8}, std::pair{5, 7}, std::pair{4, 6}, std::pair{3, 3}}) {
    const ComplexImage x = test::random_image(h, w, 99 + h + w);
    CHECK(test::max_abs_diff(fft2c(x), test::naive_fft2c(x, false)) < 1e-4);
    CHECK(test::max_abs_diff(ifft2c(x), test::naive_fft2c(x, true)) < 1e-4);
  }
}

TEST_CASE("ifft2c is linear") {
  const ComplexImage a = test::random_image(16, 16, 5);
  const ComplexImage b = test::random_image(16, 16, 6);
  ComplexImage sum(16, 16);
  for (size_t i = 0; i < sum.size(); ++i) {
    sum.real[i] = a.real[i] + b.real[i];
    sum.imag[i] = a.imag[i] + b.imag[i];
  }
  const ComplexImage lhs = ifft2c(sum);
  const ComplexImage fa = ifft2c(a);
  const ComplexImage fb = ifft2c(b);
  for (size_t i = 0; i < lhs.size(); ++i) {
    CHECK(lhs.real[i] == doctest::Approx(fa.real[i] + fb.real[i]).epsilon(1e-5));
    CHECK(lhs.imag[i] == doctest::Approx(fa.imag[i] + fb.imag[i]).epsilon(1e-5));
  }
}

TEST_CASE("non-finite input is rejected") {
  ComplexImage img(4, 4);
  img.re(1, 1) = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(fft2c(img), ValidationError);
  img.re(1, 1) = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(ifft2c(img), ValidationError);
}
