#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "xdr/cimg_io.hpp"
#include "xdr/util.hpp"

using namespace xdr;

TEST_CASE("complex image container round-trips bit-exactly") {
  test::TempDir dir("cimg");
  const ComplexImage img = test::random_image(24, 17, 1);
  const auto path = dir.path() / "slice.cimg";
  write_cimg(path, img);
  const ComplexImage back = read_cimg(path);
  CHECK(back.height == img.height);
  CHECK(back.width == img.width);
  CHECK(back.real == img.real);
  CHECK(back.imag == img.imag);

  // writing again produces identical bytes
  const auto path2 = dir.path() / "slice2.cimg";
  write_cimg(path2, back);
  CHECK(read_text_file(path) == read_text_file(path2));
}

TEST_CASE("wrong magic is reported with the file name") {
  test::TempDir dir("badmagic");
  const auto path = dir.path() / "broken.cimg";
  std::ofstream(path) << "NOPE!{\"height\":1,\"width\":1,\"dtype\":\"f32\"}\n";
  try {
    read_cimg(path);
    FAIL("expected an exception");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("broken.cimg") != std::string::npos);
  }
}

TEST_CASE("truncated payload is rejected") {
  test::TempDir dir("trunc");
  const auto path = dir.path() / "short.cimg";
  write_cimg(path, test::random_image(8, 8, 2));
  const std::string full = read_text_file(path);
  write_text_file(path, full.substr(0, full.size() - 10));
  CHECK_THROWS(read_cimg(path));
}

TEST_CASE("mask container keeps its metadata") {
  test::TempDir dir("mask");
  const SamplingMask mask =
      generate_mask(64, 64, 4.0, 0.08, 0.25, MaskMode::Lines1D, 99);
  const auto path = dir.path() / "mask.cimg";
  write_mask(path, mask);
  const SamplingMask back = read_mask(path);
  CHECK(back.sampled == mask.sampled);
  CHECK(back.acceleration == mask.acceleration);
  CHECK(back.center_fraction == mask.center_fraction);
  CHECK(back.sigma == mask.sigma);
  CHECK(back.mode == mask.mode);
  CHECK(back.seed == mask.seed);
}

TEST_CASE("patch set container round-trips") {
  test::TempDir dir("patches");
  PatchSet ps;
  ps.patch_size = 3;
  ps.n = 5;
  ps.domain_id = "unit";
  ps.seed = 4;
  ps.data.resize(45);
  for (size_t i = 0; i < ps.data.size(); ++i) ps.data[i] = static_cast<float>(i) / 45.0f;
  const auto path = dir.path() / "patches.cimg";
  write_patchset(path, ps);
  const PatchSet back = read_patchset(path);
  CHECK(back.patch_size == 3);
  CHECK(back.n == 5);
  CHECK(back.domain_id == "unit");
  CHECK(back.seed == 4);
  CHECK(back.data == ps.data);
}
