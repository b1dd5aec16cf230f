#pragma once

#include <filesystem>

#include "xdr/complex_image.hpp"
#include "xdr/mask.hpp"
#include "xdr/patches.hpp"

namespace xdr {

// CIMG1 container: 5-byte magic "CIMG1", a newline-terminated JSON header,
// then raw row-major little-endian planes.
//   complex slice: {"height":H,"width":W,"dtype":"f32"}, real plane then
//                  imag plane (H*W float32 each)
//   mask:          dtype "u8" plus acceleration/center_fraction/mode/seed/
//                  sigma keys, one plane of 0/1 bytes
//   patch set:     dtype "f32" plus patch_size/n/domain_id/seed keys, one
//                  n x patch_size^2 plane
// Readers validate the magic, header, and payload size and name the file
// in every error.

void write_cimg(const std::filesystem::path& path, const ComplexImage& img);
ComplexImage read_cimg(const std::filesystem::path& path);

void write_mask(const std::filesystem::path& path, const SamplingMask& mask);
SamplingMask read_mask(const std::filesystem::path& path);

void write_patchset(const std::filesystem::path& path, const PatchSet& patches);
PatchSet read_patchset(const std::filesystem::path& path);

} // namespace xdr
