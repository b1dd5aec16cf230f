#include "xdr/cimg_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <span>

#include <nlohmann/json.hpp>

#include "xdr/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "CIMG1 I/O assumes a little-endian host");

namespace xdr {

namespace {

constexpr char kMagic[5] = {'C', 'I', 'M', 'G', '1'};

using ojson = nlohmann::ordered_json;

void write_file(const std::filesystem::path& path, const ojson& header,
                std::span<const char> payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const std::string hdr = header.dump();
  out.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
  out.put('\n');
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct Parsed {
  nlohmann::json header;
  std::string payload;
};

Parsed read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  char magic[5];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("not a CIMG1 container: " + path.string());
  std::string hdr;
  if (!std::getline(in, hdr))
    throw std::runtime_error("truncated CIMG1 header: " + path.string());
  Parsed p;
  try {
    p.header = nlohmann::json::parse(hdr);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad CIMG1 header in " + path.string() + ": " + e.what());
  }
  p.payload.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return p;
}

std::pair<int, int> shape_of(const nlohmann::json& h, const std::filesystem::path& path,
                             const char* dtype) {
  if (!h.contains("height") || !h.contains("width") || !h.contains("dtype"))
    throw std::runtime_error("CIMG1 header missing keys in " + path.string());
  if (h.at("dtype").get<std::string>() != dtype)
    throw std::runtime_error("unexpected dtype in " + path.string());
  const int height = h.at("height").get<int>();
  const int width = h.at("width").get<int>();
  if (height <= 0 || width <= 0)
    throw std::runtime_error("bad shape in " + path.string());
  return {height, width};
}

} // namespace

void write_cimg(const std::filesystem::path& path, const ComplexImage& img) {
  img.validate("write_cimg");
  ojson h;
  h["height"] = img.height;
  h["width"] = img.width;
  h["dtype"] = "f32";
  std::string payload(img.size() * 8, '\0');
  std::memcpy(payload.data(), img.real.data(), img.size() * 4);
  std::memcpy(payload.data() + img.size() * 4, img.imag.data(), img.size() * 4);
  write_file(path, h, payload);
}

ComplexImage read_cimg(const std::filesystem::path& path) {
  const Parsed p = read_file(path);
  const auto [height, width] = shape_of(p.header, path, "f32");
  const size_t n = static_cast<size_t>(height) * width;
  if (p.payload.size() != n * 8)
    throw std::runtime_error("payload size mismatch in " + path.string());
  ComplexImage img(height, width);
  std::memcpy(img.real.data(), p.payload.data(), n * 4);
  std::memcpy(img.imag.data(), p.payload.data() + n * 4, n * 4);
  img.validate(("read_cimg " + path.string()).c_str());
  return img;
}

void write_mask(const std::filesystem::path& path, const SamplingMask& mask) {
  ojson h;
  h["height"] = mask.height;
  h["width"] = mask.width;
  h["dtype"] = "u8";
  h["acceleration"] = mask.acceleration;
  h["center_fraction"] = mask.center_fraction;
  h["mode"] = to_string(mask.mode);
  h["seed"] = mask.seed;
  h["sigma"] = mask.sigma;
  write_file(path, h,
             {reinterpret_cast<const char*>(mask.sampled.data()), mask.sampled.size()});
}

SamplingMask read_mask(const std::filesystem::path& path) {
  const Parsed p = read_file(path);
  const auto [height, width] = shape_of(p.header, path, "u8");
  const size_t n = static_cast<size_t>(height) * width;
  if (p.payload.size() != n)
    throw std::runtime_error("payload size mismatch in " + path.string());
  SamplingMask mask;
  mask.height = height;
  mask.width = width;
  mask.sampled.assign(p.payload.begin(), p.payload.end());
  for (auto v : mask.sampled)
    if (v > 1) throw std::runtime_error("mask plane not 0/1 in " + path.string());
  mask.acceleration = p.header.at("acceleration").get<double>();
  mask.center_fraction = p.header.at("center_fraction").get<double>();
  mask.mode = mask_mode_from_string(p.header.at("mode").get<std::string>());
  mask.seed = p.header.at("seed").get<std::uint64_t>();
  mask.sigma = p.header.at("sigma").get<double>();
  return mask;
}

void write_patchset(const std::filesystem::path& path, const PatchSet& patches) {
  ojson h;
  h["height"] = patches.n;
  h["width"] = patches.dim();
  h["dtype"] = "f32";
  h["patch_size"] = patches.patch_size;
  h["n"] = patches.n;
  h["domain_id"] = patches.domain_id;
  h["seed"] = patches.seed;
  write_file(path, h,
             {reinterpret_cast<const char*>(patches.data.data()), patches.data.size() * 4});
}

PatchSet read_patchset(const std::filesystem::path& path) {
  const Parsed p = read_file(path);
  const auto [height, width] = shape_of(p.header, path, "f32");
  PatchSet ps;
  ps.patch_size = p.header.at("patch_size").get<int>();
  ps.n = p.header.at("n").get<std::int64_t>();
  ps.domain_id = p.header.at("domain_id").get<std::string>();
  ps.seed = p.header.at("seed").get<std::uint64_t>();
  if (ps.n != height || ps.dim() != width)
    throw std::runtime_error("patch-set header inconsistent in " + path.string());
  const size_t n = static_cast<size_t>(height) * width;
  if (p.payload.size() != n * 4)
    throw std::runtime_error("payload size mismatch in " + path.string());
  ps.data.resize(n);
  std::memcpy(ps.data.data(), p.payload.data(), n * 4);
  return ps;
}

} // namespace xdr
