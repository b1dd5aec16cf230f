#include "xdr/data.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cmath>

#include "xdr/cimg_io.hpp"
#include "xdr/error.hpp"
#include "xdr/rng.hpp"

namespace fs = std::filesystem;

namespace xdr {

std::string to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::ComplexSlices: return "complex-slices";
    case DatasetKind::NaturalImages: return "natural-images";
    case DatasetKind::Phantom: return "phantom";
  }
  return "?";
}

std::string to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

std::string to_string(PhantomFamily f) {
  switch (f) {
    case PhantomFamily::Ellipses: return "ellipses";
    case PhantomFamily::Rectangles: return "rectangles";
    case PhantomFamily::Mixed: return "mixed";
  }
  return "?";
}

DatasetKind dataset_kind_from_string(const std::string& s) {
  if (s == "complex-slices") return DatasetKind::ComplexSlices;
  if (s == "natural-images") return DatasetKind::NaturalImages;
  if (s == "phantom") return DatasetKind::Phantom;
  throw ValidationError("unknown dataset kind '" + s + "'");
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw ValidationError("unknown split '" + s + "'");
}

PhantomFamily phantom_family_from_string(const std::string& s) {
  if (s == "ellipses") return PhantomFamily::Ellipses;
  if (s == "rectangles") return PhantomFamily::Rectangles;
  if (s == "mixed") return PhantomFamily::Mixed;
  throw ValidationError("unknown phantom family '" + s + "'");
}

void DatasetSpec::validate() const {
  if (id.empty()) throw ValidationError("dataset spec: id must not be empty");
  if (kind == DatasetKind::Phantom) {
    if (count <= 0) throw ValidationError("dataset spec '" + id + "': phantom count must be > 0");
  } else if (root.empty()) {
    throw ValidationError("dataset spec '" + id + "': root path required");
  }
  if (kind != DatasetKind::ComplexSlices || target_height || target_width) {
    if (target_height < 32 || target_width < 32)
      throw ValidationError("dataset spec '" + id + "': target shape must be at least 32x32");
  }
}

nlohmann::ordered_json DatasetSpec::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["kind"] = to_string(kind);
  if (!root.empty()) j["root"] = root.string();
  if (target_height) j["target_shape"] = {target_height, target_width};
  j["split"] = to_string(split);
  if (kind == DatasetKind::NaturalImages || kind == DatasetKind::Phantom) {
    j["phase"] = {{"smoothness_sigma", phase.smoothness_sigma},
                  {"phase_range", phase.phase_range},
                  {"seed", phase.seed}};
  }
  if (kind == DatasetKind::Phantom) {
    j["family"] = to_string(family);
    j["count"] = count;
    j["seed"] = seed;
  }
  return j;
}

DatasetSpec DatasetSpec::from_json(const nlohmann::json& j) {
  DatasetSpec s;
  s.id = j.at("id").get<std::string>();
  s.kind = dataset_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("root")) s.root = j.at("root").get<std::string>();
  if (j.contains("target_shape")) {
    const auto& ts = j.at("target_shape");
    s.target_height = ts.at(0).get<int>();
    s.target_width = ts.at(1).get<int>();
  }
  if (j.contains("split")) s.split = split_from_string(j.at("split").get<std::string>());
  if (j.contains("phase")) {
    const auto& p = j.at("phase");
    if (p.contains("smoothness_sigma"))
      s.phase.smoothness_sigma = p.at("smoothness_sigma").get<double>();
    if (p.contains("phase_range")) s.phase.phase_range = p.at("phase_range").get<double>();
    if (p.contains("seed")) s.phase.seed = p.at("seed").get<std::uint64_t>();
  }
  if (j.contains("family"))
    s.family = phantom_family_from_string(j.at("family").get<std::string>());
  if (j.contains("count")) s.count = j.at("count").get<int>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  s.validate();
  return s;
}

DatasetSpec DatasetSpec::with_split(Split s, int split_count) const {
  DatasetSpec out = *this;
  out.split = s;
  if (split_count > 0) out.count = split_count;
  return out;
}

nlohmann::ordered_json LoadReport::to_json() const {
  nlohmann::ordered_json j;
  j["scanned"] = scanned;
  j["decoded"] = decoded;
  j["skipped"] = skipped;
  j["skipped_files"] = skipped_files;
  return j;
}

std::pair<ComplexImage, double> normalize_slice(const ComplexImage& img) {
  const double scale = max_magnitude(img);
  if (scale <= 0.0) throw ValidationError("normalize_slice: all-zero slice");
  ComplexImage out = img;
  const float inv = static_cast<float>(1.0 / scale);
  for (size_t i = 0; i < out.size(); ++i) {
    out.real[i] *= inv;
    out.imag[i] *= inv;
  }
  return {std::move(out), scale};
}

namespace {

std::vector<fs::path> sorted_files(const fs::path& dir,
                                   const std::vector<std::string>& extensions) {
  if (!fs::is_directory(dir))
    throw std::runtime_error("dataset directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (std::find(extensions.begin(), extensions.end(), ext) != extensions.end())
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });
  return files;
}

} // namespace

Dataset load_complex_dataset(const DatasetSpec& spec) {
  spec.validate();
  const fs::path dir = spec.root / to_string(spec.split);
  Dataset ds;
  const auto files = sorted_files(dir, {".cimg"});
  if (files.empty())
    throw std::runtime_error("empty complex-slice dataset: " + dir.string());
  for (const auto& f : files) {
    ComplexImage img = read_cimg(f); // throws naming the file on malformed input
    if (spec.target_height &&
        (img.height != spec.target_height || img.width != spec.target_width))
      throw std::runtime_error("slice shape mismatch in " + f.string());
    auto [norm, scale] = normalize_slice(img);
    (void)scale;
    ds.slices.push_back(std::move(norm));
    ds.ids.push_back(f.filename().stem().string());
    ++ds.report.scanned;
    ++ds.report.decoded;
  }
  return ds;
}

Dataset load_natural_dataset(const DatasetSpec& spec) {
  spec.validate();
  return load_natural_dir(spec.root / to_string(spec.split), spec.target_height,
                          spec.target_width, spec.phase);
}

Dataset load_natural_dir(const fs::path& dir, int target_height, int target_width,
                         const PhaseParams& base_phase) {
  if (target_height < 32 || target_width < 32)
    throw ValidationError("natural images: target shape must be at least 32x32");
  Dataset ds;
  const auto files = sorted_files(dir, {".png", ".jpg", ".jpeg", ".bmp"});
  for (const auto& f : files) {
    ++ds.report.scanned;
    const cv::Mat raw = cv::imread(f.string(), cv::IMREAD_COLOR);
    if (raw.empty()) {
      ++ds.report.skipped;
      ds.report.skipped_files.push_back(f.filename().string());
      continue;
    }

    // BGR byte order from OpenCV; luma weights are on R, G, B.
    cv::Mat gray(raw.rows, raw.cols, CV_32F);
    for (int r = 0; r < raw.rows; ++r) {
      const cv::Vec3b* src = raw.ptr<cv::Vec3b>(r);
      float* dst = gray.ptr<float>(r);
      for (int c = 0; c < raw.cols; ++c) {
        dst[c] = static_cast<float>(
            (0.299 * src[c][2] + 0.587 * src[c][1] + 0.114 * src[c][0]) / 255.0);
      }
    }

    const int side = std::min(gray.rows, gray.cols);
    const cv::Rect crop((gray.cols - side) / 2, (gray.rows - side) / 2, side, side);
    cv::Mat resized;
    cv::resize(gray(crop), resized, cv::Size(target_width, target_height), 0.0, 0.0,
               cv::INTER_LINEAR);

    RealImage mag(target_height, target_width);
    float peak = 0.0f;
    for (int r = 0; r < resized.rows; ++r)
      for (int c = 0; c < resized.cols; ++c) {
        const float v = std::clamp(resized.at<float>(r, c), 0.0f, 1.0f);
        mag.at(r, c) = v;
        peak = std::max(peak, v);
      }
    if (peak <= 0.0f) { // all-black image cannot be normalised
      ++ds.report.skipped;
      ds.report.skipped_files.push_back(f.filename().string());
      continue;
    }
    for (float& v : mag.v) v /= peak;

    PhaseParams p = base_phase;
    p.seed = base_phase.seed ^ fnv1a64(f.filename().string());
    ds.slices.push_back(synthesize_phase(mag, p));
    ds.ids.push_back(f.filename().stem().string());
    ++ds.report.decoded;
  }
  if (ds.slices.empty())
    throw std::runtime_error("no decodable images in " + dir.string());
  return ds;
}

namespace {

void paint_ellipse(RealImage& img, double cy, double cx, double sa, double sb,
                   double theta, float intensity) {
  const double ct = std::cos(theta), st = std::sin(theta);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const double dy = r - cy, dx = c - cx;
      const double u = (dx * ct + dy * st) / sa;
      const double v = (-dx * st + dy * ct) / sb;
      if (u * u + v * v <= 1.0) img.at(r, c) = intensity;
    }
  }
}

void paint_rectangle(RealImage& img, double cy, double cx, double hh, double hw,
                     float intensity) {
  const int r0 = std::max(0, static_cast<int>(std::ceil(cy - hh)));
  const int r1 = std::min(img.height - 1, static_cast<int>(std::floor(cy + hh)));
  const int c0 = std::max(0, static_cast<int>(std::ceil(cx - hw)));
  const int c1 = std::min(img.width - 1, static_cast<int>(std::floor(cx + hw)));
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) img.at(r, c) = intensity;
}

RealImage phantom_magnitude(int height, int width, PhantomFamily family, Rng& rng) {
  RealImage img(height, width);
  const double mind = std::min(height, width);
  const int n_shapes = 3 + static_cast<int>(rng.index(6)); // 3..8
  for (int s = 0; s < n_shapes; ++s) {
    const float intensity = static_cast<float>(0.2 + 0.8 * rng.uniform());
    const double cy = (0.1 + 0.8 * rng.uniform()) * height;
    const double cx = (0.1 + 0.8 * rng.uniform()) * width;
    const double ea = (0.04 + 0.21 * rng.uniform()) * mind;
    const double eb = (0.04 + 0.21 * rng.uniform()) * mind;
    if (family == PhantomFamily::Ellipses) {
      const double theta = rng.uniform() * M_PI;
      paint_ellipse(img, cy, cx, ea, eb, theta, intensity);
    } else {
      paint_rectangle(img, cy, cx, ea, eb, intensity);
    }
  }
  return img;
}

} // namespace

Dataset generate_phantoms(const DatasetSpec& spec) {
  spec.validate();
  if (spec.kind != DatasetKind::Phantom)
    throw ValidationError("generate_phantoms: spec kind must be phantom");

  Dataset ds;
  const std::string stream = to_string(spec.split);
  for (int i = 0; i < spec.count; ++i) {
    const std::uint64_t slice_seed = derive_seed(spec.seed, stream, static_cast<std::uint64_t>(i));
    Rng rng(slice_seed);
    PhantomFamily family = spec.family;
    if (family == PhantomFamily::Mixed)
      family = rng.uniform() < 0.5 ? PhantomFamily::Ellipses : PhantomFamily::Rectangles;
    RealImage mag = phantom_magnitude(spec.target_height, spec.target_width, family, rng);

    float peak = 0.0f;
    for (float v : mag.v) peak = std::max(peak, v);
    for (float& v : mag.v) v /= peak; // >= 0.2 by construction
    PhaseParams p = spec.phase;
    p.seed = derive_seed(slice_seed, "phase");
    ds.slices.push_back(synthesize_phase(mag, p));

    char name[32];
    std::snprintf(name, sizeof(name), "%s-%04d", to_string(spec.family).c_str(), i);
    ds.ids.push_back(name);
    ++ds.report.scanned;
    ++ds.report.decoded;
  }
  return ds;
}

Dataset load_dataset(const DatasetSpec& spec) {
  switch (spec.kind) {
    case DatasetKind::ComplexSlices: return load_complex_dataset(spec);
    case DatasetKind::NaturalImages: return load_natural_dataset(spec);
    case DatasetKind::Phantom: return generate_phantoms(spec);
  }
  throw ValidationError("load_dataset: unknown kind");
}

} // namespace xdr
