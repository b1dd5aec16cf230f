#include "xdr/eval.hpp"

#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "xdr/error.hpp"
#include "xdr/metrics.hpp"
#include "xdr/rng.hpp"
#include "xdr/util.hpp"

namespace xdr {

std::vector<EvalRecord> evaluate_model(const CascadeCheckpoint& ckpt,
                                       const DatasetSpec& test_spec,
                                       const MaskArgs& mask, MaskPolicy policy,
                                       const std::string& train_domain) {
  const Dataset ds = load_dataset(test_spec);
  const CascadeModel model = ckpt.to_model();
  const std::string train_id =
      train_domain.empty()
          ? (ckpt.training_meta.contains("dataset")
                 ? ckpt.training_meta.at("dataset").get<std::string>()
                 : "unknown")
          : train_domain;

  std::vector<EvalRecord> records(ds.slices.size());
  std::vector<std::exception_ptr> errors(ds.slices.size());
#pragma omp parallel for schedule(dynamic)
  for (size_t i = 0; i < ds.slices.size(); ++i) {
    try {
      const SamplingMask m =
          policy == MaskPolicy::Fixed
              ? mask.make(ds.slices[i].height, ds.slices[i].width, mask.seed)
              : mask.make(ds.slices[i].height, ds.slices[i].width,
                          derive_seed(mask.seed, "mask", i));
      const ComplexImage recon = reconstruct(model, ckpt.training_meta, ds.slices[i], m);
      const RealImage gt_mag = ds.slices[i].magnitude();
      const RealImage re_mag = recon.magnitude();
      records[i] = {train_id, test_spec.id, ds.ids[i], psnr(gt_mag, re_mag),
                    ssim(gt_mag, re_mag)};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("evaluation failed on slice " + ds.ids[i] + ": " +
                               e.what());
    }
  }
  return records;
}

CrossDomainTable cross_domain_table(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw ValidationError("cross_domain_table: no records");

  CrossDomainTable table;
  auto index_of = [](std::vector<std::string>& v, const std::string& s) {
    const auto it = std::find(v.begin(), v.end(), s);
    if (it != v.end()) return static_cast<size_t>(it - v.begin());
    v.push_back(s);
    return v.size() - 1;
  };
  for (const auto& r : records) {
    index_of(table.train_domains, r.train_domain);
    index_of(table.test_domains, r.test_domain);
  }

  const size_t rows = table.train_domains.size(), cols = table.test_domains.size();
  std::vector<std::vector<const EvalRecord*>> groups(rows * cols);
  for (const auto& r : records) {
    const size_t ri = index_of(table.train_domains, r.train_domain);
    const size_t ci = index_of(table.test_domains, r.test_domain);
    groups[ri * cols + ci].push_back(&r);
  }

  std::string missing;
  for (size_t ri = 0; ri < rows; ++ri)
    for (size_t ci = 0; ci < cols; ++ci)
      if (groups[ri * cols + ci].empty())
        missing += " (" + table.train_domains[ri] + ", " + table.test_domains[ci] + ")";
  if (!missing.empty())
    throw ValidationError("cross_domain_table: missing grid cells:" + missing);

  auto mean_std = [](const std::vector<const EvalRecord*>& g, auto proj, double& mean,
                     double& sd) {
    mean = 0.0;
    for (const auto* r : g) mean += proj(*r);
    mean /= static_cast<double>(g.size());
    double acc = 0.0;
    for (const auto* r : g) acc += (proj(*r) - mean) * (proj(*r) - mean);
    sd = std::sqrt(acc / static_cast<double>(g.size())); // population
  };

  table.cells.resize(rows * cols);
  for (size_t ri = 0; ri < rows; ++ri) {
    for (size_t ci = 0; ci < cols; ++ci) {
      const auto& g = groups[ri * cols + ci];
      CrossCell& cell = table.cells[ri * cols + ci];
      mean_std(g, [](const EvalRecord& r) { return r.psnr; }, cell.psnr_mean,
               cell.psnr_std);
      mean_std(g, [](const EvalRecord& r) { return r.ssim; }, cell.ssim_mean,
               cell.ssim_std);
      cell.count = g.size();
      cell.diagonal = table.train_domains[ri] == table.test_domains[ci];
    }
  }
  return table;
}

std::string records_csv(const std::vector<EvalRecord>& records) {
  std::ostringstream out;
  out << "train_domain,test_domain,slice_id,psnr,ssim\n";
  for (const auto& r : records) {
    out << r.train_domain << "," << r.test_domain << "," << r.slice_id << ","
        << format_double(r.psnr) << "," << format_double(r.ssim) << "\n";
  }
  return out.str();
}

std::vector<EvalRecord> parse_records_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "train_domain,test_domain,slice_id,psnr,ssim")
    throw std::runtime_error("records csv: unexpected header");
  std::vector<EvalRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    EvalRecord r;
    std::string psnr_s, ssim_s;
    if (!std::getline(row, r.train_domain, ',') ||
        !std::getline(row, r.test_domain, ',') ||
        !std::getline(row, r.slice_id, ',') || !std::getline(row, psnr_s, ',') ||
        !std::getline(row, ssim_s))
      throw std::runtime_error("records csv: malformed row: " + line);
    r.psnr = psnr_s == "inf" ? std::numeric_limits<double>::infinity()
                             : std::stod(psnr_s);
    r.ssim = std::stod(ssim_s);
    records.push_back(std::move(r));
  }
  return records;
}

std::string table_csv(const CrossDomainTable& table) {
  std::ostringstream out;
  out << "train_domain";
  for (const auto& t : table.test_domains)
    out << "," << t << "_psnr_mean," << t << "_psnr_std," << t << "_ssim_mean," << t
        << "_ssim_std";
  out << "\n";
  for (size_t ri = 0; ri < table.train_domains.size(); ++ri) {
    out << table.train_domains[ri];
    for (size_t ci = 0; ci < table.test_domains.size(); ++ci) {
      const CrossCell& c = table.cell(ri, ci);
      out << "," << format_double(c.psnr_mean) << "," << format_double(c.psnr_std)
          << "," << format_double(c.ssim_mean) << "," << format_double(c.ssim_std);
    }
    out << "\n";
  }
  return out.str();
}

std::string table_json(const CrossDomainTable& table) {
  nlohmann::ordered_json j;
  j["train_domains"] = table.train_domains;
  j["test_domains"] = table.test_domains;
  auto rows = nlohmann::ordered_json::array();
  for (size_t ri = 0; ri < table.train_domains.size(); ++ri) {
    auto row = nlohmann::ordered_json::array();
    for (size_t ci = 0; ci < table.test_domains.size(); ++ci) {
      const CrossCell& c = table.cell(ri, ci);
      nlohmann::ordered_json cell;
      cell["psnr_mean"] = c.psnr_mean;
      cell["psnr_std"] = c.psnr_std;
      cell["ssim_mean"] = c.ssim_mean;
      cell["ssim_std"] = c.ssim_std;
      cell["count"] = c.count;
      cell["domain_matched"] = c.diagonal; // the highlighted diagonal
      row.push_back(cell);
    }
    rows.push_back(row);
  }
  j["cells"] = rows;
  return j.dump(2);
}

namespace {

cv::Mat to_gray8(const RealImage& img) {
  cv::Mat m(img.height, img.width, CV_8U);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) {
      const float v = std::clamp(img.at(r, c), 0.0f, 1.0f);
      m.at<std::uint8_t>(r, c) = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
  return m;
}

} // namespace

std::vector<std::filesystem::path> export_error_images(
    const CascadeCheckpoint& ckpt, const Dataset& data, const MaskArgs& mask,
    MaskPolicy policy, const std::filesystem::path& out_dir, double error_gain) {
  if (data.slices.empty()) throw ValidationError("export_error_images: no slices");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (!std::filesystem::is_directory(out_dir))
    throw std::runtime_error("cannot create output directory: " + out_dir.string());

  const CascadeModel model = ckpt.to_model();
  std::vector<std::filesystem::path> written;
  for (size_t i = 0; i < data.slices.size(); ++i) {
    const SamplingMask m =
        policy == MaskPolicy::Fixed
            ? mask.make(data.slices[i].height, data.slices[i].width, mask.seed)
            : mask.make(data.slices[i].height, data.slices[i].width,
                        derive_seed(mask.seed, "mask", i));
    const ComplexImage recon = reconstruct(model, ckpt.training_meta, data.slices[i], m);
    const RealImage gt = data.slices[i].magnitude();
    const RealImage re = recon.magnitude();
    RealImage err(gt.height, gt.width);
    for (size_t p = 0; p < err.v.size(); ++p)
      err.v[p] = static_cast<float>(error_gain * std::fabs(gt.v[p] - re.v[p]));

    const auto save = [&](const std::string& suffix, const RealImage& img) {
      const auto path = out_dir / (data.ids[i] + "_" + suffix + ".png");
      if (!cv::imwrite(path.string(), to_gray8(img)))
        throw std::runtime_error("failed to write " + path.string());
      written.push_back(path);
    };
    save("gt", gt);
    save("recon", re);
    save("error", err);
  }
  return written;
}

} // namespace xdr
