#include "xdr/patches.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "xdr/error.hpp"
#include "xdr/rng.hpp"
#include "xdr/stats.hpp"
#include "xdr/util.hpp"

namespace xdr {

std::string to_string(PatchNorm n) {
  return n == PatchNorm::None ? "none" : "zero-mean";
}

PatchNorm patch_norm_from_string(const std::string& s) {
  if (s == "none") return PatchNorm::None;
  if (s == "zero-mean") return PatchNorm::ZeroMean;
  throw ValidationError("unknown patch norm '" + s + "' (expected none or zero-mean)");
}

PatchSet extract_patches(std::span<const ComplexImage> images, std::int64_t n,
                         int patch_size, std::uint64_t seed,
                         const std::string& domain_id, PatchNorm norm) {
  if (images.empty()) throw ValidationError("extract_patches: no images");
  if (n <= 0) throw ValidationError("extract_patches: n must be > 0");
  if (patch_size <= 0) throw ValidationError("extract_patches: patch_size must be > 0");
  for (const auto& img : images) {
    if (img.height < patch_size || img.width < patch_size)
      throw ValidationError("extract_patches: image smaller than patch");
  }

  // Per-slice max-normalised magnitudes, computed once.
  std::vector<RealImage> mags;
  mags.reserve(images.size());
  for (const auto& img : images) {
    RealImage m = img.magnitude();
    float peak = 0.0f;
    for (float v : m.v) peak = std::max(peak, v);
    if (peak > 0.0f)
      for (float& v : m.v) v /= peak;
    mags.push_back(std::move(m));
  }

  PatchSet out;
  out.patch_size = patch_size;
  out.n = n;
  out.domain_id = domain_id;
  out.seed = seed;
  out.data.resize(static_cast<size_t>(n) * patch_size * patch_size);

  Rng rng(seed);
  const int d = patch_size;
  for (std::int64_t p = 0; p < n; ++p) {
    const auto& m = mags[rng.index(mags.size())];
    const int r0 = static_cast<int>(rng.index(m.height - d + 1));
    const int c0 = static_cast<int>(rng.index(m.width - d + 1));
    float* dst = out.data.data() + p * out.dim();
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) dst[r * d + c] = m.at(r0 + r, c0 + c);
    if (norm == PatchNorm::ZeroMean) {
      double mean = 0.0;
      for (int i = 0; i < out.dim(); ++i) mean += dst[i];
      mean /= out.dim();
      for (int i = 0; i < out.dim(); ++i) dst[i] = static_cast<float>(dst[i] - mean);
    }
  }
  return out;
}

namespace {

using MatrixRM =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

MatrixRM to_matrix(const PatchSet& ps) {
  MatrixRM m(ps.n, ps.dim());
  for (std::int64_t i = 0; i < ps.n; ++i)
    for (int j = 0; j < ps.dim(); ++j) m(i, j) = ps.row(i)[j];
  return m;
}

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  sd = std::sqrt(acc / static_cast<double>(v.size())); // population
}

} // namespace

NNDistanceResult nn_distances(const PatchSet& target, const PatchSet& source,
                              int block_size) {
  if (target.dim() != source.dim())
    throw ValidationError("nn_distances: patch dimension mismatch");
  if (source.n == 0) throw ValidationError("nn_distances: empty source set");
  if (target.n == 0) throw ValidationError("nn_distances: empty target set");
  if (block_size <= 0) throw ValidationError("nn_distances: block_size must be > 0");

  const MatrixRM t = to_matrix(target);
  const MatrixRM s = to_matrix(source);
  const Eigen::VectorXd t_sq = t.rowwise().squaredNorm();
  const Eigen::VectorXd s_sq = s.rowwise().squaredNorm();

  NNDistanceResult res;
  res.target_domain = target.domain_id;
  res.source_domain = source.domain_id;
  res.distances.assign(target.n, 0.0);
  res.argmin.assign(target.n, 0);

  const std::int64_t nt = target.n, ns = source.n;
  const std::int64_t bs = block_size;

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t ib = 0; ib < (nt + bs - 1) / bs; ++ib) {
    const std::int64_t i0 = ib * bs;
    const std::int64_t rows = std::min(bs, nt - i0);
    std::vector<double> best(rows, std::numeric_limits<double>::infinity());
    std::vector<std::int64_t> best_j(rows, 0);
    MatrixRM dots(rows, std::min(bs, ns));
    for (std::int64_t j0 = 0; j0 < ns; j0 += bs) {
      const std::int64_t cols = std::min(bs, ns - j0);
      dots.topLeftCorner(rows, cols).noalias() =
          t.middleRows(i0, rows) * s.middleRows(j0, cols).transpose();
      for (std::int64_t i = 0; i < rows; ++i) {
        for (std::int64_t j = 0; j < cols; ++j) {
          const double d2 = t_sq[i0 + i] + s_sq[j0 + j] - 2.0 * dots(i, j);
          if (d2 < best[i]) { // strict keeps the lowest index on ties
            best[i] = d2;
            best_j[i] = j0 + j;
          }
        }
      }
    }
    for (std::int64_t i = 0; i < rows; ++i) {
      // The expansion locates the neighbour; the reported distance is
      // recomputed directly for the winning pair so exact duplicates come
      // out as exactly zero instead of sqrt of rounding residue.
      const auto ti = t.row(i0 + i);
      const auto sj = s.row(best_j[i]);
      res.distances[i0 + i] = std::sqrt(std::max(0.0, (ti - sj).squaredNorm()));
      res.argmin[i0 + i] = best_j[i];
    }
  }

  mean_std(res.distances, res.mean, res.std_dev);
  return res;
}

CompareResult compare_sources(const PatchSet& target, const PatchSet& source_a,
                              const PatchSet& source_b, CompareMethod method) {
  if (target.n < 10)
    throw ValidationError("compare_sources: fewer than 10 target patches (test underpowered)");
  const NNDistanceResult da = nn_distances(target, source_a);
  const NNDistanceResult db = nn_distances(target, source_b);

  CompareResult res;
  res.mean_a = da.mean;
  res.mean_b = db.mean;
  res.method = method;
  if (method == CompareMethod::WilcoxonSignedRank) {
    std::vector<double> diffs(da.distances.size());
    for (size_t i = 0; i < diffs.size(); ++i)
      diffs[i] = da.distances[i] - db.distances[i];
    res.p_value = wilcoxon_signed_rank(diffs).p_value;
  } else {
    res.p_value = mann_whitney_u(da.distances, db.distances).p_value;
  }
  return res;
}

DistanceTable distance_table(std::span<const PatchSet> targets,
                             std::span<const PatchSet> sources, int block_size) {
  if (targets.empty()) throw ValidationError("distance_table: no targets");
  if (sources.size() < 2) throw ValidationError("distance_table: need at least 2 sources");

  DistanceTable table;
  for (const auto& t : targets) table.target_ids.push_back(t.domain_id);
  for (const auto& s : sources) table.source_ids.push_back(s.domain_id);
  table.cells.resize(targets.size() * sources.size());

  for (size_t r = 0; r < targets.size(); ++r) {
    double best = std::numeric_limits<double>::infinity();
    size_t best_c = sources.size();
    for (size_t c = 0; c < sources.size(); ++c) {
      DistanceCell& cell = table.cells[r * sources.size() + c];
      if (targets[r].domain_id == sources[c].domain_id) continue; // omitted diagonal
      const NNDistanceResult nn = nn_distances(targets[r], sources[c], block_size);
      cell.present = true;
      cell.mean = nn.mean;
      cell.std_dev = nn.std_dev;
      if (nn.mean < best) {
        best = nn.mean;
        best_c = c;
      }
    }
    if (best_c < sources.size())
      table.cells[r * sources.size() + best_c].row_min = true;
  }
  return table;
}

std::string distance_table_csv(const DistanceTable& table) {
  std::ostringstream out;
  out << "target";
  for (const auto& s : table.source_ids)
    out << "," << s << "_mean," << s << "_std";
  out << ",min_source\n";
  for (size_t r = 0; r < table.target_ids.size(); ++r) {
    out << table.target_ids[r];
    std::string min_source;
    for (size_t c = 0; c < table.source_ids.size(); ++c) {
      const DistanceCell& cell = table.cell(r, c);
      if (!cell.present) {
        out << ",-,-";
      } else {
        out << "," << format_double(cell.mean) << "," << format_double(cell.std_dev);
        if (cell.row_min) min_source = table.source_ids[c];
      }
    }
    out << "," << min_source << "\n";
  }
  return out.str();
}

std::string distance_table_json(const DistanceTable& table) {
  nlohmann::ordered_json j;
  j["targets"] = table.target_ids;
  j["sources"] = table.source_ids;
  auto rows = nlohmann::ordered_json::array();
  for (size_t r = 0; r < table.target_ids.size(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (size_t c = 0; c < table.source_ids.size(); ++c) {
      const DistanceCell& cell = table.cell(r, c);
      if (!cell.present) {
        row.push_back(nullptr);
      } else {
        row.push_back({{"mean", cell.mean}, {"std", cell.std_dev}, {"row_min", cell.row_min}});
      }
    }
    rows.push_back(row);
  }
  j["cells"] = rows;
  return j.dump(2);
}

} // namespace xdr
