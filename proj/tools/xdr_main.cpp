// xdr: undersampled single-coil Cartesian MRI reconstruction with a deep
// cascade of CNNs, cross-domain evaluation, and patch nearest-neighbour
// distance analysis.

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdlib>
#include <iostream>

#include "run_config.hpp"
#include "xdr/cimg_io.hpp"
#include "xdr/error.hpp"
#include "xdr/eval.hpp"
#include "xdr/patches.hpp"
#include "xdr/rng.hpp"
#include "xdr/util.hpp"

namespace fs = std::filesystem;
using namespace xdr;
using cli::RunConfig;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string output_dir;
  int threads = 0;
};

fs::path resolve_output_dir(const GlobalArgs& args, const RunConfig* cfg) {
  if (!args.output_dir.empty()) return args.output_dir;
  if (cfg && !cfg->output_dir.empty()) return cfg->output_dir;
  if (const char* env = std::getenv("XDR_OUTPUT_DIR"); env && *env) return env;
  return "out";
}

RunConfig require_config(const GlobalArgs& args) {
  if (args.config_path.empty())
    throw ValidationError("this subcommand requires --config <file>");
  return cli::load_run_config(args.config_path);
}

std::uint64_t base_seed(const RunConfig& cfg) {
  return cfg.train_seed.value_or(cfg.global_seed);
}

TrainConfig make_train_config(const RunConfig& cfg, const std::string& dataset_id,
                              const fs::path& output_dir, int threads) {
  TrainConfig tc;
  tc.dataset = cfg.dataset(dataset_id);
  if (!cfg.val_dataset.empty()) tc.val_dataset = cfg.dataset(cfg.val_dataset);
  tc.mask = cfg.mask;
  tc.mask_policy = cfg.mask_policy;
  tc.cascade = cfg.cascade;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.learning_rate = cfg.learning_rate;
  tc.optimizer = cfg.optimizer;
  tc.seed = derive_seed(base_seed(cfg), dataset_id);
  tc.checkpoint_dir = output_dir / "checkpoints" / dataset_id;
  tc.threads = threads;
  return tc;
}

DatasetSpec test_spec_for(const RunConfig& cfg, const std::string& id) {
  return cfg.dataset(id).with_split(cfg.test_split, cfg.test_count);
}

int cmd_mask(int height, int width, double accel, double center_frac, double sigma,
             const std::string& mode, std::uint64_t seed, const std::string& out) {
  const SamplingMask mask = generate_mask(height, width, accel, center_frac, sigma,
                                          mask_mode_from_string(mode), seed);
  write_mask(out, mask);
  std::cout << "wrote " << out << " (" << mask.count() << " of "
            << mask.sampled.size() << " entries sampled)\n";
  return 0;
}

int cmd_synth(const std::string& input, const std::string& out, int height, int width,
              double smoothness_sigma, double phase_range, std::uint64_t seed) {
  PhaseParams base;
  base.smoothness_sigma = smoothness_sigma;
  base.phase_range = phase_range;
  base.seed = seed;
  const Dataset ds = load_natural_dir(input, height, width, base);
  fs::create_directories(out);
  for (size_t i = 0; i < ds.slices.size(); ++i)
    write_cimg(fs::path(out) / (ds.ids[i] + ".cimg"), ds.slices[i]);
  write_text_file(fs::path(out) / "load_report.json", ds.report.to_json().dump(2) + "\n");
  std::cout << "synthesised " << ds.report.decoded << " slices ("
            << ds.report.skipped << " skipped) into " << out << "\n";
  return 0;
}

int cmd_train(const GlobalArgs& g) {
  const RunConfig cfg = require_config(g);
  if (cfg.train_dataset.empty())
    throw ValidationError("config: train.dataset is required for the train command");
  const fs::path out = resolve_output_dir(g, &cfg);
  fs::create_directories(out);

  const TrainConfig tc = make_train_config(cfg, cfg.train_dataset, out, g.threads);
  const TrainResult result = train(tc);

  for (const auto& l : result.log) {
    std::cout << "epoch " << l.epoch << " " << l.split << " loss "
              << format_double(l.loss);
    if (std::isfinite(l.psnr)) std::cout << " psnr " << format_double(l.psnr);
    std::cout << "\n";
  }
  cli::update_manifest(out, "train", config_hash(cfg.effective),
                       {result.best_path, result.final_path, result.log_path});
  std::cout << "checkpoints in " << tc.checkpoint_dir << "\n";
  return 0;
}

int cmd_recon(const GlobalArgs& g, const std::string& checkpoint,
              const std::string& input, const std::string& mask_file,
              const std::string& out_name, const std::string& png_name) {
  RunConfig cfg;
  if (!g.config_path.empty()) cfg = cli::load_run_config(g.config_path);
  const fs::path out_dir = resolve_output_dir(g, &cfg);
  fs::create_directories(out_dir);

  if (!fs::exists(checkpoint))
    throw std::runtime_error("checkpoint not found: " + checkpoint);
  if (!fs::exists(input)) throw std::runtime_error("input slice not found: " + input);

  const CascadeCheckpoint ckpt = load_checkpoint(checkpoint);
  const ComplexImage slice = read_cimg(input);
  const SamplingMask mask =
      !mask_file.empty()
          ? read_mask(mask_file)
          : cfg.mask.make(slice.height, slice.width, cfg.mask.seed);

  const ComplexImage recon = reconstruct(ckpt, slice, mask);
  std::vector<fs::path> artifacts;
  const fs::path out_path = out_dir / out_name;
  write_cimg(out_path, recon);
  artifacts.push_back(out_path);

  if (!png_name.empty()) {
    Dataset single;
    single.slices.push_back(slice);
    single.ids.push_back(fs::path(png_name).stem().string());
    MaskArgs args;
    args.acceleration = mask.acceleration;
    args.center_fraction = mask.center_fraction;
    args.sigma = mask.sigma;
    args.mode = mask.mode;
    args.seed = mask.seed;
    const auto pngs = export_error_images(ckpt, single, args, MaskPolicy::Fixed,
                                          out_dir, cfg.error_gain);
    artifacts.insert(artifacts.end(), pngs.begin(), pngs.end());
  }

  nlohmann::json hash_doc = cfg.effective.is_null() ? nlohmann::json::object() : cfg.effective;
  hash_doc["recon_input"] = input;
  hash_doc["recon_checkpoint"] = checkpoint;
  cli::update_manifest(out_dir, "recon", config_hash(hash_doc), artifacts);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_eval(const GlobalArgs& g, const std::string& checkpoint,
             const std::string& dataset_id) {
  const RunConfig cfg = require_config(g);
  const fs::path out = resolve_output_dir(g, &cfg);
  fs::create_directories(out);
  if (!fs::exists(checkpoint))
    throw std::runtime_error("checkpoint not found: " + checkpoint);

  const CascadeCheckpoint ckpt = load_checkpoint(checkpoint);
  const DatasetSpec spec = test_spec_for(cfg, dataset_id);
  const auto records = evaluate_model(ckpt, spec, cfg.mask, cfg.mask_policy);

  std::vector<fs::path> artifacts;
  const fs::path records_path = out / "records.csv";
  write_text_file(records_path, records_csv(records));
  artifacts.push_back(records_path);

  double psnr_mean = 0.0, ssim_mean = 0.0;
  for (const auto& r : records) {
    psnr_mean += r.psnr;
    ssim_mean += r.ssim;
  }
  psnr_mean /= static_cast<double>(records.size());
  ssim_mean /= static_cast<double>(records.size());
  nlohmann::ordered_json summary;
  summary["test_domain"] = spec.id;
  summary["slices"] = records.size();
  summary["psnr_mean"] = psnr_mean;
  summary["ssim_mean"] = ssim_mean;
  const fs::path summary_path = out / "summary.json";
  write_text_file(summary_path, summary.dump(2) + "\n");
  artifacts.push_back(summary_path);

  if (cfg.error_images > 0) {
    Dataset ds = load_dataset(spec);
    const size_t keep = std::min<size_t>(cfg.error_images, ds.slices.size());
    ds.slices.resize(keep);
    ds.ids.resize(keep);
    const auto pngs = export_error_images(ckpt, ds, cfg.mask, cfg.mask_policy,
                                          out / "errors" / spec.id, cfg.error_gain);
    artifacts.insert(artifacts.end(), pngs.begin(), pngs.end());
  }

  cli::update_manifest(out, "eval", config_hash(cfg.effective), artifacts);
  std::cout << "evaluated " << records.size() << " slices: mean psnr "
            << format_double(psnr_mean) << ", mean ssim " << format_double(ssim_mean)
            << "\n";
  return 0;
}

int cmd_xdomain(const GlobalArgs& g) {
  const RunConfig cfg = require_config(g);
  if (cfg.train_domains.empty() || cfg.test_domains.empty())
    throw ValidationError("config: eval.train_domains and eval.test_domains are required");
  const fs::path out = resolve_output_dir(g, &cfg);
  fs::create_directories(out);

  std::vector<fs::path> artifacts;
  std::vector<EvalRecord> records;
  for (const auto& train_id : cfg.train_domains) {
    const TrainConfig tc = make_train_config(cfg, train_id, out, g.threads);
    std::cout << "training on " << train_id << " (" << tc.epochs << " epochs)\n";
    const TrainResult result = train(tc);
    artifacts.push_back(result.best_path);
    artifacts.push_back(result.final_path);
    artifacts.push_back(result.log_path);

    for (const auto& test_id : cfg.test_domains) {
      auto recs = evaluate_model(result.best, test_spec_for(cfg, test_id), cfg.mask,
                                 cfg.mask_policy, train_id);
      std::cout << "  " << train_id << " -> " << test_id << ": " << recs.size()
                << " slices\n";
      records.insert(records.end(), recs.begin(), recs.end());

      if (cfg.error_images > 0) {
        Dataset ds = load_dataset(test_spec_for(cfg, test_id));
        const size_t keep = std::min<size_t>(cfg.error_images, ds.slices.size());
        ds.slices.resize(keep);
        ds.ids.resize(keep);
        const auto pngs = export_error_images(
            result.best, ds, cfg.mask, cfg.mask_policy,
            out / "errors" / (train_id + "__" + test_id), cfg.error_gain);
        artifacts.insert(artifacts.end(), pngs.begin(), pngs.end());
      }
    }
  }

  const fs::path records_path = out / "records.csv";
  write_text_file(records_path, records_csv(records));
  artifacts.push_back(records_path);

  const CrossDomainTable table = cross_domain_table(records);
  const fs::path table_csv_path = out / "table.csv";
  const fs::path table_json_path = out / "table.json";
  write_text_file(table_csv_path, table_csv(table));
  write_text_file(table_json_path, table_json(table) + "\n");
  artifacts.push_back(table_csv_path);
  artifacts.push_back(table_json_path);

  cli::update_manifest(out, "xdomain", config_hash(cfg.effective), artifacts);
  std::cout << "cross-domain table written to " << table_csv_path << "\n";
  return 0;
}

int cmd_patchdist(const GlobalArgs& g) {
  const RunConfig cfg = require_config(g);
  if (cfg.patch_targets.empty() || cfg.patch_sources.size() < 2)
    throw ValidationError(
        "config: patch_stats.targets (>=1) and sources (>=2) are required");
  const fs::path out = resolve_output_dir(g, &cfg);
  fs::create_directories(out);

  const std::uint64_t seed = cfg.patch_seed.value_or(cfg.global_seed);
  auto extract = [&](const std::string& id, const char* role, std::int64_t n) {
    const DatasetSpec spec = cfg.dataset(id).with_split(cfg.patch_split);
    const Dataset ds = load_dataset(spec);
    return extract_patches(ds.slices, n, cfg.patch_size,
                           derive_seed(seed, std::string(role) + "-" + id), id,
                           cfg.patch_norm);
  };

  std::vector<PatchSet> targets, sources;
  for (const auto& id : cfg.patch_targets) targets.push_back(extract(id, "target", cfg.n_target));
  for (const auto& id : cfg.patch_sources) {
    const auto it = cfg.n_per_source.find(id);
    sources.push_back(extract(id, "source", it != cfg.n_per_source.end() ? it->second
                                                                         : cfg.n_source));
  }

  const DistanceTable table = distance_table(targets, sources, cfg.block_size);
  std::vector<fs::path> artifacts;
  const fs::path csv_path = out / "patch_table.csv";
  const fs::path json_path = out / "patch_table.json";
  write_text_file(csv_path, distance_table_csv(table));
  write_text_file(json_path, distance_table_json(table) + "\n");
  artifacts.push_back(csv_path);
  artifacts.push_back(json_path);

  if (!cfg.compares.empty()) {
    auto find = [](const std::vector<PatchSet>& sets, const std::string& id) -> const PatchSet& {
      for (const auto& s : sets)
        if (s.domain_id == id) return s;
      throw ValidationError("patch_stats.compare references unknown set '" + id + "'");
    };
    auto results = nlohmann::ordered_json::array();
    for (const auto& c : cfg.compares) {
      const CompareResult r = compare_sources(find(targets, c.target),
                                              find(sources, c.source_a),
                                              find(sources, c.source_b),
                                              cfg.compare_method);
      nlohmann::ordered_json rj;
      rj["target"] = c.target;
      rj["source_a"] = c.source_a;
      rj["source_b"] = c.source_b;
      rj["mean_a"] = r.mean_a;
      rj["mean_b"] = r.mean_b;
      rj["p_value"] = r.p_value;
      rj["method"] = cfg.compare_method == CompareMethod::WilcoxonSignedRank
                         ? "wilcoxon"
                         : "mann-whitney";
      results.push_back(rj);
    }
    const fs::path cmp_path = out / "compare.json";
    write_text_file(cmp_path, results.dump(2) + "\n");
    artifacts.push_back(cmp_path);
  }

  cli::update_manifest(out, "patchdist", config_hash(cfg.effective), artifacts);
  std::cout << "patch distance table written to " << csv_path << "\n";
  return 0;
}

int cmd_report(const GlobalArgs& g) {
  RunConfig cfg;
  if (!g.config_path.empty()) cfg = cli::load_run_config(g.config_path);
  const fs::path out = resolve_output_dir(g, &cfg);
  const fs::path manifest_path = out / "manifest.json";
  if (!fs::exists(manifest_path)) {
    std::cerr << "nothing to report: no manifest in " << out << "\n";
    return 1;
  }
  const auto manifest = nlohmann::json::parse(read_text_file(manifest_path));
  if (!manifest.contains("runs") || manifest["runs"].empty()) {
    std::cerr << "nothing to report: manifest lists no runs\n";
    return 1;
  }

  fs::create_directories(out / "report");
  std::string md = "# xdr run report\n";
  nlohmann::ordered_json index;
  for (const auto& [command, run] : manifest["runs"].items()) {
    index[command] = run;
    md += "\n## " + command + "\n\nconfig hash `" +
          run.at("config_hash").get<std::string>() + "`\n\n";
    for (const auto& a : run.at("artifacts")) {
      const std::string rel = a.get<std::string>();
      md += "- `" + rel + "`" + (fs::exists(out / rel) ? "" : " (missing)") + "\n";
    }
  }
  for (const char* table : {"table.csv", "patch_table.csv", "records.csv"}) {
    if (fs::exists(out / table)) {
      md += "\n## " + std::string(table) + "\n\n```\n" + read_text_file(out / table) +
            "```\n";
    }
  }
  const fs::path index_path = out / "report" / "index.json";
  const fs::path md_path = out / "report" / "report.md";
  write_text_file(index_path, index.dump(2) + "\n");
  write_text_file(md_path, md);
  cli::update_manifest(out, "report",
                       config_hash(cfg.effective.is_null() ? nlohmann::json::object()
                                                           : cfg.effective),
                       {index_path, md_path});
  std::cout << "report written to " << md_path << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"deep-cascade MRI reconstruction, cross-domain evaluation and patch statistics"};
  app.require_subcommand(1);
  app.fallthrough(); // global flags may follow the subcommand name

  GlobalArgs g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  app.add_option("--output-dir", g.output_dir,
                 "output root (default: $XDR_OUTPUT_DIR or ./out)");
  app.add_option("--threads", g.threads, "worker threads (0 = auto)");

  // mask
  auto* mask_cmd = app.add_subcommand("mask", "generate a sampling mask container");
  int mh = 256, mw = 256;
  double accel = 4.0, center_frac = 0.08, msigma = 0.25;
  std::string mmode = "lines-1d", mout = "mask.cimg";
  std::uint64_t mseed = 0;
  mask_cmd->add_option("--height", mh);
  mask_cmd->add_option("--width", mw);
  mask_cmd->add_option("--accel", accel);
  mask_cmd->add_option("--center-frac", center_frac);
  mask_cmd->add_option("--sigma", msigma);
  mask_cmd->add_option("--mode", mmode);
  mask_cmd->add_option("--seed", mseed);
  mask_cmd->add_option("--out", mout);

  // synth
  auto* synth_cmd =
      app.add_subcommand("synth", "convert an image directory into phase-synthesised slices");
  std::string sin, sout;
  int sh = 256, sw = 256;
  double s_sigma = 16.0, s_range = M_PI;
  std::uint64_t s_seed = 0;
  synth_cmd->add_option("--input", sin)->required();
  synth_cmd->add_option("--out", sout)->required();
  synth_cmd->add_option("--height", sh);
  synth_cmd->add_option("--width", sw);
  synth_cmd->add_option("--smoothness-sigma", s_sigma);
  synth_cmd->add_option("--phase-range", s_range);
  synth_cmd->add_option("--seed", s_seed);

  // train
  auto* train_cmd = app.add_subcommand("train", "train a cascade model from the config");

  // recon
  auto* recon_cmd = app.add_subcommand("recon", "reconstruct a single slice");
  std::string r_ckpt, r_input, r_mask, r_out = "recon.cimg", r_png;
  recon_cmd->add_option("--checkpoint", r_ckpt)->required();
  recon_cmd->add_option("--input", r_input)->required();
  recon_cmd->add_option("--mask", r_mask, "mask container; generated from config if absent");
  recon_cmd->add_option("--out", r_out, "output file name under the output dir");
  recon_cmd->add_option("--png", r_png, "also export gt/recon/error PNGs with this stem");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a test dataset");
  std::string e_ckpt, e_dataset;
  eval_cmd->add_option("--checkpoint", e_ckpt)->required();
  eval_cmd->add_option("--dataset", e_dataset, "dataset id from the config")->required();

  // xdomain / patchdist / report
  auto* xdomain_cmd =
      app.add_subcommand("xdomain", "train per domain and evaluate the full grid");
  auto* patchdist_cmd =
      app.add_subcommand("patchdist", "cross-domain patch NN distance table");
  auto* report_cmd = app.add_subcommand("report", "bundle run artifacts into a report");

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (g.threads > 0) omp_set_num_threads(g.threads);
#endif

  try {
    if (mask_cmd->parsed())
      return cmd_mask(mh, mw, accel, center_frac, msigma, mmode, mseed, mout);
    if (synth_cmd->parsed())
      return cmd_synth(sin, sout, sh, sw, s_sigma, s_range, s_seed);
    if (train_cmd->parsed()) return cmd_train(g);
    if (recon_cmd->parsed()) return cmd_recon(g, r_ckpt, r_input, r_mask, r_out, r_png);
    if (eval_cmd->parsed()) return cmd_eval(g, e_ckpt, e_dataset);
    if (xdomain_cmd->parsed()) return cmd_xdomain(g);
    if (patchdist_cmd->parsed()) return cmd_patchdist(g);
    if (report_cmd->parsed()) return cmd_report(g);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
