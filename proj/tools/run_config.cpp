#include "run_config.hpp"

#include <algorithm>
#include <fstream>

#include "xdr/error.hpp"
#include "xdr/util.hpp"

namespace xdr::cli {

namespace {

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const std::string& ctx) {
  if (!j.is_object()) throw ValidationError("config: " + ctx + " must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end())
      throw ValidationError("config: unknown key '" + key + "' in " + ctx);
  }
}

void validate_dataset_keys(const nlohmann::json& j) {
  require_keys(j, {"id", "kind", "root", "target_shape", "split", "phase", "family",
                   "count", "seed"},
               "datasets[]");
  if (j.contains("phase"))
    require_keys(j.at("phase"), {"smoothness_sigma", "phase_range", "seed"},
                 "datasets[].phase");
}

} // namespace

const DatasetSpec& RunConfig::dataset(const std::string& id) const {
  for (const auto& d : datasets)
    if (d.id == id) return d;
  throw ValidationError("config: no dataset with id '" + id + "'");
}

RunConfig parse_run_config(const nlohmann::json& doc) {
  require_keys(doc, {"global_seed", "output_dir", "datasets", "mask", "cascade", "train",
                     "eval", "patch_stats"},
               "top level");

  RunConfig cfg;
  cfg.effective = doc;
  if (doc.contains("global_seed"))
    cfg.global_seed = doc.at("global_seed").get<std::uint64_t>();
  if (doc.contains("output_dir"))
    cfg.output_dir = doc.at("output_dir").get<std::string>();

  if (doc.contains("datasets")) {
    for (const auto& dj : doc.at("datasets")) {
      validate_dataset_keys(dj);
      cfg.datasets.push_back(DatasetSpec::from_json(dj));
    }
  }

  if (doc.contains("mask")) {
    const auto& m = doc.at("mask");
    require_keys(m, {"acceleration", "center_fraction", "sigma", "mode", "seed", "policy"},
                 "mask");
    cfg.mask = MaskArgs::from_json(m);
    if (m.contains("policy"))
      cfg.mask_policy = mask_policy_from_string(m.at("policy").get<std::string>());
  }

  if (doc.contains("cascade")) {
    require_keys(doc.at("cascade"),
                 {"n_cascades", "n_conv_per_block", "n_filters", "kernel_size",
                  "dc_lambda", "input_channels"},
                 "cascade");
    cfg.cascade = CascadeConfig::from_json(doc.at("cascade"));
  }

  if (doc.contains("train")) {
    const auto& t = doc.at("train");
    require_keys(t, {"dataset", "val_dataset", "epochs", "batch_size", "learning_rate",
                     "optimizer", "seed"},
                 "train");
    if (t.contains("dataset")) cfg.train_dataset = t.at("dataset").get<std::string>();
    if (t.contains("val_dataset"))
      cfg.val_dataset = t.at("val_dataset").get<std::string>();
    if (t.contains("epochs")) cfg.epochs = t.at("epochs").get<int>();
    if (t.contains("batch_size")) cfg.batch_size = t.at("batch_size").get<int>();
    if (t.contains("learning_rate"))
      cfg.learning_rate = t.at("learning_rate").get<double>();
    if (t.contains("optimizer"))
      cfg.optimizer = optimizer_from_string(t.at("optimizer").get<std::string>());
    if (t.contains("seed")) cfg.train_seed = t.at("seed").get<std::uint64_t>();
  }

  if (doc.contains("eval")) {
    const auto& e = doc.at("eval");
    require_keys(e, {"train_domains", "test_domains", "test_split", "test_count",
                     "error_images", "error_gain"},
                 "eval");
    if (e.contains("train_domains"))
      cfg.train_domains = e.at("train_domains").get<std::vector<std::string>>();
    if (e.contains("test_domains"))
      cfg.test_domains = e.at("test_domains").get<std::vector<std::string>>();
    if (e.contains("test_split"))
      cfg.test_split = split_from_string(e.at("test_split").get<std::string>());
    if (e.contains("test_count")) cfg.test_count = e.at("test_count").get<int>();
    if (e.contains("error_images")) cfg.error_images = e.at("error_images").get<int>();
    if (e.contains("error_gain")) cfg.error_gain = e.at("error_gain").get<double>();
  }

  if (doc.contains("patch_stats")) {
    const auto& p = doc.at("patch_stats");
    require_keys(p, {"targets", "sources", "n_target", "n_source", "n_per_source",
                     "patch_size", "norm", "block_size", "method", "compare", "seed",
                     "split"},
                 "patch_stats");
    if (p.contains("targets"))
      cfg.patch_targets = p.at("targets").get<std::vector<std::string>>();
    if (p.contains("sources"))
      cfg.patch_sources = p.at("sources").get<std::vector<std::string>>();
    if (p.contains("n_target")) cfg.n_target = p.at("n_target").get<std::int64_t>();
    if (p.contains("n_source")) cfg.n_source = p.at("n_source").get<std::int64_t>();
    if (p.contains("n_per_source")) {
      for (const auto& [key, value] : p.at("n_per_source").items())
        cfg.n_per_source[key] = value.get<std::int64_t>();
    }
    if (p.contains("patch_size")) cfg.patch_size = p.at("patch_size").get<int>();
    if (p.contains("norm"))
      cfg.patch_norm = patch_norm_from_string(p.at("norm").get<std::string>());
    if (p.contains("block_size")) cfg.block_size = p.at("block_size").get<int>();
    if (p.contains("method")) {
      const std::string m = p.at("method").get<std::string>();
      if (m == "wilcoxon")
        cfg.compare_method = CompareMethod::WilcoxonSignedRank;
      else if (m == "mann-whitney")
        cfg.compare_method = CompareMethod::MannWhitney;
      else
        throw ValidationError("config: patch_stats.method must be wilcoxon or mann-whitney");
    }
    if (p.contains("compare")) {
      for (const auto& c : p.at("compare")) {
        require_keys(c, {"target", "a", "b"}, "patch_stats.compare[]");
        cfg.compares.push_back({c.at("target").get<std::string>(),
                                c.at("a").get<std::string>(),
                                c.at("b").get<std::string>()});
      }
    }
    if (p.contains("seed")) cfg.patch_seed = p.at("seed").get<std::uint64_t>();
    if (p.contains("split"))
      cfg.patch_split = split_from_string(p.at("split").get<std::string>());
  }

  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config parse error in " + path.string() + ": " + e.what());
  }
  return parse_run_config(doc);
}

void update_manifest(const std::filesystem::path& output_dir, const std::string& command,
                     const std::string& config_hash,
                     const std::vector<std::filesystem::path>& artifacts) {
  const auto manifest_path = output_dir / "manifest.json";
  nlohmann::json manifest;
  if (std::filesystem::exists(manifest_path)) {
    try {
      manifest = nlohmann::json::parse(read_text_file(manifest_path));
    } catch (const nlohmann::json::exception&) {
      manifest = nlohmann::json::object(); // rebuilt below
    }
  }
  if (!manifest.contains("runs") || !manifest["runs"].is_object())
    manifest["runs"] = nlohmann::json::object();

  std::vector<std::string> rel;
  for (const auto& a : artifacts)
    rel.push_back(std::filesystem::relative(a, output_dir).generic_string());
  std::sort(rel.begin(), rel.end());

  manifest["runs"][command] = {{"config_hash", config_hash}, {"artifacts", rel}};
  write_text_file(manifest_path, manifest.dump(2) + "\n");
}

} // namespace xdr::cli
