#include "xdr/train.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "xdr/error.hpp"
#include "xdr/metrics.hpp"
#include "xdr/rng.hpp"
#include "xdr/util.hpp"

namespace xdr {

std::string to_string(MaskPolicy p) {
  return p == MaskPolicy::Fixed ? "fixed" : "per-sample";
}

MaskPolicy mask_policy_from_string(const std::string& s) {
  if (s == "fixed") return MaskPolicy::Fixed;
  if (s == "per-sample") return MaskPolicy::PerSample;
  throw ValidationError("unknown mask policy '" + s + "' (expected fixed or per-sample)");
}

SamplingMask MaskArgs::make(int height, int width, std::uint64_t seed_override) const {
  return generate_mask(height, width, acceleration, center_fraction, sigma, mode,
                       seed_override);
}

nlohmann::ordered_json MaskArgs::to_json() const {
  nlohmann::ordered_json j;
  j["acceleration"] = acceleration;
  j["center_fraction"] = center_fraction;
  j["sigma"] = sigma;
  j["mode"] = to_string(mode);
  j["seed"] = seed;
  return j;
}

MaskArgs MaskArgs::from_json(const nlohmann::json& j) {
  MaskArgs a;
  if (j.contains("acceleration")) a.acceleration = j.at("acceleration").get<double>();
  if (j.contains("center_fraction"))
    a.center_fraction = j.at("center_fraction").get<double>();
  if (j.contains("sigma")) a.sigma = j.at("sigma").get<double>();
  if (j.contains("mode")) a.mode = mask_mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("seed")) a.seed = j.at("seed").get<std::uint64_t>();
  return a;
}

void TrainConfig::validate() const {
  dataset.validate();
  if (val_dataset) val_dataset->validate();
  cascade.validate();
  if (epochs < 1) throw ValidationError("train config: epochs must be >= 1");
  if (batch_size < 1) throw ValidationError("train config: batch_size must be >= 1");
  if (!(learning_rate >= 0.0))
    throw ValidationError("train config: learning_rate must be >= 0");
  if (checkpoint_dir.empty())
    throw ValidationError("train config: checkpoint_dir required");
}

namespace {

struct Sample {
  ComplexImage gt; // normalised
  SamplingMask mask;
  Undersampled us;
};

std::vector<Sample> prepare(const Dataset& ds, const MaskArgs& args, MaskPolicy policy) {
  std::vector<Sample> samples(ds.slices.size());
  SamplingMask fixed;
  if (policy == MaskPolicy::Fixed && !ds.slices.empty())
    fixed = args.make(ds.slices[0].height, ds.slices[0].width, args.seed);
  for (size_t i = 0; i < ds.slices.size(); ++i) {
    auto [norm, scale] = normalize_slice(ds.slices[i]);
    (void)scale;
    samples[i].gt = std::move(norm);
    samples[i].mask = policy == MaskPolicy::Fixed
                          ? fixed
                          : args.make(samples[i].gt.height, samples[i].gt.width,
                                      derive_seed(args.seed, "mask", i));
    samples[i].us = undersample(samples[i].gt, samples[i].mask);
  }
  return samples;
}

// Mean loss (and mean PSNR when requested) of the current parameters.
void evaluate(const CascadeModel& model, const std::vector<Sample>& samples,
              double& mean_loss, double* mean_psnr) {
  double loss_acc = 0.0, psnr_acc = 0.0;
  for (const auto& s : samples) {
    const ComplexImage out = model.forward(s.us.zero_filled, s.us.kspace, s.mask);
    loss_acc += mse_loss(out, s.gt);
    if (mean_psnr) psnr_acc += psnr(s.gt.magnitude(), out.magnitude());
  }
  mean_loss = loss_acc / static_cast<double>(samples.size());
  if (mean_psnr) *mean_psnr = psnr_acc / static_cast<double>(samples.size());
}

std::string log_line(const EpochLog& l) {
  nlohmann::ordered_json j;
  j["epoch"] = l.epoch;
  j["split"] = l.split;
  j["loss"] = l.loss;
  if (std::isfinite(l.psnr)) j["psnr"] = l.psnr;
  return j.dump();
}

} // namespace

TrainResult train(const TrainConfig& config) {
  config.validate();

  const Dataset train_ds = load_dataset(config.dataset);
  if (train_ds.slices.empty()) throw ValidationError("train: empty dataset");
  DatasetSpec val_spec =
      config.val_dataset
          ? *config.val_dataset
          : config.dataset.with_split(Split::Val,
                                      std::max(4, config.dataset.count / 5));
  const Dataset val_ds = load_dataset(val_spec);

  auto train_samples = prepare(train_ds, config.mask, config.mask_policy);
  auto val_samples = prepare(val_ds, config.mask, config.mask_policy);

  const int height = train_samples[0].gt.height;
  const int width = train_samples[0].gt.width;

  CascadeModel model(config.cascade);
  model.init(config.seed);
  Optimizer opt(config.optimizer, config.learning_rate, model.param_count());

  std::filesystem::create_directories(config.checkpoint_dir);

  TrainResult result;
  auto log = [&](int epoch, const std::string& split, double loss, double psnr_v) {
    result.log.push_back({epoch, split, loss, psnr_v});
  };

  // Epoch 0: the freshly initialised model, before any step. With the
  // zero-initialised final convolutions this is the identity-plus-DC
  // baseline.
  {
    double loss, vloss, vpsnr;
    evaluate(model, train_samples, loss, nullptr);
    log(0, "train", loss, std::numeric_limits<double>::quiet_NaN());
    evaluate(model, val_samples, vloss, &vpsnr);
    log(0, "val", vloss, vpsnr);
  }

  const int n_threads =
      config.threads > 0 ? config.threads : std::min<int>(config.batch_size, 4);

  Rng shuffle_rng(derive_seed(config.seed, "shuffle"));
  std::vector<size_t> order(train_samples.size());
  std::iota(order.begin(), order.end(), size_t{0});

  std::vector<CascadeModel::Workspace> workspaces(
      std::max(1, std::min<int>(n_threads, config.batch_size)));
  std::vector<std::vector<float>> grads(workspaces.size());
  std::vector<float> grad_sum(model.param_count());

  double best_val_psnr = -std::numeric_limits<double>::infinity();
  double final_train_loss = 0.0, final_val_loss = 0.0, final_val_psnr = 0.0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    // Fisher-Yates with the run RNG; deterministic given config.seed.
    for (size_t i = order.size() - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.index(i + 1)]);

    double epoch_loss = 0.0;
    for (size_t b0 = 0; b0 < order.size(); b0 += config.batch_size) {
      const size_t members =
          std::min<size_t>(config.batch_size, order.size() - b0);
      std::vector<double> losses(members, 0.0);
      std::vector<std::exception_ptr> errors(members);
      for (auto& g : grads) g.assign(model.param_count(), 0.0f);

// exceptions must not unwind through the parallel region
#pragma omp parallel for schedule(static) num_threads(static_cast<int>(workspaces.size()))
      for (size_t m = 0; m < members; ++m) {
#ifdef _OPENMP
        const size_t slot = static_cast<size_t>(omp_get_thread_num());
#else
        const size_t slot = 0;
#endif
        try {
          const Sample& s = train_samples[order[b0 + m]];
          Tensor out = model.forward_train(to_tensor(s.us.zero_filled), s.us.kspace,
                                           s.mask, workspaces[slot]);
          const Tensor gt = to_tensor(s.gt);
          losses[m] = mse_loss(out, gt);
          model.backward(mse_loss_grad(out, gt), s.mask, workspaces[slot], grads[slot]);
        } catch (...) {
          errors[m] = std::current_exception();
        }
      }

      for (size_t m = 0; m < members; ++m) {
        const std::string context = "epoch " + std::to_string(epoch) + ", sample " +
                                    std::to_string(order[b0 + m]);
        if (errors[m]) {
          try {
            std::rethrow_exception(errors[m]);
          } catch (const std::exception& e) {
            throw std::runtime_error("training aborted at " + context + ": " + e.what());
          }
        }
        if (!std::isfinite(losses[m]))
          throw std::runtime_error("training diverged (non-finite loss) at " + context);
        epoch_loss += losses[m];
      }

      // Deterministic reduction: slot order is fixed, independent of the
      // scheduling of the parallel loop above.
      std::fill(grad_sum.begin(), grad_sum.end(), 0.0f);
      const float inv = 1.0f / static_cast<float>(members);
      for (const auto& g : grads)
        for (size_t i = 0; i < grad_sum.size(); ++i) grad_sum[i] += g[i];
      for (auto& v : grad_sum) v *= inv;
      opt.step(model.params(), grad_sum);
    }

    epoch_loss /= static_cast<double>(train_samples.size());
    log(epoch, "train", epoch_loss, std::numeric_limits<double>::quiet_NaN());

    double vloss, vpsnr;
    try {
      evaluate(model, val_samples, vloss, &vpsnr);
    } catch (const std::exception& e) {
      throw std::runtime_error("training aborted at epoch " + std::to_string(epoch) +
                               ", validation pass: " + e.what());
    }
    if (!std::isfinite(vloss))
      throw std::runtime_error("training diverged (non-finite loss) at epoch " +
                               std::to_string(epoch) + ", validation pass");
    log(epoch, "val", vloss, vpsnr);

    final_train_loss = epoch_loss;
    final_val_loss = vloss;
    final_val_psnr = vpsnr;
    if (vpsnr > best_val_psnr) {
      best_val_psnr = vpsnr;
      nlohmann::ordered_json meta;
      meta["dataset"] = config.dataset.id;
      meta["epochs"] = epoch;
      meta["seed"] = config.seed;
      meta["final_loss"] = vloss;
      meta["val_psnr"] = vpsnr;
      meta["input_height"] = height;
      meta["input_width"] = width;
      meta["optimizer"] = to_string(config.optimizer);
      meta["learning_rate"] = config.learning_rate;
      meta["mask"] = config.mask.to_json();
      meta["mask_policy"] = to_string(config.mask_policy);
      result.best = CascadeCheckpoint::from_model(model, meta);
    }
  }

  nlohmann::ordered_json meta;
  meta["dataset"] = config.dataset.id;
  meta["epochs"] = config.epochs;
  meta["seed"] = config.seed;
  meta["final_loss"] = final_train_loss;
  meta["final_val_loss"] = final_val_loss;
  meta["val_psnr"] = final_val_psnr;
  meta["input_height"] = height;
  meta["input_width"] = width;
  meta["optimizer"] = to_string(config.optimizer);
  meta["learning_rate"] = config.learning_rate;
  meta["mask"] = config.mask.to_json();
  meta["mask_policy"] = to_string(config.mask_policy);
  result.final_state = CascadeCheckpoint::from_model(model, meta);

  result.best_path = config.checkpoint_dir / "best.ckpt";
  result.final_path = config.checkpoint_dir / "final.ckpt";
  result.log_path = config.checkpoint_dir / "train_log.ndjson";
  save_checkpoint(result.best_path, result.best);
  save_checkpoint(result.final_path, result.final_state);
  std::ostringstream log_text;
  for (const auto& l : result.log) log_text << log_line(l) << "\n";
  write_text_file(result.log_path, log_text.str());

  return result;
}

ComplexImage reconstruct(const CascadeModel& model,
                         const nlohmann::ordered_json& training_meta,
                         const ComplexImage& slice, const SamplingMask& mask) {
  if (training_meta.contains("input_height")) {
    const int th = training_meta.at("input_height").get<int>();
    const int tw = training_meta.at("input_width").get<int>();
    if (slice.height != th || slice.width != tw) {
      std::ostringstream msg;
      msg << "reconstruct: slice is " << slice.height << "x" << slice.width
          << " but the checkpoint was trained on " << th << "x" << tw
          << " (no implicit resize)";
      throw ValidationError(msg.str());
    }
  }
  auto [norm, scale] = normalize_slice(slice);
  const Undersampled us = undersample(norm, mask);
  ComplexImage out = model.forward(us.zero_filled, us.kspace, mask);
  const float s = static_cast<float>(scale);
  for (size_t i = 0; i < out.size(); ++i) {
    out.real[i] *= s;
    out.imag[i] *= s;
  }
  return out;
}

ComplexImage reconstruct(const CascadeCheckpoint& ckpt, const ComplexImage& slice,
                         const SamplingMask& mask) {
  return reconstruct(ckpt.to_model(), ckpt.training_meta, slice, mask);
}

} // namespace xdr
