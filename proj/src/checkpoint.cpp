#include "xdr/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "xdr/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace xdr {

namespace {
constexpr char kMagic[5] = {'C', 'K', 'P', 'T', '1'};
}

CascadeModel CascadeCheckpoint::to_model() const {
  CascadeModel model(config);
  if (parameters.size() != model.param_count())
    throw ValidationError("checkpoint: parameter blob does not match config");
  model.params() = parameters;
  return model;
}

CascadeCheckpoint CascadeCheckpoint::from_model(const CascadeModel& model,
                                                nlohmann::ordered_json meta) {
  CascadeCheckpoint c;
  c.config = model.config();
  c.parameters = model.params();
  c.training_meta = meta.is_null() ? nlohmann::ordered_json::object() : std::move(meta);
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const CascadeCheckpoint& ckpt) {
  nlohmann::ordered_json h;
  h["format_version"] = ckpt.format_version;
  h["config"] = ckpt.config.to_json();
  h["training_meta"] = ckpt.training_meta;
  h["param_count"] = ckpt.parameters.size();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const std::string hdr = h.dump();
  out.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
  out.put('\n');
  out.write(reinterpret_cast<const char*>(ckpt.parameters.data()),
            static_cast<std::streamsize>(ckpt.parameters.size() * sizeof(float)));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

CascadeCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  char magic[5];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("not a CKPT1 checkpoint: " + path.string());
  std::string hdr;
  if (!std::getline(in, hdr))
    throw std::runtime_error("truncated checkpoint header: " + path.string());

  CascadeCheckpoint ckpt;
  try {
    const auto h = nlohmann::ordered_json::parse(hdr);
    ckpt.format_version = h.at("format_version").get<int>();
    ckpt.config = CascadeConfig::from_json(h.at("config"));
    ckpt.training_meta = h.at("training_meta");
    const size_t count = h.at("param_count").get<size_t>();
    ckpt.parameters.resize(count);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad checkpoint header in " + path.string() + ": " + e.what());
  }

  in.read(reinterpret_cast<char*>(ckpt.parameters.data()),
          static_cast<std::streamsize>(ckpt.parameters.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(ckpt.parameters.size() * sizeof(float)))
    throw std::runtime_error("truncated parameter blob in " + path.string());

  CascadeModel probe(ckpt.config);
  if (probe.param_count() != ckpt.parameters.size())
    throw std::runtime_error("parameter count mismatch in " + path.string());
  return ckpt;
}

} // namespace xdr
