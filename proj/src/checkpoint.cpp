#include "mgroute/neural/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace mgroute::neural {

namespace {

constexpr char kMagic[8] = {'M', 'G', 'R', 'C', 'K', 'P', 'T', '1'};

const char* norm_name(NormKind n) {
  switch (n) {
    case NormKind::Layer: return "layer";
    case NormKind::Instance: return "instance";
    case NormKind::None: return "none";
  }
  return "?";
}

NormKind norm_from(const std::string& s) {
  if (s == "layer") return NormKind::Layer;
  if (s == "instance") return NormKind::Instance;
  if (s == "none") return NormKind::None;
  throw ContractError("checkpoint: unknown norm kind '" + s + "'");
}

void write_u64(std::ofstream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::ifstream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_doubles(std::ofstream& out, const std::vector<double>& xs) {
  for (double x : xs) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    write_u64(out, bits);
  }
}

}  // namespace

std::string config_to_json(const ModelConfig& cfg) {
  nlohmann::json j;
  j["embed_dim"] = cfg.embed_dim;
  j["heads"] = cfg.heads;
  j["layers"] = cfg.layers;
  j["l1"] = cfg.l1;
  j["l2"] = cfg.l2;
  j["l3"] = cfg.l3;
  j["tanh_clip"] = cfg.tanh_clip;
  j["hyper_hidden"] = cfg.hyper_hidden;
  j["ffn_mult"] = cfg.ffn_mult;
  j["score_cost"] = cfg.score_cost == ScalarKind::Linear ? "linear" : "chebyshev";
  j["norm"] = norm_name(cfg.norm);
  j["kind"] = problem_name(cfg.kind);
  j["cost_dim"] = cfg.cost_dim;
  return j.dump();
}

ModelConfig config_from_json(const std::string& json) {
  nlohmann::json j = nlohmann::json::parse(json);
  ModelConfig cfg;
  cfg.embed_dim = j.at("embed_dim").get<int>();
  cfg.heads = j.at("heads").get<int>();
  cfg.layers = j.at("layers").get<int>();
  cfg.l1 = j.at("l1").get<int>();
  cfg.l2 = j.at("l2").get<int>();
  cfg.l3 = j.at("l3").get<int>();
  cfg.tanh_clip = j.at("tanh_clip").get<double>();
  cfg.hyper_hidden = j.at("hyper_hidden").get<int>();
  cfg.ffn_mult = j.at("ffn_mult").get<int>();
  cfg.score_cost = j.at("score_cost").get<std::string>() == "linear"
                       ? ScalarKind::Linear
                       : ScalarKind::Chebyshev;
  cfg.norm = norm_from(j.at("norm").get<std::string>());
  cfg.kind = parse_problem(j.at("kind").get<std::string>());
  cfg.cost_dim = j.at("cost_dim").get<int>();
  return cfg;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "save_checkpoint: cannot open '" + path + "'");
  out.write(kMagic, 8);
  std::string manifest = ckpt.model_type + "\n" + config_to_json(ckpt.cfg) + "\n";
  write_u64(out, manifest.size());
  out.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
  write_u64(out, ckpt.params.params.size());
  for (const auto& [name, tensor] : ckpt.params.params) {
    write_u64(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u64(out, static_cast<std::uint64_t>(tensor.rows));
    write_u64(out, static_cast<std::uint64_t>(tensor.cols));
    write_doubles(out, tensor.data);
  }
  require(out.good(), "save_checkpoint: write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "load_checkpoint: cannot open '" + path + "'");
  char magic[8];
  in.read(magic, 8);
  require(in.good() && std::memcmp(magic, kMagic, 8) == 0,
          "load_checkpoint: bad magic in '" + path + "'");
  Checkpoint ckpt;
  std::uint64_t manifest_len = read_u64(in);
  std::string manifest(manifest_len, '\0');
  in.read(manifest.data(), static_cast<std::streamsize>(manifest_len));
  auto nl = manifest.find('\n');
  require(nl != std::string::npos, "load_checkpoint: malformed manifest");
  ckpt.model_type = manifest.substr(0, nl);
  ckpt.cfg = config_from_json(manifest.substr(nl + 1));
  std::uint64_t count = read_u64(in);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t name_len = read_u64(in);
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    int rows = static_cast<int>(read_u64(in));
    int cols = static_cast<int>(read_u64(in));
    Tensor t(rows, cols);
    for (auto& x : t.data) {
      std::uint64_t bits = read_u64(in);
      std::memcpy(&x, &bits, 8);
    }
    require(in.good(), "load_checkpoint: truncated file '" + path + "'");
    ckpt.params.params.emplace(std::move(name), std::move(t));
  }
  return ckpt;
}

}  // namespace mgroute::neural
