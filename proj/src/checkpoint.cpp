#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "json_util.hpp"
#include "tbsa/error.hpp"
#include "tbsa/model.hpp"

namespace tbsa {
namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'T', 'B', 'S', 'A', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
  json meta;
  meta["config"] = to_json(model.config);
  meta["vocab"] = model.vocab.tokens();
  json dir = json::array();
  visit_params(model.params, [&](const std::string& name, const Tensor& t) {
    dir.push_back(json{{"name", name}, {"shape", t.shape()}});
  });
  meta["tensors"] = std::move(dir);
  const std::string header = meta.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(out, kVersion);
  write_pod<std::uint32_t>(out, 0);  // reserved
  write_pod<std::uint64_t>(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  visit_params(model.params, [&](const std::string&, const Tensor& t) {
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  });
  if (!out) throw DataError("short write on checkpoint: " + path);
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a model checkpoint: " + path);
  }
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  read_pod<std::uint32_t>(in);  // reserved
  const auto header_len = read_pod<std::uint64_t>(in);
  std::string header(header_len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw DataError("truncated checkpoint header: " + path);

  json meta;
  try {
    meta = json::parse(header);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad checkpoint header: ") + e.what());
  }

  Model m;
  m.config = model_config_from_json(meta.at("config"));
  m.config.validate();
  for (const auto& tok : meta.at("vocab")) m.vocab.add(tok.get<std::string>());
  if (m.vocab.tokens() != meta.at("vocab").get<std::vector<std::string>>()) {
    throw DataError("checkpoint vocabulary does not start with the unknown-word entry");
  }

  ModelParams p;
  p.transition.trainable = m.config.transition_trainable;
  auto set_sizes = [](LstmParams& q, std::size_t input, std::size_t hidden) {
    q.input_size = input;
    q.hidden_size = hidden;
  };
  set_sizes(p.bound_fwd, m.config.embedding_dim, m.config.boundary_hidden / 2);
  set_sizes(p.bound_bwd, m.config.embedding_dim, m.config.boundary_hidden / 2);
  set_sizes(p.unif_fwd, m.config.boundary_hidden, m.config.unified_hidden / 2);
  set_sizes(p.unif_bwd, m.config.boundary_hidden, m.config.unified_hidden / 2);

  const json& dir = meta.at("tensors");
  std::size_t idx = 0;
  visit_params(p, [&](const std::string& name, Tensor& t) {
    if (idx >= dir.size()) throw DataError("checkpoint tensor directory too short");
    const json& entry = dir[idx++];
    if (entry.at("name").get<std::string>() != name) {
      throw DataError("checkpoint tensor order mismatch at " + name);
    }
    t = Tensor(entry.at("shape").get<std::vector<std::size_t>>());
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
  });
  if (idx != dir.size()) throw DataError("checkpoint tensor directory too long");
  if (!in) throw DataError("truncated checkpoint data: " + path);
  m.params = std::move(p);
  return m;
}

}  // namespace tbsa
