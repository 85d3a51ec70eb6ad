#pragma once

// Internal JSON (de)serialization for configs; shared by checkpoints,
// history export, and the CLI. Not part of the public headers.

#include "json.hpp"
#include "tbsa/model.hpp"
#include "tbsa/trainer.hpp"

namespace tbsa {

inline nlohmann::json to_json(const ModelConfig& c) {
  return nlohmann::json{{"embedding_dim", c.embedding_dim},
                        {"boundary_hidden", c.boundary_hidden},
                        {"unified_hidden", c.unified_hidden},
                        {"epsilon", c.epsilon},
                        {"window", c.window},
                        {"dropout", c.dropout},
                        {"use_bg", c.use_bg},
                        {"use_sc", c.use_sc},
                        {"use_oe", c.use_oe},
                        {"transition_trainable", c.transition_trainable},
                        {"seed", c.seed}};
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
  c.boundary_hidden = j.at("boundary_hidden").get<std::size_t>();
  c.unified_hidden = j.at("unified_hidden").get<std::size_t>();
  c.epsilon = j.at("epsilon").get<double>();
  c.window = j.at("window").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.use_bg = j.at("use_bg").get<bool>();
  c.use_sc = j.at("use_sc").get<bool>();
  c.use_oe = j.at("use_oe").get<bool>();
  c.transition_trainable = j.at("transition_trainable").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

inline nlohmann::json to_json(const TrainConfig& c) {
  return nlohmann::json{{"epochs", c.epochs},   {"lr0", c.lr0},
                        {"beta1", c.beta1},     {"beta2", c.beta2},
                        {"decay", c.decay},     {"batch_size", c.batch_size},
                        {"clip_norm", c.clip_norm}};
}

}  // namespace tbsa
