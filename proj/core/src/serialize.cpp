#include "semeq/serialize.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "semeq/config.hpp"
#include "semeq/errors.hpp"
#include "semeq/rng.hpp"
#include "semeq/version.hpp"

namespace semeq {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json mlp_to_json(const Mlp& net) {
  ordered_json layers = ordered_json::array();
  for (const Layer& layer : net.layers()) {
    ordered_json entry;
    entry["activation"] = layer.activation == Activation::ReLU ? "relu" : "identity";
    entry["rows"] = layer.weight.rows();
    entry["cols"] = layer.weight.cols();
    std::vector<double> weight(layer.weight.size());
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        weight[r * layer.weight.cols() + c] = layer.weight(r, c);
      }
    }
    entry["weight"] = weight;
    entry["bias"] = std::vector<double>(layer.bias.begin(), layer.bias.end());
    layers.push_back(std::move(entry));
  }
  return ordered_json{{"layers", std::move(layers)}};
}

Mlp mlp_from_json(const ordered_json& obj) {
  std::vector<Layer> layers;
  for (const auto& entry : obj.at("layers")) {
    Layer layer;
    const std::string act = entry.at("activation").get<std::string>();
    if (act == "relu") {
      layer.activation = Activation::ReLU;
    } else if (act == "identity") {
      layer.activation = Activation::Identity;
    } else {
      throw ConfigError("checkpoint: unknown activation '" + act + "'");
    }
    const auto rows = entry.at("rows").get<Eigen::Index>();
    const auto cols = entry.at("cols").get<Eigen::Index>();
    const auto weight = entry.at("weight").get<std::vector<double>>();
    const auto bias = entry.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(weight.size()) != rows * cols ||
        static_cast<Eigen::Index>(bias.size()) != rows) {
      throw ConfigError("checkpoint: layer shape metadata does not match parameters");
    }
    layer.weight.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        layer.weight(r, c) = weight[r * cols + c];
      }
    }
    layer.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(), rows);
    layers.push_back(std::move(layer));
  }
  return Mlp::from_layers(std::move(layers));
}

std::string normalization_name(NormalizationMode mode) {
  return mode == NormalizationMode::SqrtTau ? "sqrt_tau" : "tau";
}

NormalizationMode normalization_from_name(const std::string& name) {
  if (name == "sqrt_tau") return NormalizationMode::SqrtTau;
  if (name == "tau") return NormalizationMode::Tau;
  throw ConfigError("checkpoint: unknown normalization '" + name + "'");
}

ordered_json language_content_json(const Language& lang) {
  ordered_json content;
  content["grid"] = {{"width", lang.grid_width}, {"height", lang.grid_height}};
  content["train_seed"] = lang.train_seed;
  content["train_snr_db"] = lang.train_snr_db;
  content["normalization"] = normalization_name(lang.normalization);
  content["norm_momentum"] = lang.norm_momentum;
  content["power_norm"] = lang.power_norm;
  content["power_norm_ready"] = lang.power_norm_ready;
  content["encoder"] = mlp_to_json(lang.encoder);
  content["decoder"] = mlp_to_json(lang.decoder);
  return content;
}

ordered_json read_json_file(const std::filesystem::path& path, const char* expected_format) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open file: " + path.string());
  ordered_json root;
  try {
    in >> root;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + " is not valid JSON: " + e.what());
  }
  if (!root.is_object() || root.value("format", "") != expected_format) {
    throw ConfigError(path.string() + ": expected format '" + expected_format + "'");
  }
  return root;
}

void write_json_file(const std::filesystem::path& path, const ordered_json& root) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) throw FileError("cannot write file: " + path.string());
  out << root.dump(2) << '\n';
}

ordered_json partition_content_json(const Partition& partition) {
  ordered_json content;
  content["kind"] = std::string(partition_kind_name(partition.kind));
  content["requested_clusters"] = partition.requested_clusters;
  content["ambiguity_epsilon"] = partition.ambiguity_epsilon;
  content["language_hash"] = hash_to_hex(partition.language_hash);
  ordered_json atoms = ordered_json::array();
  for (const Atom& atom : partition.atoms) {
    ordered_json entry;
    entry["id"] = atom.id;
    entry["state_indices"] = atom.state_indices;
    entry["q_centroid"] =
        std::vector<double>(atom.q_centroid.data(), atom.q_centroid.data() + 4);
    std::vector<int> labels;
    for (Action a : atom.action_labels) labels.push_back(static_cast<int>(a));
    entry["action_labels"] = labels;
    entry["semantic_mean"] = std::vector<double>{atom.semantic_mean.x(), atom.semantic_mean.y()};
    entry["semantic_cov"] = std::vector<double>{atom.semantic_cov(0, 0), atom.semantic_cov(0, 1),
                                                atom.semantic_cov(1, 0), atom.semantic_cov(1, 1)};
    atoms.push_back(std::move(entry));
  }
  content["atoms"] = std::move(atoms);
  return content;
}

}  // namespace

std::uint64_t language_hash(const Language& lang) {
  return fnv1a64(language_content_json(lang).dump());
}

std::uint64_t partition_hash(const Partition& partition) {
  return fnv1a64(partition_content_json(partition).dump());
}

void save_checkpoint(const std::filesystem::path& path, const Language& lang,
                     const CheckpointMeta& meta) {
  ordered_json root;
  root["format"] = "semeq-checkpoint";
  root["version"] = kVersion;
  root["role"] = meta.role;
  root["config_hash"] = hash_to_hex(meta.config_hash);
  root["language_hash"] = hash_to_hex(language_hash(lang));
  root["content"] = language_content_json(lang);
  write_json_file(path, root);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  const ordered_json root = read_json_file(path, "semeq-checkpoint");
  const ordered_json& content = root.at("content");

  LoadedCheckpoint loaded;
  loaded.meta.role = root.value("role", "");
  loaded.meta.config_hash = hash_from_hex(root.at("config_hash").get<std::string>());

  Language& lang = loaded.language;
  lang.grid_width = content.at("grid").at("width").get<int>();
  lang.grid_height = content.at("grid").at("height").get<int>();
  lang.train_seed = content.at("train_seed").get<std::uint64_t>();
  lang.train_snr_db = content.at("train_snr_db").get<double>();
  lang.normalization = normalization_from_name(content.at("normalization").get<std::string>());
  lang.norm_momentum = content.at("norm_momentum").get<double>();
  lang.power_norm = content.at("power_norm").get<double>();
  lang.power_norm_ready = content.at("power_norm_ready").get<bool>();
  lang.encoder = mlp_from_json(content.at("encoder"));
  lang.decoder = mlp_from_json(content.at("decoder"));

  const int feature_dim = 2 * lang.grid_width * lang.grid_height;
  if (lang.encoder.input_dim() != feature_dim || lang.encoder.output_dim() != 2 ||
      lang.decoder.input_dim() != 2 || lang.decoder.output_dim() != kNumActions) {
    throw ConfigError(path.string() + ": layer shapes do not match the grid metadata");
  }

  loaded.hash = language_hash(lang);
  const std::uint64_t stored = hash_from_hex(root.at("language_hash").get<std::string>());
  if (stored != loaded.hash) {
    throw ConfigError(path.string() + ": stored language hash does not match the content");
  }
  return loaded;
}

void save_partition(const std::filesystem::path& path, const Partition& partition,
                    std::uint64_t config_hash) {
  ordered_json root;
  root["format"] = "semeq-partition";
  root["version"] = kVersion;
  root["config_hash"] = hash_to_hex(config_hash);
  root["partition_hash"] = hash_to_hex(partition_hash(partition));
  root["content"] = partition_content_json(partition);
  write_json_file(path, root);
}

Partition load_partition(const std::filesystem::path& path, const Language& lang) {
  const ordered_json root = read_json_file(path, "semeq-partition");
  const ordered_json& content = root.at("content");

  Partition partition;
  const std::string kind = content.at("kind").get<std::string>();
  partition.kind = kind == "hard" ? PartitionKind::Hard : PartitionKind::Soft;
  partition.requested_clusters = content.at("requested_clusters").get<int>();
  partition.ambiguity_epsilon = content.at("ambiguity_epsilon").get<double>();
  partition.language_hash = hash_from_hex(content.at("language_hash").get<std::string>());

  if (partition.language_hash != language_hash(lang)) {
    throw ConfigError(path.string() + ": partition was built for a different language");
  }

  const GridConfig grid{.width = lang.grid_width, .height = lang.grid_height};
  const std::vector<Observation> states = enumerate_states(grid);

  for (const auto& entry : content.at("atoms")) {
    Atom atom;
    atom.id = entry.at("id").get<int>();
    atom.state_indices = entry.at("state_indices").get<std::vector<int>>();
    const auto centroid = entry.at("q_centroid").get<std::vector<double>>();
    atom.q_centroid = Eigen::Map<const ActionValues>(centroid.data());
    for (int label : entry.at("action_labels").get<std::vector<int>>()) {
      atom.action_labels.push_back(static_cast<Action>(label));
    }
    const auto mean = entry.at("semantic_mean").get<std::vector<double>>();
    atom.semantic_mean = Symbol(mean[0], mean[1]);
    const auto cov = entry.at("semantic_cov").get<std::vector<double>>();
    atom.semantic_cov << cov[0], cov[1], cov[2], cov[3];
    for (int idx : atom.state_indices) {
      if (idx < 0 || idx >= static_cast<int>(states.size())) {
        throw ConfigError(path.string() + ": state index out of range");
      }
      const Symbol symbol = encode(lang, states[idx]);
      const ActionValues q = action_values(lang, symbol);
      atom.symbols.push_back(symbol);
      atom.q_vectors.push_back(q);
      ++atom.action_histogram[static_cast<int>(argmax_action(q))];
    }
    partition.atoms.push_back(std::move(atom));
  }

  const std::uint64_t stored = hash_from_hex(root.at("partition_hash").get<std::string>());
  if (stored != partition_hash(partition)) {
    throw ConfigError(path.string() + ": stored partition hash does not match the content");
  }
  return partition;
}

void save_codebook(const std::filesystem::path& path, const TransformCodebook& cb,
                   std::uint64_t config_hash) {
  ordered_json root;
  root["format"] = "semeq-codebook";
  root["version"] = kVersion;
  root["config_hash"] = hash_to_hex(config_hash);
  root["source_partition_hash"] = hash_to_hex(cb.source_partition_hash);
  root["target_partition_hash"] = hash_to_hex(cb.target_partition_hash);
  root["source_atoms"] = cb.source_atoms;
  root["target_atoms"] = cb.target_atoms;
  ordered_json maps = ordered_json::array();
  for (const AffineMap& map : cb.maps) {
    maps.push_back({{"linear",
                     std::vector<double>{map.linear(0, 0), map.linear(0, 1), map.linear(1, 0),
                                         map.linear(1, 1)}},
                    {"offset", std::vector<double>{map.offset(0), map.offset(1)}}});
  }
  root["maps"] = std::move(maps);
  root["transfer"] = cb.transfer;
  root["correspondence"] = cb.correspondence;
  write_json_file(path, root);
}

TransformCodebook load_codebook(const std::filesystem::path& path) {
  const ordered_json root = read_json_file(path, "semeq-codebook");
  TransformCodebook cb;
  cb.source_partition_hash = hash_from_hex(root.at("source_partition_hash").get<std::string>());
  cb.target_partition_hash = hash_from_hex(root.at("target_partition_hash").get<std::string>());
  cb.source_atoms = root.at("source_atoms").get<int>();
  cb.target_atoms = root.at("target_atoms").get<int>();
  for (const auto& entry : root.at("maps")) {
    AffineMap map;
    const auto linear = entry.at("linear").get<std::vector<double>>();
    map.linear << linear[0], linear[1], linear[2], linear[3];
    const auto offset = entry.at("offset").get<std::vector<double>>();
    map.offset = Eigen::Vector2d(offset[0], offset[1]);
    cb.maps.push_back(map);
  }
  cb.transfer = root.at("transfer").get<std::vector<double>>();
  cb.correspondence = root.at("correspondence").get<std::vector<int>>();

  const std::size_t expected_maps = static_cast<std::size_t>(cb.source_atoms) * cb.target_atoms;
  if (cb.maps.size() != expected_maps ||
      cb.transfer.size() != expected_maps * cb.target_atoms ||
      cb.correspondence.size() != static_cast<std::size_t>(cb.source_atoms)) {
    throw ConfigError(path.string() + ": codebook dimensions are inconsistent");
  }
  return cb;
}

}  // namespace semeq
