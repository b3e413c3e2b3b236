#include "swipe/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "swipe/error.hpp"

namespace swipe {

using nlohmann::json;

namespace {

// Doubles travel as hexfloat strings so the round trip is exact.
std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double unhex(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw ParseError("bad number '" + s + "' in checkpoint");
  return v;
}

json model_to_json(const ModelConfig& m) {
  return {
      {"encoder_mode", to_string(m.encoder_mode)},
      {"hash",
       {{"buckets", m.hash.buckets},
        {"dim", m.hash.dim},
        {"ngram_orders", m.hash.ngram_orders},
        {"hash_seed", m.hash.hash_seed},
        {"init_scale", hex(m.hash.init_scale)}}},
      {"precomputed_dim", m.precomputed_dim},
      {"interaction",
       {{"num_layers", m.interaction.num_layers},
        {"heads", m.interaction.heads},
        {"ff_width", m.interaction.ff_width},
        {"positions", m.interaction.positions},
        {"max_positions", m.interaction.max_positions}}},
      {"pooling", to_string(m.pooling)},
      {"task_kind", to_string(m.task_kind)},
      {"loss", to_string(m.loss)},
      {"num_labels", m.num_labels},
  };
}

ModelConfig model_from_json(const json& j) {
  ModelConfig m;
  m.encoder_mode = parse_encoder_mode(j.at("encoder_mode").get<std::string>());
  const auto& h = j.at("hash");
  m.hash.buckets = h.at("buckets");
  m.hash.dim = h.at("dim");
  m.hash.ngram_orders = h.at("ngram_orders").get<std::vector<std::size_t>>();
  m.hash.hash_seed = h.at("hash_seed");
  m.hash.init_scale = unhex(h.at("init_scale").get<std::string>());
  m.precomputed_dim = j.at("precomputed_dim");
  const auto& i = j.at("interaction");
  m.interaction.num_layers = i.at("num_layers");
  m.interaction.heads = i.at("heads");
  m.interaction.ff_width = i.at("ff_width");
  m.interaction.positions = i.at("positions");
  m.interaction.max_positions = i.at("max_positions");
  m.pooling = parse_pooling(j.at("pooling").get<std::string>());
  m.task_kind = parse_task_kind(j.at("task_kind").get<std::string>());
  m.loss = parse_loss_kind(j.at("loss").get<std::string>());
  m.num_labels = j.at("num_labels");
  return m;
}


json train_to_json(const TrainConfig& t) {
  return {{"epochs", t.epochs},        {"base_lr", hex(t.base_lr)},   {"batch_size", t.batch_size},
          {"seed", t.seed},            {"beta1", hex(t.adam.beta1)}, {"beta2", hex(t.adam.beta2)},
          {"epsilon", hex(t.adam.epsilon)}};
}

TrainConfig train_from_json(const json& j) {
  TrainConfig t;
  t.epochs = j.at("epochs");
  t.base_lr = unhex(j.at("base_lr"));
  t.batch_size = j.at("batch_size");
  t.seed = j.at("seed");
  t.adam.beta1 = unhex(j.at("beta1"));
  t.adam.beta2 = unhex(j.at("beta2"));
  t.adam.epsilon = unhex(j.at("epsilon"));
  return t;
}

json truncation_to_json(const TruncationConfig& c) {
  return {{"strategy", to_string(c.strategy)},
          {"window_len", c.window_len},
          {"overlap", c.overlap},
          {"max_seg_len", c.max_seg_len},
          {"sentence_terminators", std::string(c.sentence_terminators.begin(), c.sentence_terminators.end())}};
}

TruncationConfig truncation_from_json(const json& j) {
  TruncationConfig c;
  c.strategy = parse_truncation_strategy(j.at("strategy").get<std::string>());
  c.window_len = j.at("window_len");
  c.overlap = j.at("overlap");
  c.max_seg_len = j.at("max_seg_len");
  const auto terms = j.at("sentence_terminators").get<std::string>();
  c.sentence_terminators = std::set<char>(terms.begin(), terms.end());
  return c;
}

// Allocates every tensor of a freshly configured model so the loader can
// check the file's tensor table against the expected layout.
ModelParams shaped_params(const ModelConfig& cfg) {
  ModelParams p;
  if (cfg.encoder_mode == EncoderMode::Hashed)
    p.encoder.table = Matrix::Zero(static_cast<Eigen::Index>(cfg.hash.buckets),
                                   static_cast<Eigen::Index>(cfg.hash.dim));
  Rng rng(0);
  p.interaction = zeros_like(init_interaction(cfg.interaction, cfg.hidden_dim(), rng));
  p.head = zeros_like(init_swipe(cfg.num_labels, cfg.hidden_dim(), rng));
  return p;
}

}  // namespace

void save_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const auto views = param_views(ckpt.params);
  json tensors = json::array();
  for (const auto& v : views) tensors.push_back({{"name", v.name}, {"rows", v.rows}, {"cols", v.cols}});
  const json meta = {{"model", model_to_json(ckpt.model)},
                     {"train", train_to_json(ckpt.train)},
                     {"truncation", truncation_to_json(ckpt.truncation)},
                     {"labels", ckpt.vocab.names()},
                     {"trained_steps", ckpt.trained_steps},
                     {"tensors", tensors}};
  out << "swipe-checkpoint " << kCheckpointVersion << '\n' << meta.dump() << '\n';
  char buf[64];
  for (const auto& v : views) {
    out << "tensor " << v.name << ' ' << v.rows << ' ' << v.cols << '\n';
    for (std::size_t i = 0; i < v.values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%a", v.values[i]);
      out << buf << ((i + 1) % 8 == 0 || i + 1 == v.values.size() ? '\n' : ' ');
    }
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) throw LookupError("cannot write checkpoint '" + path.string() + "'");
  save_checkpoint(out, ckpt);
  if (!out) throw Error("failed writing checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "swipe-checkpoint")
    throw FormatError("not a SWIPE checkpoint");
  if (version != kCheckpointVersion)
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);

  Checkpoint ckpt;
  json meta;
  try {
    meta = json::parse(line);
    ckpt.model = model_from_json(meta.at("model"));
    ckpt.train = train_from_json(meta.at("train"));
    ckpt.truncation = truncation_from_json(meta.at("truncation"));
    ckpt.vocab = LabelVocab(meta.at("labels").get<std::vector<std::string>>(), ckpt.model.task_kind);
    ckpt.trained_steps = meta.at("trained_steps");
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint metadata: ") + e.what());
  }
  ckpt.model.validate();

  ckpt.params = shaped_params(ckpt.model);
  auto views = param_views(ckpt.params);
  const auto& table = meta.at("tensors");
  if (table.size() != views.size())
    throw FormatError("checkpoint holds " + std::to_string(table.size()) + " tensors, expected " +
                      std::to_string(views.size()));
  for (auto& v : views) {
    std::string tag, name;
    std::size_t rows = 0, cols = 0;
    if (!(in >> tag >> name >> rows >> cols) || tag != "tensor")
      throw FormatError("truncated checkpoint before tensor " + v.name);
    if (name != v.name || rows != v.rows || cols != v.cols)
      throw FormatError("checkpoint tensor " + name + " does not match expected " + v.name + " (" +
                        std::to_string(v.rows) + "x" + std::to_string(v.cols) + ")");
    std::string token;
    for (auto& value : v.values) {
      if (!(in >> token)) throw FormatError("truncated tensor " + name);
      value = unhex(token);
    }
  }
  return ckpt;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LookupError("cannot open checkpoint '" + path.string() + "'");
  return load_checkpoint(in);
}

}  // namespace swipe
