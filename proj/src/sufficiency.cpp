#include "swipe/sufficiency.hpp"

#include <algorithm>
#include <set>

#include "swipe/error.hpp"

namespace swipe {

std::string describe(const TruncationConfig& cfg) {
  switch (cfg.strategy) {
    case TruncationStrategy::Auto:
      return "auto:" + std::to_string(cfg.window_len) +
             (cfg.overlap ? "/" + std::to_string(cfg.overlap) : std::string());
    case TruncationStrategy::Punct: return "punct:" + std::to_string(cfg.max_seg_len);
    case TruncationStrategy::Structure: return "structure";
  }
  return "?";
}

namespace {

enum class Source { Explanation, Random, FullText };

Example probe_example(const std::string& doc_id, std::vector<std::string> tokens, std::vector<int> gold) {
  Example ex;
  ex.doc_id = doc_id;
  Segment seg;
  seg.doc_id = doc_id;
  seg.tokens = std::move(tokens);
  if (seg.tokens.empty()) seg.tokens.emplace_back(kEmptyUnitToken);
  ex.segments.push_back(std::move(seg));
  ex.gold = std::move(gold);
  return ex;
}

std::vector<std::string> concat(const std::vector<Segment>& segments, const std::vector<std::size_t>& picks) {
  std::vector<std::string> out;
  for (std::size_t k : picks)
    out.insert(out.end(), segments[k].tokens.begin(), segments[k].tokens.end());
  return out;
}

}  // namespace

SufficiencyReport sufficiency_test(const Corpus& corpus, const TrainedModel& model,
                                   const SufficiencyOptions& options, const PrecomputedVectors* vectors) {
  if (model.trained_steps == 0) throw ValidationError("sufficiency test needs a trained model");
  if (options.settings.empty()) throw ConfigError("sufficiency test needs at least one segmentation setting");
  if ((model.config.encoder_mode == EncoderMode::Precomputed) != (vectors != nullptr))
    throw ConfigError("precomputed vectors must be supplied exactly when the model uses them");

  ModelConfig probe_cfg;
  probe_cfg.encoder_mode = EncoderMode::Hashed;
  probe_cfg.hash = options.probe_encoder;
  probe_cfg.pooling = PoolingStrategy::Sum;
  probe_cfg.task_kind = corpus.vocab.task_kind();
  probe_cfg.num_labels = corpus.vocab.size();

  const std::array<Split, 3> splits{Split::Train, Split::Dev, Split::Test};
  SufficiencyReport report;
  for (const auto& setting : options.settings) {
    setting.validate();
    Rng rng(sub_seed(options.seed, "sufficiency.random." + describe(setting)));

    // probe sets indexed [source][split]
    std::array<std::array<std::vector<Example>, 3>, 3> sets;
    for (std::size_t s = 0; s < splits.size(); ++s) {
      const auto docs = corpus.in_split(splits[s]);
      for (const Document* doc : docs) {
        const auto segments = truncate(*doc, setting);
        Example ex;
        ex.doc_id = doc->id;
        ex.gold = corpus.label_bits(*doc);
        if (vectors) {
          ex.vectors = vectors->at(doc->id);
          if (ex.vectors->m() != segments.size())
            throw ValidationError("document '" + doc->id + "' has " + std::to_string(ex.vectors->m()) +
                                  " vectors but " + std::to_string(segments.size()) + " text segments under " +
                                  describe(setting));
        } else {
          ex.segments = segments;
        }
        const Prediction pred = predict(model.config, model.params, ex);

        auto labels = decided_labels(pred, model.config.task_kind);
        if (labels.empty()) labels.push_back(pred.top_label);
        std::set<std::size_t> keys;
        for (std::size_t label : labels) keys.insert(explain(pred, label).key_segment);
        const std::vector<std::size_t> key_list(keys.begin(), keys.end());

        std::vector<std::size_t> all(segments.size());
        for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
        shuffle_in_place(all, rng);
        std::vector<std::size_t> random(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(key_list.size()));
        std::sort(random.begin(), random.end());

        sets[0][s].push_back(probe_example(doc->id, concat(segments, key_list), ex.gold));
        sets[1][s].push_back(probe_example(doc->id, concat(segments, random), ex.gold));
        sets[2][s].push_back(probe_example(doc->id, tokenize(doc->content()), ex.gold));
      }
    }

    SufficiencyRow row;
    row.setting = describe(setting);
    for (std::size_t source = 0; source < 3; ++source) {
      const auto& [train_set, dev_set, test_set] = sets[source];
      TrainConfig probe_train = options.probe_train;
      probe_train.seed = sub_seed(options.seed, "sufficiency.probe");
      const ModelParams init = init_params(probe_cfg, probe_train.seed);
      const TrainResult trained = train(probe_cfg, init, train_set, dev_set, probe_train);
      const double score = evaluate_metric(probe_cfg, trained.best_params, test_set);
      (source == 0 ? row.explanation : source == 1 ? row.random : row.full_text) = score;
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace swipe
