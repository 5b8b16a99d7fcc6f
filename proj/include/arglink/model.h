#ifndef ARGLINK_MODEL_H_
#define ARGLINK_MODEL_H_

#include <memory>
#include <string>
#include <vector>

#include "arglink/candidates.h"
#include "arglink/checkpoint.h"
#include "arglink/config.h"
#include "arglink/corpus.h"
#include "arglink/decoder.h"
#include "arglink/encoder.h"
#include "arglink/linker.h"
#include "arglink/nn/graph.h"
#include "arglink/ontology.h"

namespace arglink {

// Result of running the model over one document.
struct DocumentPass {
  nn::Var loss;               // mean NLL over terms; invalid when there are none
  int loss_terms = 0;
  int skipped_gold = 0;       // gold links with no reachable candidate
  std::vector<EventScoreTable> tables;
};

// The full argument linker: encoder, pruning and link scoring.
class Model {
 public:
  Model(const ModelConfig& config, const Ontology& ontology);
  // Rebuilds a model from a checkpoint. Throws ValidationError when the
  // checkpoint's role map differs from `ontology` or tensors do not fit.
  static std::unique_ptr<Model> from_checkpoint(const Checkpoint& checkpoint,
                                                const Ontology& ontology);

  // Parameters rounded to float32.
  Checkpoint to_checkpoint() const;
  void load_tensors(const std::vector<Tensor>& tensors);

  const ModelConfig& config() const { return config_; }
  const Ontology& ontology() const { return ontology_; }
  nn::ParameterStore& parameters() { return store_; }
  const nn::ParameterStore& parameters() const { return store_; }
  const Linker& linker() const { return *linker_; }

  // Builds the computation for `doc` in `g`. A training graph (one with an
  // rng) forces gold spans into every shortlist and produces the loss.
  DocumentPass run(nn::Graph& g, const Document& doc);

  // Inference-mode score tables.
  std::vector<EventScoreTable> score(const Document& doc);
  // Documents are scored on up to `jobs` threads; output order is fixed.
  std::vector<LinkPrediction> predict(const std::vector<Document>& docs, Decoding decoding,
                                      int jobs = 1);

 private:
  std::vector<int> roles_for(const EventMention& event) const;

  ModelConfig config_;
  Ontology ontology_;
  nn::ParameterStore store_;
  std::unique_ptr<Encoder> encoder_;
  std::unique_ptr<CandidateScorer> candidates_;
  std::unique_ptr<Linker> linker_;
  std::unique_ptr<ContextualStore> contextual_;
};

}  // namespace arglink

#endif  // ARGLINK_MODEL_H_
