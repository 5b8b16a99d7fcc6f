#ifndef ARGLINK_TRAINING_H_
#define ARGLINK_TRAINING_H_

#include <functional>
#include <memory>
#include <vector>

#include "arglink/checkpoint.h"
#include "arglink/config.h"
#include "arglink/corpus.h"
#include "arglink/model.h"
#include "arglink/ontology.h"

namespace arglink {

// lr0 * decay^floor(step / decay_steps), where `step` counts completed updates.
double learning_rate_at(const ModelConfig& config, long step);

// Adam with the step-decayed learning rate and optional global-norm clipping.
class Adam {
 public:
  explicit Adam(const ModelConfig& config) : config_(config) {}
  // Applies one update from the accumulated gradients and clears them.
  void step(nn::ParameterStore& store);
  long steps() const { return steps_; }

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

 private:
  ModelConfig config_;
  long steps_ = 0;
};

struct EpochReport {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double dev_f1 = 0.0;
  double learning_rate = 0.0;
  long steps = 0;
  int skipped_gold = 0;
  bool improved = false;
};

struct TrainResult {
  Checkpoint best;
  std::vector<EpochReport> history;
};

struct TrainOptions {
  // Starting point for fine-tuning; every parameter stays trainable.
  const Checkpoint* initial = nullptr;
  std::function<void(const EpochReport&)> on_epoch;
  // Threads for dev-set prediction between epochs.
  int jobs = 1;
};

// Trains on `train` with per-epoch dev F1 early stopping. Throws NumericError
// when a loss becomes non-finite.
TrainResult train(const std::vector<Document>& train, const std::vector<Document>& dev,
                  const Ontology& ontology, const ModelConfig& config,
                  const TrainOptions& options = {});

// One optimizer step on one document; returns the loss before the update, or
// NaN when the document has no loss terms.
double train_step(Model& model, Adam& optimizer, const Document& doc, nn::Rng& dropout_rng,
                  int* skipped_gold = nullptr);

}  // namespace arglink

#endif  // ARGLINK_TRAINING_H_
