#include "arglink/training.h"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "arglink/errors.h"
#include "arglink/evaluation.h"

namespace arglink {

double learning_rate_at(const ModelConfig& config, long step) {
  return config.learning_rate *
         std::pow(config.decay_rate, static_cast<double>(step / config.decay_steps));
}

void Adam::step(nn::ParameterStore& store) {
  auto params = store.all();
  double scale = 1.0;
  if (config_.grad_clip > 0.0) {
    double norm2 = 0.0;
    for (const auto* p : params) norm2 += p->grad.squaredNorm();
    const double norm = std::sqrt(norm2);
    if (norm > config_.grad_clip) scale = config_.grad_clip / norm;
  }
  const double lr = learning_rate_at(config_, steps_);
  ++steps_;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(steps_));
  for (auto* p : params) {
    if (p->m.size() == 0) {
      p->m = nn::Matrix::Zero(p->value.rows(), p->value.cols());
      p->v = nn::Matrix::Zero(p->value.rows(), p->value.cols());
    }
    const nn::Matrix g = p->grad * scale;
    p->m = kBeta1 * p->m + (1.0 - kBeta1) * g;
    p->v = kBeta2 * p->v + (1.0 - kBeta2) * g.cwiseProduct(g);
    p->value.array() -=
        lr * (p->m.array() / c1) / ((p->v.array() / c2).sqrt() + kEpsilon);
  }
  store.zero_grad();
}

double train_step(Model& model, Adam& optimizer, const Document& doc, nn::Rng& dropout_rng,
                  int* skipped_gold) {
  nn::Graph g(&dropout_rng);
  const DocumentPass pass = model.run(g, doc);
  if (skipped_gold) *skipped_gold += pass.skipped_gold;
  if (!pass.loss.valid()) return std::numeric_limits<double>::quiet_NaN();
  const double loss = g.scalar(pass.loss);
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "non-finite loss " << loss << " on document " << doc.doc_id << " at step "
        << optimizer.steps() << " (" << pass.loss_terms << " terms)";
    throw NumericError(msg.str());
  }
  g.backward(pass.loss);
  optimizer.step(model.parameters());
  return loss;
}

TrainResult train(const std::vector<Document>& train_docs, const std::vector<Document>& dev,
                  const Ontology& ontology, const ModelConfig& config,
                  const TrainOptions& options) {
  config.validate();
  std::unique_ptr<Model> model;
  if (options.initial) {
    // The run's config must describe the same architecture as the checkpoint.
    Checkpoint init = *options.initial;
    init.config = config;
    model = Model::from_checkpoint(init, ontology);
  } else {
    model = std::make_unique<Model>(config, ontology);
  }

  std::vector<Document> docs;
  docs.reserve(train_docs.size());
  for (const auto& d : train_docs) docs.push_back(truncate_document(d, config.max_train_tokens));

  nn::Rng shuffle_rng(config.seed * 2 + 11);
  nn::Rng dropout_rng(config.seed * 2 + 12);
  Adam optimizer(config);
  model->parameters().zero_grad();

  TrainResult result;
  result.best = model->to_checkpoint();
  result.best.best_dev_f1 = -1.0;
  const auto gold = gold_triples(dev);
  int since_best = 0;
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    EpochReport report;
    report.epoch = epoch;
    double loss_sum = 0.0;
    int loss_docs = 0;
    for (std::size_t i : order) {
      const double loss = train_step(*model, optimizer, docs[i], dropout_rng, &report.skipped_gold);
      if (!std::isnan(loss)) {
        loss_sum += loss;
        ++loss_docs;
      }
    }
    report.mean_loss = loss_docs ? loss_sum / loss_docs : 0.0;
    report.steps = optimizer.steps();
    report.learning_rate = learning_rate_at(config, optimizer.steps());
    report.dev_f1 = score_triples(model->predict(dev, config.dev_decoding, options.jobs), gold).f1;
    report.improved = report.dev_f1 > result.best.best_dev_f1;
    if (report.improved) {
      result.best = model->to_checkpoint();
      result.best.best_dev_f1 = report.dev_f1;
      result.best.epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
    }
    result.history.push_back(report);
    if (options.on_epoch) options.on_epoch(report);
    if (since_best >= config.patience) break;
  }
  return result;
}

}  // namespace arglink
