#include "arglink/model.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "arglink/errors.h"

namespace arglink {

using nn::Graph;
using nn::Var;

Model::Model(const ModelConfig& config, const Ontology& ontology)
    : config_(config), ontology_(ontology) {
  config_.validate();
  if (ontology_.num_roles() == 0) throw ValidationError("ontology declares no roles");
  nn::Rng init(config_.seed);
  std::shared_ptr<const WordVectors> words;
  if (!config_.word_vectors.empty()) {
    words = std::make_shared<WordVectors>(WordVectors::load(config_.word_vectors));
  }
  encoder_ = std::make_unique<Encoder>(store_, config_, words, init);
  const int span_dim = encoder_->span_dim();
  candidates_ = std::make_unique<CandidateScorer>(store_, config_, span_dim, init);
  linker_ = std::make_unique<Linker>(store_, config_, span_dim,
                                     static_cast<int>(ontology_.num_roles()), init);
  if (!config_.contextual_dir.empty()) {
    contextual_ = std::make_unique<ContextualStore>(config_.contextual_dir);
  }
}

std::unique_ptr<Model> Model::from_checkpoint(const Checkpoint& checkpoint,
                                              const Ontology& ontology) {
  if (checkpoint.roles != ontology.all_roles()) {
    throw ValidationError("checkpoint role map does not match the ontology (" +
                          std::to_string(checkpoint.roles.size()) + " vs " +
                          std::to_string(ontology.num_roles()) + " roles)");
  }
  auto model = std::make_unique<Model>(checkpoint.config, ontology);
  model->load_tensors(checkpoint.tensors);
  return model;
}

Checkpoint Model::to_checkpoint() const {
  Checkpoint c;
  c.config = config_;
  c.roles = ontology_.all_roles();
  for (const nn::Parameter* p : store_.all()) {
    Tensor t{p->name, static_cast<int>(p->value.rows()), static_cast<int>(p->value.cols()), {}};
    t.data.reserve(p->value.size());
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      t.data.push_back(static_cast<float>(p->value.data()[i]));
    }
    c.tensors.push_back(std::move(t));
  }
  return c;
}

void Model::load_tensors(const std::vector<Tensor>& tensors) {
  auto params = store_.all();
  if (tensors.size() != params.size()) {
    throw ValidationError("checkpoint has " + std::to_string(tensors.size()) +
                          " tensors, model expects " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const Tensor& t = tensors[i];
    nn::Parameter& p = *params[i];
    if (t.name != p.name || t.rows != p.value.rows() || t.cols != p.value.cols() ||
        t.data.size() != static_cast<std::size_t>(p.value.size())) {
      throw ValidationError("checkpoint tensor '" + t.name + "' does not fit parameter '" +
                            p.name + "'");
    }
    for (std::size_t j = 0; j < t.data.size(); ++j) p.value.data()[j] = t.data[j];
  }
}

std::vector<int> Model::roles_for(const EventMention& event) const {
  std::vector<int> out;
  if (!config_.restrict_roles_to_type) {
    for (int r = 0; r < static_cast<int>(ontology_.num_roles()); ++r) out.push_back(r);
    return out;
  }
  if (!event.type) {
    throw ConfigError("restrict_roles_to_type needs a gold type for event " + event.event_id);
  }
  for (const auto& slot : ontology_.roles_for(*event.type)) {
    out.push_back(ontology_.role_index(slot.name));
  }
  std::sort(out.begin(), out.end());
  return out;
}

DocumentPass Model::run(Graph& g, const Document& doc) {
  const bool training = g.training();
  const ContextualStack* context =
      contextual_ ? &contextual_->get(doc, config_.segment_tokens) : nullptr;
  Var emb = encoder_->embed_tokens(g, doc, context);
  Var hidden = encoder_->contextualize(g, emb, doc.sentence_starts);

  // Candidate pool A.
  const bool given = doc.given_arguments.has_value();
  std::vector<Span> pool;
  Var pool_repr, pool_unary;
  if (given) {
    pool = *doc.given_arguments;
    if (!pool.empty()) pool_repr = encoder_->span_representations(g, hidden, emb, pool);
  } else {
    const auto spans = enumerate_spans(doc, config_.max_span_width);
    if (!spans.empty()) {
      Var reprs = encoder_->span_representations(g, hidden, emb, spans);
      Var unary = candidates_->unary(g, reprs);
      const auto& u = g.value(unary);
      std::vector<double> scores(u.data(), u.data() + u.rows());
      pool = prune_unary(spans, scores, config_.lambda_a, doc.size());
      if (training) {
        for (const auto& link : doc.gold_links) {
          if (std::binary_search(spans.begin(), spans.end(), link.argument) &&
              std::find(pool.begin(), pool.end(), link.argument) == pool.end()) {
            pool.push_back(link.argument);
          }
        }
        std::sort(pool.begin(), pool.end());
      }
      std::vector<int> rows;
      for (const auto& s : pool) {
        rows.push_back(static_cast<int>(std::lower_bound(spans.begin(), spans.end(), s) -
                                        spans.begin()));
      }
      pool_repr = g.gather_rows(reprs, rows);
      pool_unary = g.gather_rows(unary, rows);
    }
  }

  DocumentPass pass;
  if (doc.events.empty()) return pass;
  std::vector<Span> triggers;
  for (const auto& e : doc.events) triggers.push_back(e.trigger);
  Var trigger_repr = encoder_->span_representations(g, hidden, emb, triggers);
  Var trigger_unary;
  if (!given) trigger_unary = candidates_->event_unary(g, trigger_repr);

  std::vector<Var> losses;
  for (int ei = 0; ei < static_cast<int>(doc.events.size()); ++ei) {
    const EventMention& event = doc.events[ei];
    const std::vector<int> roles = roles_for(event);
    std::vector<const GoldLink*> gold;
    for (const auto& link : doc.gold_links) {
      if (link.event_id == event.event_id) gold.push_back(&link);
    }

    // Candidates inside the event's context window.
    const auto [lo, hi] = context_window(doc, event.trigger, config_.window_radius);
    const int first = doc.sentence_bounds(lo).first;
    const int last = doc.sentence_bounds(hi).second;
    std::vector<int> window;
    std::vector<Span> window_spans;
    for (int i = 0; i < static_cast<int>(pool.size()); ++i) {
      if (pool[i].start >= first && pool[i].end < last && pool[i] != event.trigger) {
        window.push_back(i);
        window_spans.push_back(pool[i]);
      }
    }

    EventScoreTable table{doc.doc_id, event.event_id, {}};
    if (window.empty()) {
      for (int r : roles) table.roles.push_back({ontology_.role_name(r), {}, {}});
      pass.tables.push_back(std::move(table));
      if (training) pass.skipped_gold += static_cast<int>(gold.size());
      continue;
    }

    Var event_repr = g.gather_rows(trigger_repr, {ei});
    Var cand = g.gather_rows(pool_repr, window);
    std::vector<int> buckets;
    for (const auto& s : window_spans) {
      buckets.push_back(bucket_distance(trigger_arg_distance(event.trigger, s)));
    }
    Var distance;
    if (config_.use_distance) distance = linker_->distance_features(g, buckets);
    Var s_a, s_e;
    if (!given) {
      s_a = g.gather_rows(pool_unary, window);
      s_e = g.gather_rows(trigger_unary, {ei});
    }
    Var coarse = candidates_->coarse(g, event_repr, cand, distance, s_a, s_e);
    const auto& cv = g.value(coarse);
    std::vector<double> coarse_scores(cv.data(), cv.data() + cv.rows());

    // Shortlist A_e, with gold spans forced in during training.
    std::vector<int> selected = top_scoring(coarse_scores, window_spans, config_.top_k);
    std::vector<int> gold_column(gold.size(), -1);
    if (training) {
      for (std::size_t j = 0; j < gold.size(); ++j) {
        const auto it = std::find(window_spans.begin(), window_spans.end(), gold[j]->argument);
        if (it == window_spans.end()) continue;
        const int w = static_cast<int>(it - window_spans.begin());
        auto pos = std::find(selected.begin(), selected.end(), w);
        if (pos == selected.end()) pos = selected.insert(selected.end(), w);
        gold_column[j] = static_cast<int>(pos - selected.begin());
      }
    }

    LinkInputs in;
    in.event = event_repr;
    in.candidates = g.gather_rows(cand, selected);
    in.roles = roles;
    for (int w : selected) in.distance_buckets.push_back(buckets[w]);
    in.coarse = g.gather_rows(coarse, selected);
    Var scores = linker_->link_scores(g, in);

    const auto& sv = g.value(scores);
    std::vector<Span> short_spans;
    for (int w : selected) short_spans.push_back(window_spans[w]);
    for (std::size_t r = 0; r < roles.size(); ++r) {
      RoleScores rs{ontology_.role_name(roles[r]), short_spans, {}};
      for (std::size_t j = 0; j < selected.size(); ++j) rs.scores.push_back(sv(r, j));
      table.roles.push_back(std::move(rs));
    }
    pass.tables.push_back(std::move(table));

    if (!training) continue;
    std::map<int, int> role_row;
    for (std::size_t r = 0; r < roles.size(); ++r) role_row[roles[r]] = static_cast<int>(r);
    std::vector<LinkTarget> targets;
    std::vector<bool> filled(roles.size(), false);
    for (std::size_t j = 0; j < gold.size(); ++j) {
      const auto row = ontology_.has_role(gold[j]->role)
                           ? role_row.find(ontology_.role_index(gold[j]->role))
                           : role_row.end();
      if (row == role_row.end() || gold_column[j] < 0) {
        ++pass.skipped_gold;
        continue;
      }
      targets.push_back({row->second, gold_column[j]});
      filled[row->second] = true;
    }
    if (config_.epsilon_loss_terms) {
      for (std::size_t r = 0; r < roles.size(); ++r) {
        if (!filled[r]) targets.push_back({static_cast<int>(r), -1});
      }
    }
    if (targets.empty()) continue;
    losses.push_back(epsilon_nll(g, scores, targets));
    pass.loss_terms += static_cast<int>(targets.size());
  }

  if (!losses.empty()) {
    Var total = losses[0];
    for (std::size_t i = 1; i < losses.size(); ++i) total = g.add(total, losses[i]);
    pass.loss = g.scale(total, 1.0 / pass.loss_terms);
  }
  return pass;
}

std::vector<EventScoreTable> Model::score(const Document& doc) {
  Graph g;
  return run(g, doc).tables;
}

std::vector<LinkPrediction> Model::predict(const std::vector<Document>& docs, Decoding decoding,
                                           int jobs) {
  std::vector<std::vector<EventScoreTable>> per_doc(docs.size());
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(docs.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < docs.size(); ++i) per_doc[i] = score(docs[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < docs.size(); i = next++) {
          try {
            per_doc[i] = score(docs[i]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  std::vector<EventScoreTable> tables;
  for (auto& t : per_doc) tables.insert(tables.end(), t.begin(), t.end());
  return decode(decoding, tables, ontology_, event_types(docs));
}

}  // namespace arglink
