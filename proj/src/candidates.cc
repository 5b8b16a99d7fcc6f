#include "arglink/candidates.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "arglink/errors.h"

namespace arglink {

using nn::Graph;
using nn::Var;

std::vector<Span> enumerate_spans(const Document& doc, int max_width) {
  std::set<Span> triggers;
  for (const auto& e : doc.events) triggers.insert(e.trigger);
  std::vector<Span> out;
  for (int s = 0; s < doc.num_sentences(); ++s) {
    const auto [begin, end] = doc.sentence_bounds(s);
    for (int i = begin; i < end; ++i) {
      for (int j = i; j < end && j - i + 1 <= max_width; ++j) {
        const Span span{i, j};
        if (!triggers.count(span)) out.push_back(span);
      }
    }
  }
  return out;
}

std::vector<int> top_scoring(const std::vector<double>& scores, const std::vector<Span>& spans,
                             std::size_t count) {
  std::vector<int> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  count = std::min(count, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(),
                    [&](int a, int b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return spans[a] < spans[b];
                    });
  idx.resize(count);
  return idx;
}

int unary_keep_count(double lambda_a, int n_tokens) {
  // Guard against 0.4 * 10 evaluating to 4.0000000000000009.
  return static_cast<int>(std::ceil(lambda_a * n_tokens - 1e-9));
}

std::vector<Span> prune_unary(const std::vector<Span>& spans, const std::vector<double>& scores,
                              double lambda_a, int n_tokens, bool given_spans) {
  if (lambda_a <= 0) throw ConfigError("lambda_a must be positive");
  if (given_spans) return spans;
  auto idx = top_scoring(scores, spans, static_cast<std::size_t>(unary_keep_count(lambda_a, n_tokens)));
  std::vector<Span> out;
  for (int i : idx) out.push_back(spans[i]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ScoredSpan> shortlist(const std::vector<Span>& candidates,
                                  const std::vector<double>& coarse_scores, int k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  std::vector<ScoredSpan> out;
  for (int i : top_scoring(coarse_scores, candidates, static_cast<std::size_t>(k))) {
    out.push_back({candidates[i], coarse_scores[i]});
  }
  return out;
}

double coarse_score(const nn::RowVector& event, const nn::Matrix& bilinear,
                    const nn::RowVector& argument, std::optional<double> s_a,
                    std::optional<double> s_e, double phi_c) {
  if (bilinear.rows() != event.size() || bilinear.cols() != argument.size()) {
    throw ConfigError("coarse score: W_c shape does not match span sizes");
  }
  double s = (event * bilinear * argument.transpose())(0, 0) + phi_c;
  if (s_a) s += *s_a;
  if (s_e) s += *s_e;
  return s;
}

CandidateScorer::CandidateScorer(nn::ParameterStore& store, const ModelConfig& config,
                                 int span_dim, nn::Rng& init) {
  argument_scorer_ = nn::Scorer::create(store, "prune.s_a", span_dim, config.ffnn_size,
                                        config.ffnn_layers, config.ffnn_dropout, init);
  event_scorer_ = nn::Scorer::create(store, "prune.s_e", span_dim, config.ffnn_size,
                                     config.ffnn_layers, config.ffnn_dropout, init);
  distance_scorer_ = nn::Scorer::create(store, "prune.distance", config.feature_dim,
                                        config.ffnn_size, config.ffnn_layers, config.ffnn_dropout, init);
  bilinear_ = &store.add("prune.bilinear", nn::gaussian(span_dim, span_dim, 0.01, init));
}

Var CandidateScorer::unary(Graph& g, Var spans) const { return argument_scorer_.apply(g, spans); }

Var CandidateScorer::event_unary(Graph& g, Var events) const {
  return event_scorer_.apply(g, events);
}

Var CandidateScorer::coarse(Graph& g, Var event, Var candidates, Var distance_features, Var s_a,
                            Var s_e) const {
  // (e W_c) a^T for every candidate row.
  Var projected = g.matmul(event, g.param(*bilinear_));
  Var score = g.matmul(candidates, g.transpose(projected));
  if (distance_features.valid()) score = g.add(score, distance_scorer_.apply(g, distance_features));
  if (s_a.valid()) score = g.add(score, s_a);
  if (s_e.valid()) {
    std::vector<int> zeros(static_cast<std::size_t>(g.rows(score)), 0);
    score = g.add(score, g.gather_rows(s_e, zeros));
  }
  return score;
}

}  // namespace arglink
