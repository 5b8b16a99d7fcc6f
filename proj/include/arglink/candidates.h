#ifndef ARGLINK_CANDIDATES_H_
#define ARGLINK_CANDIDATES_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arglink/config.h"
#include "arglink/corpus.h"
#include "arglink/nn/graph.h"

namespace arglink {

// All within-sentence spans of width <= max_width that are not trigger spans,
// ordered by (start, end).
std::vector<Span> enumerate_spans(const Document& doc, int max_width);

// Indices of the `count` best entries: score descending, ties by span
// position ascending.
std::vector<int> top_scoring(const std::vector<double>& scores, const std::vector<Span>& spans,
                             std::size_t count);

// Number of spans kept by unary pruning: ceil(lambda_a * n_tokens).
int unary_keep_count(double lambda_a, int n_tokens);

// Keeps the top ceil(lambda_a * n_tokens) spans by unary score, returned in
// (start, end) order. With `given_spans` nothing is pruned.
std::vector<Span> prune_unary(const std::vector<Span>& spans, const std::vector<double>& scores,
                              double lambda_a, int n_tokens, bool given_spans = false);

// Top-k candidates for one event by coarse score, best first.
struct ScoredSpan {
  Span span;
  double score = 0.0;
};
std::vector<ScoredSpan> shortlist(const std::vector<Span>& candidates,
                                  const std::vector<double>& coarse_scores, int k);

// e^T W_c a + s_A(a) + s_E(e) + phi_c(e, a); absent unary terms are skipped.
double coarse_score(const nn::RowVector& event, const nn::Matrix& bilinear,
                    const nn::RowVector& argument, std::optional<double> s_a,
                    std::optional<double> s_e, double phi_c);

// Learned pieces of pruning: s_A, s_E, the bilinear W_c and the distance
// scorer used as phi_c.
class CandidateScorer {
 public:
  CandidateScorer(nn::ParameterStore& store, const ModelConfig& config, int span_dim, nn::Rng& init);

  // s_A(a) for every row: m x 1.
  nn::Var unary(nn::Graph& g, nn::Var spans) const;
  // s_E(e): rows x 1.
  nn::Var event_unary(nn::Graph& g, nn::Var events) const;
  // s_c(e, a) for one event (1 x D) against m candidates (m x D): m x 1.
  // `distance_features` (m x feature_dim) feeds phi_c when valid; `s_a` and
  // `s_e` are added when valid.
  nn::Var coarse(nn::Graph& g, nn::Var event, nn::Var candidates, nn::Var distance_features,
                 nn::Var s_a, nn::Var s_e) const;

  const nn::Parameter& bilinear() const { return *bilinear_; }

 private:
  nn::Scorer argument_scorer_;
  nn::Scorer event_scorer_;
  nn::Scorer distance_scorer_;
  nn::Parameter* bilinear_;
};

}  // namespace arglink

#endif  // ARGLINK_CANDIDATES_H_
