#ifndef ARGLINK_LINKER_H_
#define ARGLINK_LINKER_H_

#include <utility>
#include <vector>

#include "arglink/config.h"
#include "arglink/nn/graph.h"

namespace arglink {

// Token-distance buckets {0, 1, 2, 3, 4, 5-7, 8-15, 16-31, 32-63, 64+}.
inline constexpr int kDistanceBuckets = 10;
int bucket_distance(int distance);

// Softmax over the candidate scores plus the ε outcome, whose logit is fixed
// at 0. Returns |scores| + 1 probabilities with ε last.
std::vector<double> link_probabilities(const std::vector<double>& scores);

// One supervised outcome: row `role` of the score matrix, and either a
// candidate column or -1 for ε.
struct LinkTarget {
  int role = 0;
  int candidate = -1;
};

// Sum over targets of -log P(target | e, r) where each row of `scores`
// (roles x candidates) is normalized together with a zero ε logit.
nn::Var epsilon_nll(nn::Graph& g, nn::Var scores, const std::vector<LinkTarget>& targets);

// Inputs for scoring one event against its shortlisted candidates.
struct LinkInputs {
  nn::Var event;             // 1 x span_dim
  nn::Var candidates;        // m x span_dim
  std::vector<int> roles;    // role indices to score
  std::vector<int> distance_buckets;  // per candidate
  nn::Var coarse;            // m x 1; used when s_c is enabled
};

// Role embeddings, the event-role network and the link score components
// s_{E,R}, s_{A,R}, s_l, s_c.
class Linker {
 public:
  Linker(nn::ParameterStore& store, const ModelConfig& config, int span_dim, int num_roles,
         nn::Rng& init);

  nn::Var role_embeddings(nn::Graph& g, const std::vector<int>& roles) const;
  // F_ã([e; r]) for each role: |roles| x ffnn_size.
  nn::Var event_role(nn::Graph& g, nn::Var event, const std::vector<int>& roles) const;
  // Embedded distance buckets: m x feature_dim.
  nn::Var distance_features(nn::Graph& g, const std::vector<int>& buckets) const;

  // Individual components, each roles x m (broadcast where the component does
  // not depend on the candidate or the role).
  nn::Var s_er(nn::Graph& g, const LinkInputs& in) const;
  nn::Var s_ar(nn::Graph& g, const LinkInputs& in) const;
  nn::Var s_l(nn::Graph& g, const LinkInputs& in) const;
  nn::Var s_c(nn::Graph& g, const LinkInputs& in) const;

  // Sum of the enabled components: roles x m.
  nn::Var link_scores(nn::Graph& g, const LinkInputs& in) const;

  const nn::Parameter& role_table() const { return *roles_; }
  const ModelConfig& config() const { return config_; }

 private:
  // (roles * m) x 1 -> roles x m.
  nn::Var to_grid(nn::Graph& g, nn::Var column, int roles, int m) const;

  ModelConfig config_;
  nn::Parameter* roles_;
  nn::Parameter* distance_embedding_;
  nn::FeedForward event_role_;
  nn::Linear argument_projection_;
  nn::Scorer event_role_scorer_;    // s_{E,R}
  nn::Scorer argument_role_scorer_; // s_{A,R}
  nn::Scorer link_scorer_;          // s_l
};

}  // namespace arglink

#endif  // ARGLINK_LINKER_H_
