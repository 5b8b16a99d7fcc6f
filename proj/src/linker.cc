#include "arglink/linker.h"

#include <algorithm>
#include <cmath>

#include "arglink/errors.h"

namespace arglink {

using nn::Graph;
using nn::Matrix;
using nn::Var;

int bucket_distance(int distance) {
  if (distance < 0) throw std::invalid_argument("distance must be non-negative");
  if (distance <= 4) return distance;
  if (distance <= 7) return 5;
  if (distance <= 15) return 6;
  if (distance <= 31) return 7;
  if (distance <= 63) return 8;
  return 9;
}

std::vector<double> link_probabilities(const std::vector<double>& scores) {
  double max = 0.0;  // ε logit
  for (double s : scores) {
    if (!std::isfinite(s)) throw NumericError("non-finite link score");
    max = std::max(max, s);
  }
  std::vector<double> p;
  double z = std::exp(-max);
  for (double s : scores) z += std::exp(s - max);
  for (double s : scores) p.push_back(std::exp(s - max) / z);
  p.push_back(std::exp(-max) / z);
  return p;
}

Var epsilon_nll(Graph& g, Var scores, const std::vector<LinkTarget>& targets) {
  const Matrix& s = g.value(scores);
  const int roles = static_cast<int>(s.rows());
  const int m = static_cast<int>(s.cols());
  // Row-wise probabilities with ε in the last column.
  auto probs = std::make_shared<Matrix>(roles, m + 1);
  for (int r = 0; r < roles; ++r) {
    std::vector<double> row(s.row(r).data(), s.row(r).data() + m);
    const auto p = link_probabilities(row);
    for (int j = 0; j <= m; ++j) (*probs)(r, j) = p[j];
  }
  Matrix out(1, 1);
  out(0, 0) = 0.0;
  for (const auto& t : targets) {
    if (t.role < 0 || t.role >= roles || t.candidate < -1 || t.candidate >= m) {
      throw std::logic_error("link target out of range");
    }
    const int col = t.candidate < 0 ? m : t.candidate;
    out(0, 0) -= std::log((*probs)(t.role, col));
  }
  return g.custom(std::move(out), {scores},
                  [probs, targets, m](const Matrix& dout, std::vector<Matrix*>& in) {
                    if (!in[0]) return;
                    const double d = dout(0, 0);
                    for (const auto& t : targets) {
                      // d(-log p_t)/d s_j = p_j - [j == t]; ε has no parameter.
                      in[0]->row(t.role) += d * probs->row(t.role).head(m);
                      if (t.candidate >= 0) (*in[0])(t.role, t.candidate) -= d;
                    }
                  });
}

Linker::Linker(nn::ParameterStore& store, const ModelConfig& config, int span_dim, int num_roles,
               nn::Rng& init)
    : config_(config) {
  const int h = config.ffnn_size;
  roles_ = &store.add("link.roles", nn::gaussian(num_roles, config.role_dim, 0.1, init));
  distance_embedding_ =
      &store.add("link.distance", nn::gaussian(kDistanceBuckets, config.feature_dim, 0.1, init));
  event_role_ = nn::FeedForward::create(store, "link.event_role", span_dim + config.role_dim, h,
                                        config.ffnn_layers, config.ffnn_dropout, init);
  argument_projection_ = nn::Linear::create(store, "link.argument_projection", span_dim, h, init);
  event_role_scorer_ = nn::Scorer::create(store, "link.s_er", span_dim + config.role_dim, h,
                                          config.ffnn_layers, config.ffnn_dropout, init);
  argument_role_scorer_ = nn::Scorer::create(store, "link.s_ar", span_dim + config.role_dim, h,
                                             config.ffnn_layers, config.ffnn_dropout, init);
  const int link_in = 3 * h + (config.use_distance ? config.feature_dim : 0);
  link_scorer_ = nn::Scorer::create(store, "link.s_l", link_in, h, config.ffnn_layers,
                                    config.ffnn_dropout, init);
}

Var Linker::role_embeddings(Graph& g, const std::vector<int>& roles) const {
  return g.gather_rows(g.param(*roles_), roles);
}

Var Linker::event_role(Graph& g, Var event, const std::vector<int>& roles) const {
  std::vector<int> zeros(roles.size(), 0);
  Var x = g.concat_cols({g.gather_rows(event, zeros), role_embeddings(g, roles)});
  return event_role_.apply(g, x);
}

Var Linker::distance_features(Graph& g, const std::vector<int>& buckets) const {
  return g.gather_rows(g.param(*distance_embedding_), buckets);
}

Var Linker::to_grid(Graph& g, Var column, int roles, int m) const {
  const Matrix& c = g.value(column);
  Matrix out = Eigen::Map<const Matrix>(c.data(), roles, m);
  return g.custom(std::move(out), {column},
                  [roles, m](const Matrix& dout, std::vector<Matrix*>& in) {
                    if (in[0]) *in[0] += Eigen::Map<const Matrix>(dout.data(), roles * m, 1);
                  });
}

namespace {

// Row indices pairing every role (outer) with every candidate (inner).
void pair_indices(int roles, int m, std::vector<int>& role_idx, std::vector<int>& cand_idx) {
  for (int r = 0; r < roles; ++r) {
    for (int j = 0; j < m; ++j) {
      role_idx.push_back(r);
      cand_idx.push_back(j);
    }
  }
}

}  // namespace

Var Linker::s_er(Graph& g, const LinkInputs& in) const {
  const int roles = static_cast<int>(in.roles.size());
  const int m = g.rows(in.candidates);
  std::vector<int> zeros(in.roles.size(), 0);
  Var x = g.concat_cols({g.gather_rows(in.event, zeros), role_embeddings(g, in.roles)});
  Var per_role = event_role_scorer_.apply(g, x);  // roles x 1
  std::vector<int> role_idx, cand_idx;
  pair_indices(roles, m, role_idx, cand_idx);
  return to_grid(g, g.gather_rows(per_role, role_idx), roles, m);
}

Var Linker::s_ar(Graph& g, const LinkInputs& in) const {
  const int roles = static_cast<int>(in.roles.size());
  const int m = g.rows(in.candidates);
  std::vector<int> role_idx, cand_idx;
  pair_indices(roles, m, role_idx, cand_idx);
  Var x = g.concat_cols({g.gather_rows(in.candidates, cand_idx),
                         g.gather_rows(role_embeddings(g, in.roles), role_idx)});
  return to_grid(g, argument_role_scorer_.apply(g, x), roles, m);
}

Var Linker::s_l(Graph& g, const LinkInputs& in) const {
  const int roles = static_cast<int>(in.roles.size());
  const int m = g.rows(in.candidates);
  std::vector<int> role_idx, cand_idx;
  pair_indices(roles, m, role_idx, cand_idx);
  Var projected = argument_projection_.apply(g, in.candidates);  // m x h
  Var implicit = event_role(g, in.event, in.roles);               // roles x h
  if (g.cols(projected) != g.cols(implicit)) {
    throw ConfigError("link score: argument and event-role widths differ");
  }
  Var a = g.gather_rows(projected, cand_idx);
  Var r = g.gather_rows(implicit, role_idx);
  std::vector<Var> parts{a, r, g.cmul(a, r)};
  if (config_.use_distance) {
    if (in.distance_buckets.size() != static_cast<std::size_t>(m)) {
      throw ConfigError("link score: one distance bucket per candidate required");
    }
    std::vector<int> buckets;
    for (int j : cand_idx) buckets.push_back(in.distance_buckets[j]);
    parts.push_back(distance_features(g, buckets));
  }
  return to_grid(g, link_scorer_.apply(g, g.concat_cols(parts)), roles, m);
}

Var Linker::s_c(Graph& g, const LinkInputs& in) const {
  const int roles = static_cast<int>(in.roles.size());
  const int m = g.rows(in.candidates);
  if (!in.coarse.valid()) throw ConfigError("link score: s_c enabled without coarse scores");
  std::vector<int> role_idx, cand_idx;
  pair_indices(roles, m, role_idx, cand_idx);
  return to_grid(g, g.gather_rows(in.coarse, cand_idx), roles, m);
}

Var Linker::link_scores(Graph& g, const LinkInputs& in) const {
  std::vector<Var> terms;
  if (config_.use_s_er) terms.push_back(s_er(g, in));
  if (config_.use_s_ar) terms.push_back(s_ar(g, in));
  if (config_.use_s_l) terms.push_back(s_l(g, in));
  if (config_.use_s_c) terms.push_back(s_c(g, in));
  if (terms.empty()) throw ConfigError("no link score component enabled");
  Var total = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) total = g.add(total, terms[i]);
  return total;
}

}  // namespace arglink
