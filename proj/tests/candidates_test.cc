#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "arglink/candidates.h"
#include "arglink/errors.h"
#include "test_util.h"

namespace arglink {
namespace {

using testing::make_document;

Document two_sentences() {
  auto d = make_document("d", {{"a", "b", "c", "d"}, {"e", "f", "g"}});
  d.events.push_back({"e1", {1, 1}, std::nullopt});
  return d;
}

TEST(Enumerate, SmallExample) {
  const auto spans = enumerate_spans(two_sentences(), 2);
  const std::vector<Span> expected{{0, 0}, {0, 1}, {1, 2}, {2, 2}, {2, 3}, {3, 3},
                                   {4, 4}, {4, 5}, {5, 5}, {5, 6}, {6, 6}};
  EXPECT_EQ(spans, expected);
}

TEST(Enumerate, CountMatchesBruteForce) {
  nn::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<std::string>> sentences;
    const int ns = 1 + static_cast<int>(rng.below(4));
    for (int s = 0; s < ns; ++s) {
      sentences.emplace_back(1 + rng.below(9), "w");
    }
    const auto d = make_document("d", sentences);
    const int width = 1 + static_cast<int>(rng.below(6));
    std::size_t expected = 0;
    for (int i = 0; i < d.size(); ++i) {
      for (int j = i; j < d.size(); ++j) {
        if (j - i + 1 <= width && d.sentence_of(i) == d.sentence_of(j)) ++expected;
      }
    }
    const auto spans = enumerate_spans(d, width);
    EXPECT_EQ(spans.size(), expected);
    EXPECT_TRUE(std::is_sorted(spans.begin(), spans.end()));
  }
}

TEST(Prune, KeepCount) {
  EXPECT_EQ(unary_keep_count(0.4, 10), 4);
  EXPECT_EQ(unary_keep_count(0.4, 11), 5);
  EXPECT_EQ(unary_keep_count(1.0, 7), 7);
  EXPECT_EQ(unary_keep_count(0.4, 1), 1);
}

TEST(Prune, KeepsTopScoresInSpanOrder) {
  const std::vector<Span> spans{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};
  const std::vector<double> scores{0.1, 0.9, 0.5, 0.5, -1.0};
  // 0.4 * 5 = 2 spans: 0.9 then the earlier of the two 0.5 ties.
  EXPECT_EQ(prune_unary(spans, scores, 0.4, 5), (std::vector<Span>{{1, 1}, {2, 2}}));
}

TEST(Prune, PropertiesOnRandomScores) {
  nn::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto d = make_document("d", {std::vector<std::string>(3 + rng.below(20), "w")});
    const auto spans = enumerate_spans(d, 4);
    std::vector<double> scores;
    for (std::size_t i = 0; i < spans.size(); ++i) scores.push_back(std::round(rng.normal() * 4));
    const double lambda = 0.1 + 0.9 * rng.uniform();
    const auto kept = prune_unary(spans, scores, lambda, d.size());
    const auto want = std::min<std::size_t>(spans.size(), unary_keep_count(lambda, d.size()));
    ASSERT_EQ(kept.size(), want);
    // Every dropped span scores no higher than every kept one.
    double min_kept = 1e9, max_dropped = -1e9;
    for (std::size_t i = 0; i < spans.size(); ++i) {
      const bool in = std::binary_search(kept.begin(), kept.end(), spans[i]);
      if (in) min_kept = std::min(min_kept, scores[i]);
      else max_dropped = std::max(max_dropped, scores[i]);
    }
    EXPECT_GE(min_kept, max_dropped);
    EXPECT_EQ(prune_unary(spans, scores, 1.0, static_cast<int>(spans.size())), spans);
  }
}

TEST(Prune, GivenSpansAreNotPruned) {
  const std::vector<Span> spans{{0, 0}, {1, 1}, {2, 2}};
  EXPECT_EQ(prune_unary(spans, {0, 0, 0}, 0.1, 3, true), spans);
  EXPECT_THROW(prune_unary(spans, {0, 0, 0}, 0.0, 3), ConfigError);
}

TEST(Shortlist, MatchesBruteForceTopK) {
  nn::Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Span> spans;
    std::vector<double> scores;
    const int n = static_cast<int>(rng.below(30));
    for (int i = 0; i < n; ++i) {
      spans.push_back({i, i});
      scores.push_back(std::round(rng.normal() * 3));
    }
    const int k = 1 + static_cast<int>(rng.below(12));
    const auto top = shortlist(spans, scores, k);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] > scores[b]; });
    ASSERT_EQ(top.size(), static_cast<std::size_t>(std::min(n, k)));
    for (std::size_t i = 0; i < top.size(); ++i) {
      EXPECT_EQ(top[i].span, spans[order[i]]);
      EXPECT_EQ(top[i].score, scores[order[i]]);
    }
  }
  EXPECT_THROW(shortlist({}, {}, 0), ConfigError);
}

TEST(CoarseScore, Identities) {
  nn::RowVector e(3), a(2);
  e << 1, 2, 3;
  a << 1, -1;
  nn::Matrix w(3, 2);
  w << 1, 0, 0, 1, 1, 1;
  // e W = [4, 5]; dot a = -1.
  EXPECT_DOUBLE_EQ(coarse_score(e, w, a, std::nullopt, std::nullopt, 0.0), -1.0);
  EXPECT_DOUBLE_EQ(coarse_score(e, w, a, 2.0, 0.5, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(coarse_score(e, nn::Matrix::Zero(3, 2), a, std::nullopt, std::nullopt, 0.0), 0.0);
  EXPECT_THROW(coarse_score(e, nn::Matrix::Zero(2, 2), a, std::nullopt, std::nullopt, 0.0),
               ConfigError);
}

ModelConfig small_config() {
  ModelConfig c;
  c.ffnn_size = 6;
  c.ffnn_layers = 2;
  c.feature_dim = 4;
  c.ffnn_dropout = 0.0;
  return c;
}

TEST(CandidateScorer, CoarseGraphMatchesClosedForm) {
  nn::ParameterStore store;
  nn::Rng init(4);
  const auto c = small_config();
  CandidateScorer scorer(store, c, 5, init);
  store.get("prune.bilinear").value = nn::gaussian(5, 5, 1.0, init);
  const nn::Matrix event = nn::gaussian(1, 5, 1.0, init);
  const nn::Matrix cands = nn::gaussian(3, 5, 1.0, init);
  nn::Graph g;
  auto ev = g.input(event);
  auto ca = g.input(cands);
  auto s_a = scorer.unary(g, ca);
  auto s_e = scorer.event_unary(g, ev);
  auto out = scorer.coarse(g, ev, ca, nn::Var{}, s_a, s_e);
  for (int j = 0; j < 3; ++j) {
    const double want = coarse_score(event.row(0), store.get("prune.bilinear").value, cands.row(j),
                                     g.value(s_a)(j, 0), g.value(s_e)(0, 0), 0.0);
    EXPECT_NEAR(g.value(out)(j, 0), want, 1e-12);
  }
}

TEST(CandidateScorer, ZeroParametersScoreZero) {
  nn::ParameterStore store;
  nn::Rng init(4);
  CandidateScorer scorer(store, small_config(), 5, init);
  for (auto* p : store.all()) p->value.setZero();
  nn::Graph g;
  auto spans = g.input(nn::gaussian(4, 5, 1.0, init));
  EXPECT_TRUE(g.value(scorer.unary(g, spans)).isZero());
}

TEST(CandidateScorer, GradientsMatchFiniteDifferences) {
  nn::ParameterStore store;
  nn::Rng init(8);
  CandidateScorer scorer(store, small_config(), 5, init);
  const nn::Matrix event = nn::gaussian(1, 5, 1.0, init);
  const nn::Matrix cands = nn::gaussian(4, 5, 1.0, init);
  const nn::Matrix dist = nn::gaussian(4, 4, 1.0, init);
  const auto result = testing::check_gradients(store, [&](nn::Graph& g) {
    auto ev = g.input(event);
    auto ca = g.input(cands);
    auto out = scorer.coarse(g, ev, ca, g.input(dist), scorer.unary(g, ca), scorer.event_unary(g, ev));
    return g.sum(g.tanh(out));
  });
  EXPECT_GE(result.pass_rate(), 0.99) << "worst " << result.worst;
}

}  // namespace
}  // namespace arglink
