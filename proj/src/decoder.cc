#include "arglink/decoder.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

#include "arglink/errors.h"

namespace arglink {
namespace {

// Candidate order: score descending, then span position.
std::vector<int> ranked(const RoleScores& r) {
  std::vector<int> idx(r.spans.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (r.scores[a] != r.scores[b]) return r.scores[a] > r.scores[b];
    return r.spans[a] < r.spans[b];
  });
  return idx;
}

LinkPrediction make(const EventScoreTable& t, const RoleScores& r, int i) {
  return {t.doc_id, t.event_id, r.role, r.spans[i], r.scores[i]};
}

}  // namespace

std::vector<LinkPrediction> decode_argmax(const EventScoreTable& table) {
  std::vector<LinkPrediction> out;
  for (const auto& r : table.roles) {
    const auto order = ranked(r);
    if (!order.empty() && r.scores[order[0]] > 0.0) out.push_back(make(table, r, order[0]));
  }
  return out;
}

std::vector<LinkPrediction> decode_greedy(const EventScoreTable& table) {
  std::vector<LinkPrediction> out;
  for (const auto& r : table.roles) {
    std::vector<Span> accepted;
    for (int i : ranked(r)) {
      if (r.scores[i] <= 0.0) break;
      const bool clash = std::any_of(accepted.begin(), accepted.end(),
                                     [&](const Span& s) { return s.overlaps(r.spans[i]); });
      if (clash) continue;
      accepted.push_back(r.spans[i]);
      out.push_back(make(table, r, i));
    }
  }
  return out;
}

std::vector<LinkPrediction> decode_type_constrained(const std::vector<LinkPrediction>& greedy,
                                                    const Ontology& ontology,
                                                    const EventTypeMap& gold_types) {
  using Key = std::tuple<std::string, std::string, std::string>;
  std::map<Key, std::vector<std::size_t>> groups;
  std::vector<Key> order;
  for (std::size_t i = 0; i < greedy.size(); ++i) {
    const auto& p = greedy[i];
    const auto doc = gold_types.find(p.doc_id);
    if (doc == gold_types.end() || !doc->second.count(p.event_id)) {
      throw ConfigError("type-constrained decoding needs a gold type for " + p.doc_id + "/" +
                        p.event_id);
    }
    const EventType& type = ontology.type(doc->second.at(p.event_id));
    if (type.find_role(p.role) == nullptr) continue;
    Key key{p.doc_id, p.event_id, p.role};
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(i);
  }
  std::vector<bool> keep(greedy.size(), false);
  for (const auto& key : order) {
    auto& idx = groups[key];
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (greedy[a].score != greedy[b].score) return greedy[a].score > greedy[b].score;
      return greedy[a].span < greedy[b].span;
    });
    const auto& [doc, event, role] = key;
    const int m = ontology.type(gold_types.at(doc).at(event)).find_role(role)->multiplicity;
    // Identical spans count once toward m_r.
    std::vector<Span> spans;
    for (std::size_t i : idx) {
      const Span& s = greedy[i].span;
      const bool seen = std::find(spans.begin(), spans.end(), s) != spans.end();
      if (!seen && static_cast<int>(spans.size()) >= m) continue;
      if (!seen) spans.push_back(s);
      keep[i] = true;
    }
  }
  std::vector<LinkPrediction> out;
  for (std::size_t i = 0; i < greedy.size(); ++i) {
    if (keep[i]) out.push_back(greedy[i]);
  }
  return out;
}

std::vector<LinkPrediction> decode(Decoding strategy, const std::vector<EventScoreTable>& tables,
                                   const Ontology& ontology, const EventTypeMap& gold_types) {
  std::vector<LinkPrediction> out;
  for (const auto& t : tables) {
    auto preds = strategy == Decoding::kArgmax ? decode_argmax(t) : decode_greedy(t);
    out.insert(out.end(), preds.begin(), preds.end());
  }
  if (strategy == Decoding::kTypeConstrained) {
    return decode_type_constrained(out, ontology, gold_types);
  }
  return out;
}

}  // namespace arglink
