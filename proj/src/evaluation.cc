#include "arglink/evaluation.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include "arglink/errors.h"
#include "json.hpp"

namespace arglink {
namespace {

using Triple = std::tuple<std::string, std::string, std::string, Span>;

Triple key(const LinkPrediction& p) { return {p.doc_id, p.event_id, p.role, p.span}; }

std::set<Triple> unique_triples(const std::vector<LinkPrediction>& items, const char* what,
                                std::vector<std::string>* warnings) {
  std::set<Triple> out;
  for (const auto& p : items) {
    if (!out.insert(key(p)).second && warnings) {
      warnings->push_back(std::string("duplicate ") + what + " triple " + p.doc_id + "/" +
                          p.event_id + "/" + p.role + "/" + to_string(p.span) +
                          " counted once");
    }
  }
  return out;
}

}  // namespace

Prf make_prf(std::size_t correct, std::size_t predicted, std::size_t gold) {
  Prf s;
  s.correct = correct;
  s.predicted = predicted;
  s.gold = gold;
  s.precision = predicted ? 100.0 * correct / predicted : 0.0;
  s.recall = gold ? 100.0 * correct / gold : 0.0;
  const double sum = s.precision + s.recall;
  s.f1 = sum > 0.0 ? 2.0 * s.precision * s.recall / sum : 0.0;
  return s;
}

Prf score_triples(const std::vector<LinkPrediction>& predictions,
                  const std::vector<LinkPrediction>& gold, std::vector<std::string>* warnings) {
  const auto pred = unique_triples(predictions, "predicted", warnings);
  const auto ref = unique_triples(gold, "gold", warnings);
  std::size_t correct = 0;
  for (const auto& t : pred) correct += ref.count(t);
  return make_prf(correct, pred.size(), ref.size());
}

DistanceBreakdown distance_breakdown(const std::vector<LinkPrediction>& predictions,
                                     const std::vector<LinkPrediction>& gold,
                                     const std::vector<Document>& docs, int radius) {
  std::map<std::string, const Document*> by_id;
  for (const auto& d : docs) by_id[d.doc_id] = &d;
  auto distance = [&](const Triple& t) {
    const auto& [doc_id, event_id, role, span] = t;
    const auto it = by_id.find(doc_id);
    if (it == by_id.end()) throw ValidationError("triple refers to unknown document " + doc_id);
    const Document& doc = *it->second;
    try {
      return sentence_distance(doc, doc.event(event_id).trigger, span, radius);
    } catch (const std::out_of_range&) {
      throw ValidationError("triple " + doc_id + "/" + event_id + "/" + role + "/" +
                            to_string(span) + " lies outside its context window");
    }
  };

  const auto pred = unique_triples(predictions, "predicted", nullptr);
  const auto ref = unique_triples(gold, "gold", nullptr);
  const int rows = 2 * radius + 1;
  std::vector<std::size_t> n_pred(rows), n_gold(rows), n_correct(rows);
  for (const auto& t : ref) ++n_gold[distance(t) + radius];
  for (const auto& t : pred) {
    const int d = distance(t) + radius;
    ++n_pred[d];
    if (ref.count(t)) ++n_correct[d];
  }
  DistanceBreakdown out;
  std::size_t c = 0, p = 0, g = 0;
  for (int i = 0; i < rows; ++i) {
    out.rows.push_back({i - radius, make_prf(n_correct[i], n_pred[i], n_gold[i])});
    c += n_correct[i];
    p += n_pred[i];
    g += n_gold[i];
  }
  out.total = make_prf(c, p, g);
  return out;
}

double ConfusionMatrix::matched() const {
  double s = 0.0;
  for (const auto& [g, row] : counts) {
    const auto it = row.find(g);
    if (it != row.end()) s += it->second;
  }
  return s;
}

double ConfusionMatrix::errors() const {
  double s = 0.0;
  for (const auto& [g, row] : counts) {
    if (g == kSpurious) continue;
    for (const auto& [p, n] : row) {
      if (p != g && p != kMissed) s += n;
    }
  }
  return s;
}

double ConfusionMatrix::missed() const {
  double s = 0.0;
  for (const auto& [g, row] : counts) {
    const auto it = row.find(kMissed);
    if (it != row.end()) s += it->second;
  }
  return s;
}

double ConfusionMatrix::spurious() const {
  const auto it = counts.find(kSpurious);
  if (it == counts.end()) return 0.0;
  double s = 0.0;
  for (const auto& [p, n] : it->second) s += n;
  return s;
}

std::map<std::string, std::map<std::string, double>> ConfusionMatrix::normalized() const {
  auto out = counts;
  for (auto& [g, row] : out) {
    double total = 0.0;
    for (const auto& [p, n] : row) total += n;
    if (total > 0.0) {
      for (auto& [p, n] : row) n /= total;
    }
  }
  return out;
}

ConfusionMatrix confusion_matrix(const std::vector<LinkPrediction>& predictions,
                                 const std::vector<LinkPrediction>& gold) {
  using Slot = std::tuple<std::string, std::string, Span>;
  // Duplicate triples count once, as in score_triples.
  std::map<Slot, std::pair<std::set<std::string>, std::set<std::string>>> slots;
  for (const auto& g : gold) slots[{g.doc_id, g.event_id, g.span}].first.insert(g.role);
  for (const auto& p : predictions) slots[{p.doc_id, p.event_id, p.span}].second.insert(p.role);

  ConfusionMatrix m;
  for (auto& [slot, roles] : slots) {
    auto& [g, p] = roles;
    std::vector<std::string> left_gold, left_pred;
    for (const auto& r : g) {
      const auto it = p.find(r);
      if (it != p.end()) {
        m.counts[r][r] += 1.0;
        p.erase(it);
      } else {
        left_gold.push_back(r);
      }
    }
    left_pred.assign(p.begin(), p.end());
    const std::size_t paired = std::min(left_gold.size(), left_pred.size());
    for (std::size_t i = 0; i < paired; ++i) m.counts[left_gold[i]][left_pred[i]] += 1.0;
    for (std::size_t i = paired; i < left_gold.size(); ++i) m.counts[left_gold[i]][kMissed] += 1.0;
    for (std::size_t i = paired; i < left_pred.size(); ++i) {
      m.counts[kSpurious][left_pred[i]] += 1.0;
    }
  }
  return m;
}

SimilarityMatrix role_similarity(const nn::Matrix& embeddings,
                                 const std::vector<std::string>& roles) {
  if (static_cast<std::size_t>(embeddings.rows()) != roles.size()) {
    throw ValidationError("one embedding row per role required");
  }
  const int n = static_cast<int>(roles.size());
  SimilarityMatrix s{roles, nn::Matrix(n, n), std::vector<bool>(n)};
  std::vector<double> norms(n);
  for (int i = 0; i < n; ++i) {
    norms[i] = embeddings.row(i).norm();
    s.undefined[i] = norms[i] == 0.0;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (s.undefined[i] || s.undefined[j]) {
        s.cosine(i, j) = nan;
      } else if (i == j) {
        s.cosine(i, j) = 1.0;
      } else {
        s.cosine(i, j) = embeddings.row(i).dot(embeddings.row(j)) / (norms[i] * norms[j]);
      }
    }
  }
  return s;
}

MatchMode parse_match_mode(const std::string& name) {
  if (name == "strict") return MatchMode::kStrict;
  if (name == "approximate") return MatchMode::kApproximate;
  throw ConfigError("unknown match mode '" + name + "'");
}

std::map<std::string, Prf> string_match_score(const std::vector<SlotFill>& predictions,
                                              const std::vector<SlotFill>& gold, MatchMode mode) {
  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::pair<std::vector<std::string>, std::vector<std::string>>> groups;
  for (const auto& p : predictions) groups[{p.doc_id, p.slot}].first.push_back(p.value);
  for (const auto& g : gold) groups[{g.doc_id, g.slot}].second.push_back(g.value);

  std::map<std::string, std::array<std::size_t, 3>> totals;  // correct, predicted, gold
  for (const auto& [k, values] : groups) {
    const auto& [pred, ref] = values;
    std::vector<bool> pred_used(pred.size()), ref_used(ref.size());
    std::size_t correct = 0;
    // Exact matches first so that containment never steals an exact partner.
    for (int pass = 0; pass < (mode == MatchMode::kStrict ? 1 : 2); ++pass) {
      for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred_used[i]) continue;
        for (std::size_t j = 0; j < ref.size(); ++j) {
          if (ref_used[j]) continue;
          const bool match = pass == 0 ? pred[i] == ref[j]
                                       : pred[i].find(ref[j]) != std::string::npos ||
                                             ref[j].find(pred[i]) != std::string::npos;
          if (match) {
            pred_used[i] = ref_used[j] = true;
            ++correct;
            break;
          }
        }
      }
    }
    auto& t = totals[k.second];
    t[0] += correct;
    t[1] += pred.size();
    t[2] += ref.size();
  }
  std::map<std::string, Prf> out;
  for (const auto& [slot, t] : totals) out[slot] = make_prf(t[0], t[1], t[2]);
  return out;
}

namespace {

nlohmann::ordered_json prf_json(const Prf& s) {
  return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
          {"predicted", s.predicted}, {"gold", s.gold},     {"correct", s.correct}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_json(const Prf& overall, const DistanceBreakdown* breakdown,
                        const std::vector<std::string>& warnings) {
  nlohmann::ordered_json j = prf_json(overall);
  if (breakdown) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : breakdown->rows) {
      auto row = prf_json(r.score);
      row["distance"] = r.distance;
      rows.push_back(row);
    }
    j["distance"] = rows;
    j["distance_total"] = prf_json(breakdown->total);
  }
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& matrix) {
  // Square over every role seen, plus the missed column and the spurious row,
  // so files from different runs line up.
  std::set<std::string> roles;
  for (const auto& [g, row] : matrix.counts) {
    if (g != kSpurious) roles.insert(g);
    for (const auto& [p, n] : row) {
      if (p != kMissed) roles.insert(p);
    }
  }
  std::vector<std::string> columns(roles.begin(), roles.end());
  std::vector<std::string> rows = columns;
  columns.push_back(kMissed);
  rows.push_back(kSpurious);
  const auto norm = matrix.normalized();
  out << "gold";
  for (const auto& c : columns) out << ',' << csv_field(c);
  out << '\n';
  for (const auto& g : rows) {
    out << csv_field(g);
    const auto row = norm.find(g);
    for (const auto& c : columns) {
      double v = 0.0;
      if (row != norm.end()) {
        const auto it = row->second.find(c);
        if (it != row->second.end()) v = it->second;
      }
      out << ',' << v;
    }
    out << '\n';
  }
}

void write_similarity_csv(std::ostream& out, const SimilarityMatrix& matrix) {
  out << "role";
  for (const auto& r : matrix.roles) out << ',' << csv_field(r);
  out << '\n';
  for (std::size_t i = 0; i < matrix.roles.size(); ++i) {
    out << csv_field(matrix.roles[i]);
    for (std::size_t j = 0; j < matrix.roles.size(); ++j) {
      const double v = matrix.cosine(i, j);
      out << ',';
      if (std::isnan(v)) {
        out << "undefined";
      } else {
        out << v;
      }
    }
    out << '\n';
  }
}

}  // namespace arglink
