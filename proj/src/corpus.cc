#include "arglink/corpus.h"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "arglink/errors.h"

namespace arglink {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

int Document::sentence_of(int token) const {
  auto it = std::upper_bound(sentence_starts.begin(), sentence_starts.end(), token);
  return static_cast<int>(it - sentence_starts.begin()) - 1;
}

std::pair<int, int> Document::sentence_bounds(int s) const {
  const int begin = sentence_starts.at(s);
  const int end = s + 1 < num_sentences() ? sentence_starts[s + 1] : size();
  return {begin, end};
}

const EventMention& Document::event(const std::string& event_id) const {
  for (const auto& e : events) {
    if (e.event_id == event_id) return e;
  }
  throw LookupError("document " + doc_id + " has no event " + event_id);
}

namespace {

void check_span(const Document& doc, const Span& s, const std::string& what) {
  if (s.start < 0 || s.end < s.start || s.end >= doc.size()) {
    throw ValidationError(what + " " + to_string(s) + " out of bounds (n=" +
                          std::to_string(doc.size()) + ")");
  }
  if (doc.sentence_of(s.start) != doc.sentence_of(s.end)) {
    throw ValidationError(what + " " + to_string(s) + " crosses a sentence boundary");
  }
}

Span span_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw ValidationError(what + " must be [start, end]");
  }
  return Span{j[0].get<int>(), j[1].get<int>()};
}

ordered_json span_to_json(const Span& s) { return ordered_json::array({s.start, s.end}); }

Document document_from_json(const json& j) {
  Document doc;
  try {
    doc.doc_id = j.at("doc_id").get<std::string>();
    doc.tokens = j.at("tokens").get<std::vector<std::string>>();
    doc.sentence_starts = j.at("sentence_starts").get<std::vector<int>>();
    for (const auto& e : j.at("events")) {
      EventMention ev;
      ev.event_id = e.at("event_id").get<std::string>();
      ev.trigger = span_from_json(e.at("trigger"), "trigger");
      if (e.contains("type") && !e["type"].is_null()) ev.type = e["type"].get<std::string>();
      doc.events.push_back(std::move(ev));
    }
    if (j.contains("given_arguments") && !j["given_arguments"].is_null()) {
      std::vector<Span> given;
      for (const auto& s : j["given_arguments"]) given.push_back(span_from_json(s, "given argument"));
      doc.given_arguments = std::move(given);
    }
    for (const auto& l : j.at("gold_links")) {
      GoldLink link;
      link.event_id = l.at("event_id").get<std::string>();
      link.role = l.at("role").get<std::string>();
      link.argument = span_from_json(l.at("span"), "gold span");
      doc.gold_links.push_back(std::move(link));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("schema: ") + e.what());
  }
  return doc;
}

}  // namespace

void validate(const Document& doc, const Ontology* ontology) {
  if (doc.tokens.empty()) throw ValidationError("document " + doc.doc_id + " has no tokens");
  if (doc.sentence_starts.empty() || doc.sentence_starts[0] != 0) {
    throw ValidationError("sentence_starts must begin at 0");
  }
  for (std::size_t i = 1; i < doc.sentence_starts.size(); ++i) {
    if (doc.sentence_starts[i] <= doc.sentence_starts[i - 1]) {
      throw ValidationError("sentence_starts must be strictly increasing");
    }
  }
  if (doc.sentence_starts.back() >= doc.size()) {
    throw ValidationError("sentence start beyond last token");
  }
  std::set<std::string> ids;
  for (const auto& e : doc.events) {
    if (!ids.insert(e.event_id).second) throw ValidationError("duplicate event id " + e.event_id);
    check_span(doc, e.trigger, "trigger of " + e.event_id);
    if (ontology && e.type && !ontology->has_type(*e.type)) {
      throw ValidationError("unknown event type " + *e.type);
    }
  }
  if (doc.given_arguments) {
    for (const auto& s : *doc.given_arguments) check_span(doc, s, "given argument");
  }
  for (const auto& l : doc.gold_links) {
    if (!ids.count(l.event_id)) throw ValidationError("link references unknown event " + l.event_id);
    check_span(doc, l.argument, "argument of " + l.event_id + "/" + l.role);
    if (ontology && !ontology->has_role(l.role)) throw ValidationError("unknown role " + l.role);
  }
}

std::vector<Document> parse_jsonl(std::istream& in, const Ontology* ontology) {
  std::vector<Document> docs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      Document doc = document_from_json(j);
      validate(doc, ontology);
      docs.push_back(std::move(doc));
    } catch (const json::parse_error& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

std::vector<Document> load_jsonl(const std::string& path, const Ontology* ontology) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return parse_jsonl(in, ontology);
}

std::string to_json_line(const Document& doc) {
  ordered_json j;
  j["doc_id"] = doc.doc_id;
  j["tokens"] = doc.tokens;
  j["sentence_starts"] = doc.sentence_starts;
  ordered_json events = ordered_json::array();
  for (const auto& e : doc.events) {
    ordered_json ev;
    ev["event_id"] = e.event_id;
    ev["trigger"] = span_to_json(e.trigger);
    ev["type"] = e.type ? ordered_json(*e.type) : ordered_json(nullptr);
    events.push_back(std::move(ev));
  }
  j["events"] = std::move(events);
  if (doc.given_arguments) {
    ordered_json given = ordered_json::array();
    for (const auto& s : *doc.given_arguments) given.push_back(span_to_json(s));
    j["given_arguments"] = std::move(given);
  } else {
    j["given_arguments"] = nullptr;
  }
  ordered_json links = ordered_json::array();
  for (const auto& l : doc.gold_links) {
    ordered_json link;
    link["event_id"] = l.event_id;
    link["role"] = l.role;
    link["span"] = span_to_json(l.argument);
    links.push_back(std::move(link));
  }
  j["gold_links"] = std::move(links);
  return j.dump();
}

void write_jsonl(std::ostream& out, const std::vector<Document>& docs) {
  for (const auto& d : docs) out << to_json_line(d) << '\n';
}

void write_jsonl(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  write_jsonl(out, docs);
}

std::pair<int, int> context_window(const Document& doc, const Span& trigger, int radius) {
  const int s = doc.sentence_of(trigger.start);
  return {std::max(0, s - radius), std::min(doc.num_sentences() - 1, s + radius)};
}

int trigger_arg_distance(const Span& trigger, const Span& arg) {
  return std::max({0, trigger.start - arg.end, arg.start - trigger.end});
}

int sentence_distance(const Document& doc, const Span& trigger, const Span& arg, int radius) {
  const auto [first, last] = context_window(doc, trigger, radius);
  const int s = doc.sentence_of(arg.start);
  if (s < first || s > last) {
    throw std::out_of_range("argument " + to_string(arg) + " outside context window of trigger " +
                            to_string(trigger));
  }
  return s - doc.sentence_of(trigger.start);
}

namespace {

// Keeps sentences [first, last] and shifts every offset.
Document crop_sentences(const Document& doc, int first, int last) {
  const int begin = doc.sentence_starts[first];
  const int end = doc.sentence_bounds(last).second;
  auto inside = [&](const Span& s) { return s.start >= begin && s.end < end; };
  auto shift = [&](Span s) { return Span{s.start - begin, s.end - begin}; };
  Document out;
  out.doc_id = doc.doc_id;
  out.tokens.assign(doc.tokens.begin() + begin, doc.tokens.begin() + end);
  for (int s = first; s <= last; ++s) out.sentence_starts.push_back(doc.sentence_starts[s] - begin);
  std::set<std::string> kept;
  for (const auto& e : doc.events) {
    if (!inside(e.trigger)) continue;
    EventMention ev = e;
    ev.trigger = shift(e.trigger);
    out.events.push_back(ev);
    kept.insert(e.event_id);
  }
  if (doc.given_arguments) {
    std::vector<Span> given;
    for (const auto& s : *doc.given_arguments) {
      if (inside(s)) given.push_back(shift(s));
    }
    out.given_arguments = std::move(given);
  }
  for (const auto& l : doc.gold_links) {
    if (!kept.count(l.event_id) || !inside(l.argument)) continue;
    GoldLink link = l;
    link.argument = shift(l.argument);
    out.gold_links.push_back(link);
  }
  return out;
}

}  // namespace

Document truncate_document(const Document& doc, int max_tokens) {
  if (doc.size() <= max_tokens) return doc;
  int last = 0;
  while (last + 1 < doc.num_sentences() && doc.sentence_bounds(last + 1).second <= max_tokens) {
    ++last;
  }
  return crop_sentences(doc, 0, last);
}

std::vector<int> segment_starts(const Document& doc, int max_tokens) {
  std::vector<int> starts{0};
  for (int s = 1; s < doc.num_sentences(); ++s) {
    const int end = doc.sentence_bounds(s).second;
    if (end - starts.back() > max_tokens) starts.push_back(doc.sentence_starts[s]);
  }
  return starts;
}

std::vector<Document> parse_rams(std::istream& in, const Ontology& ontology) {
  static const std::regex kRoleLabel(R"(^evt\d+arg\d+(.+)$)");
  std::vector<Document> docs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(where + e.what());
    }
    for (const char* key : {"doc_key", "sentences", "evt_triggers", "gold_evt_links"}) {
      if (!j.contains(key)) throw FormatError(where + "missing RAMS key '" + key + "'");
    }
    try {
      Document doc;
      doc.doc_id = j["doc_key"].get<std::string>();
      for (const auto& sentence : j["sentences"]) {
        doc.sentence_starts.push_back(doc.size());
        for (const auto& tok : sentence) doc.tokens.push_back(tok.get<std::string>());
      }
      int n = 0;
      for (const auto& t : j["evt_triggers"]) {
        EventMention ev;
        ev.event_id = "e" + std::to_string(n++);
        ev.trigger = Span{t.at(0).get<int>(), t.at(1).get<int>()};
        const std::string raw_type = t.at(2).at(0).at(0).get<std::string>();
        auto type = ontology.canonical_type_name(raw_type);
        if (!type) throw ValidationError("unknown event type '" + raw_type + "'");
        ev.type = *type;
        doc.events.push_back(std::move(ev));
      }
      if (doc.events.empty()) throw ValidationError("example has no trigger");
      std::vector<Span> given;
      if (j.contains("ent_spans")) {
        for (const auto& s : j["ent_spans"]) {
          Span span{s.at(0).get<int>(), s.at(1).get<int>()};
          if (std::find(given.begin(), given.end(), span) == given.end()) given.push_back(span);
        }
      }
      for (const auto& l : j["gold_evt_links"]) {
        const Span trigger{l.at(0).at(0).get<int>(), l.at(0).at(1).get<int>()};
        const Span arg{l.at(1).at(0).get<int>(), l.at(1).at(1).get<int>()};
        const std::string label = l.at(2).get<std::string>();
        std::smatch m;
        const std::string role = std::regex_match(label, m, kRoleLabel) ? m[1].str() : label;
        if (!ontology.has_role(role)) throw ValidationError("unknown role '" + role + "'");
        auto ev = std::find_if(doc.events.begin(), doc.events.end(),
                               [&](const auto& e) { return e.trigger == trigger; });
        if (ev == doc.events.end()) {
          throw ValidationError("link trigger " + to_string(trigger) + " matches no event");
        }
        doc.gold_links.push_back({ev->event_id, role, arg});
        if (std::find(given.begin(), given.end(), arg) == given.end()) given.push_back(arg);
      }
      std::sort(given.begin(), given.end());
      doc.given_arguments = std::move(given);
      validate(doc, &ontology);
      const auto [first, last] = context_window(doc, doc.events.front().trigger);
      docs.push_back(crop_sentences(doc, first, last));
    } catch (const json::exception& e) {
      throw FormatError(where + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
  }
  return docs;
}

std::vector<Document> import_rams(const std::string& path, const Ontology& ontology) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return parse_rams(in, ontology);
}

EventTypeMap event_types(const std::vector<Document>& docs) {
  EventTypeMap out;
  for (const auto& doc : docs) {
    for (const auto& e : doc.events) {
      if (e.type) out[doc.doc_id][e.event_id] = *e.type;
    }
  }
  return out;
}

std::vector<LinkPrediction> gold_triples(const std::vector<Document>& docs) {
  std::vector<LinkPrediction> out;
  for (const auto& doc : docs) {
    for (const auto& l : doc.gold_links) {
      out.push_back({doc.doc_id, l.event_id, l.role, l.argument, 0.0});
    }
  }
  return out;
}

}  // namespace arglink
