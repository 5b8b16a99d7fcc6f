#ifndef ARGLINK_CORPUS_H_
#define ARGLINK_CORPUS_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arglink/ontology.h"
#include "arglink/span.h"

namespace arglink {

struct EventMention {
  std::string event_id;
  Span trigger;
  std::optional<std::string> type;  // gold event type, when known

  bool operator==(const EventMention&) const = default;
};

struct GoldLink {
  std::string event_id;
  std::string role;
  Span argument;

  bool operator==(const GoldLink&) const = default;
};

struct Document {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<int> sentence_starts;  // strictly increasing, begins at 0
  std::vector<EventMention> events;
  // Candidate argument spans supplied with the data (gold or distractors).
  // When present, span enumeration and unary pruning are skipped.
  std::optional<std::vector<Span>> given_arguments;
  std::vector<GoldLink> gold_links;

  int size() const { return static_cast<int>(tokens.size()); }
  int num_sentences() const { return static_cast<int>(sentence_starts.size()); }
  // Sentence index containing `token`.
  int sentence_of(int token) const;
  // [first, last) token range of sentence `s`.
  std::pair<int, int> sentence_bounds(int s) const;
  const EventMention& event(const std::string& event_id) const;

  bool operator==(const Document&) const = default;
};

// Throws ValidationError describing the first broken invariant. When
// `ontology` is given, roles and event types must be declared in it.
void validate(const Document& doc, const Ontology* ontology = nullptr);

// Canonical JSONL, one document per line. Errors name the 1-based line.
std::vector<Document> load_jsonl(const std::string& path, const Ontology* ontology = nullptr);
std::vector<Document> parse_jsonl(std::istream& in, const Ontology* ontology = nullptr);
void write_jsonl(const std::string& path, const std::vector<Document>& docs);
void write_jsonl(std::ostream& out, const std::vector<Document>& docs);
std::string to_json_line(const Document& doc);

// Reads a split file from the public RAMS release (one example per line with
// `doc_key`, `sentences`, `evt_triggers`, `ent_spans`, `gold_evt_links`).
// Role labels such as `evt089arg02victim` become `victim`; event types are
// matched to the ontology case-insensitively. Each example is cropped to the
// 5-sentence window around its trigger.
std::vector<Document> import_rams(const std::string& path, const Ontology& ontology);
std::vector<Document> parse_rams(std::istream& in, const Ontology& ontology);

inline constexpr int kWindowRadius = 2;

// Sentence indices [s - 2, s + 2] clipped to the document, where s is the
// sentence holding the trigger.
std::pair<int, int> context_window(const Document& doc, const Span& trigger,
                                   int radius = kWindowRadius);

// max(e_start - a_end, a_start - e_end), clamped at 0 for overlapping spans.
int trigger_arg_distance(const Span& trigger, const Span& arg);

// Signed sentence offset of `arg` relative to `trigger`. Throws
// std::out_of_range when `arg` lies outside the trigger's context window.
int sentence_distance(const Document& doc, const Span& trigger, const Span& arg,
                      int radius = kWindowRadius);

// Keeps the longest sentence prefix with at most `max_tokens` tokens (at least
// one sentence) and drops events, links and candidates outside it.
Document truncate_document(const Document& doc, int max_tokens);

// Splits the document at sentence boundaries into consecutive segments of at
// most `max_tokens` tokens (a longer single sentence forms its own segment).
// Returns the token offset at which each segment starts.
std::vector<int> segment_starts(const Document& doc, int max_tokens);

// doc_id -> event_id -> gold type, for events that carry one.
EventTypeMap event_types(const std::vector<Document>& docs);

// Gold links as scored triples (score 0).
std::vector<LinkPrediction> gold_triples(const std::vector<Document>& docs);

}  // namespace arglink

#endif  // ARGLINK_CORPUS_H_
