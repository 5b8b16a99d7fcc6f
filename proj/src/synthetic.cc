#include "arglink/synthetic.h"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <numeric>
#include <set>
#include <string>

#include "arglink/errors.h"
#include "arglink/nn/graph.h"

namespace arglink {
namespace {

constexpr const char* kRoleNames[] = {
    "attacker", "target",   "instrument", "place",     "victim",    "recipient",
    "giver",    "origin",   "destination", "participant", "communicator", "artifact",
    "killer",   "beneficiary", "vehicle",  "passenger", "defendant", "prosecutor"};

// Word inventory and type/role assignment derived from the seed.
struct Inventory {
  std::vector<std::string> fillers;
  std::vector<std::string> entities;
  std::vector<std::string> triggers;  // one per event type
  std::vector<std::string> roles;     // global role pool
  std::vector<std::string> markers;   // one per pooled role
  std::vector<std::vector<int>> type_roles;
};

std::string pseudo_word(nn::Rng& rng) {
  static const std::string kConsonants = "bcdfghjklmnprstvwz";
  static const std::string kVowels = "aeiou";
  const int syllables = 1 + static_cast<int>(rng.below(3));
  std::string w;
  for (int i = 0; i < syllables; ++i) {
    w += kConsonants[rng.below(kConsonants.size())];
    w += kVowels[rng.below(kVowels.size())];
  }
  if (rng.uniform() < 0.5) w += kConsonants[rng.below(kConsonants.size())];
  return w;
}

Inventory build_inventory(const SynthConfig& config) {
  nn::Rng rng(config.seed * 0x9E3779B97F4A7C15ULL + 1);
  std::set<std::string> used;
  auto fresh = [&](const std::string& prefix) {
    for (;;) {
      std::string w = prefix + pseudo_word(rng);
      if (used.insert(w).second) return w;
    }
  };
  Inventory inv;
  for (int i = 0; i < config.vocab_size; ++i) inv.fillers.push_back(fresh(""));
  const int n_entities = std::max(10, config.vocab_size / 5);
  for (int i = 0; i < n_entities; ++i) {
    std::string e = fresh("");
    e[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(e[0])));
    inv.entities.push_back(e);
  }
  for (int t = 0; t < config.n_event_types; ++t) inv.triggers.push_back(fresh("") + "ing");

  const int pool = std::max(config.roles_per_type,
                            (config.n_event_types * config.roles_per_type * 3 + 4) / 5);
  for (int r = 0; r < pool; ++r) {
    constexpr int kNamed = sizeof(kRoleNames) / sizeof(kRoleNames[0]);
    inv.roles.push_back(r < kNamed ? kRoleNames[r] : "role" + std::to_string(r));
    inv.markers.push_back(fresh("") + "o");
  }
  for (int t = 0; t < config.n_event_types; ++t) {
    std::vector<int> all(pool);
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < config.roles_per_type; ++i) {
      std::swap(all[i], all[i + rng.below(pool - i)]);
    }
    std::vector<int> chosen(all.begin(), all.begin() + config.roles_per_type);
    std::sort(chosen.begin(), chosen.end());
    inv.type_roles.push_back(chosen);
  }
  return inv;
}

std::string type_name(int t) { return "Synthetic.Event" + std::to_string(t); }

int sample_offset(const SynthConfig& config, nn::Rng& rng) {
  if (config.min_offset == config.max_offset) return config.min_offset;
  const bool zero_allowed = config.min_offset <= 0 && config.max_offset >= 0;
  if (zero_allowed && rng.uniform() < config.same_sentence_rate) return 0;
  std::vector<int> others;
  for (int o = config.min_offset; o <= config.max_offset; ++o) {
    if (o != 0) others.push_back(o);
  }
  // Nearer sentences are twice as likely as the outer ones.
  std::vector<double> weights;
  for (int o : others) weights.push_back(std::abs(o) == 1 ? 2.0 : 1.0);
  double u = rng.uniform() * std::accumulate(weights.begin(), weights.end(), 0.0);
  for (std::size_t i = 0; i < others.size(); ++i) {
    if (u < weights[i]) return others[i];
    u -= weights[i];
  }
  return others.back();
}

// A unit is either a single filler word or an inserted item (trigger or
// bigram) whose span is recorded after flattening.
struct Unit {
  std::vector<std::string> words;
  int item = -1;
};

}  // namespace

namespace {

template <typename T>
T parse_value(const std::string& key, const std::string& value) {
  T out{};
  const auto r = std::from_chars(value.data(), value.data() + value.size(), out);
  if (r.ec != std::errc() || r.ptr != value.data() + value.size()) {
    throw ConfigError("synthetic config: bad value '" + value + "' for " + key);
  }
  return out;
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

void set_option(SynthConfig& c, const std::string& key, const std::string& value) {
  if (key == "n_docs") c.n_docs = parse_value<int>(key, value);
  else if (key == "n_event_types") c.n_event_types = parse_value<int>(key, value);
  else if (key == "roles_per_type") c.roles_per_type = parse_value<int>(key, value);
  else if (key == "min_offset") c.min_offset = parse_value<int>(key, value);
  else if (key == "max_offset") c.max_offset = parse_value<int>(key, value);
  else if (key == "vocab_size") c.vocab_size = parse_value<int>(key, value);
  else if (key == "seed") c.seed = parse_value<std::uint64_t>(key, value);
  else if (key == "min_sentences") c.min_sentences = parse_value<int>(key, value);
  else if (key == "max_sentences") c.max_sentences = parse_value<int>(key, value);
  else if (key == "min_sentence_length") c.min_sentence_length = parse_value<int>(key, value);
  else if (key == "max_sentence_length") c.max_sentence_length = parse_value<int>(key, value);
  else if (key == "same_sentence_rate") c.same_sentence_rate = parse_value<double>(key, value);
  else if (key == "distractors_per_doc") c.distractors_per_doc = parse_value<int>(key, value);
  else if (key == "foreign_role_rate") c.foreign_role_rate = parse_value<double>(key, value);
  else throw ConfigError("synthetic config: unknown key '" + key + "'");
}

SynthConfig parse_synth_config(const std::string& text, SynthConfig base) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = strip(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    auto sep = line.find('=');
    if (sep == std::string::npos) sep = line.find_first_of(" \t");
    if (sep == std::string::npos) {
      throw ConfigError("synthetic config line " + std::to_string(number) + ": expected key = value");
    }
    set_option(base, strip(line.substr(0, sep)), strip(line.substr(sep + 1)));
  }
  return base;
}

void check_config(const SynthConfig& c) {
  if (c.n_docs < 0 || c.n_event_types < 1 || c.roles_per_type < 1 || c.vocab_size < 1) {
    throw ConfigError("synthetic config: counts must be positive");
  }
  if (c.min_offset > c.max_offset || c.min_offset < -kWindowRadius ||
      c.max_offset > kWindowRadius) {
    throw ConfigError("synthetic config: offset range must lie within the context window");
  }
  if (c.min_sentences < 1 || c.max_sentences < c.min_sentences || c.min_sentence_length < 1 ||
      c.max_sentence_length < c.min_sentence_length) {
    throw ConfigError("synthetic config: bad sentence shape");
  }
}

Ontology synthetic_ontology(const SynthConfig& config) {
  check_config(config);
  const Inventory inv = build_inventory(config);
  std::vector<EventType> types;
  for (int t = 0; t < config.n_event_types; ++t) {
    EventType et;
    et.name = type_name(t);
    for (int r : inv.type_roles[t]) et.roles.push_back({inv.roles[r], 1});
    types.push_back(std::move(et));
  }
  return Ontology(std::move(types));
}

std::vector<Document> generate_synthetic(const SynthConfig& config) {
  check_config(config);
  const Inventory inv = build_inventory(config);
  nn::Rng rng(config.seed);
  std::vector<Document> docs;
  for (int d = 0; d < config.n_docs; ++d) {
    const int type = static_cast<int>(rng.below(config.n_event_types));
    const auto& roles = inv.type_roles[type];
    const int n_sent = config.min_sentences +
                       static_cast<int>(rng.below(config.max_sentences - config.min_sentences + 1));
    const int trig_sent = static_cast<int>(rng.below(n_sent));

    // Items: 0 = trigger, then role fillers, then distractors.
    struct Item {
      std::vector<std::string> words;
      int sentence;
      int role = -1;  // index into inv.roles, -1 for non-fillers
    };
    std::vector<Item> items;
    items.push_back({{inv.triggers[type]}, trig_sent});
    for (int r : roles) {
      int sentence = -1;
      for (int attempt = 0; attempt < 100 && sentence < 0; ++attempt) {
        const int s = trig_sent + sample_offset(config, rng);
        if (s >= 0 && s < n_sent) sentence = s;
      }
      if (sentence < 0) throw ConfigError("synthetic: cannot place argument within document");
      items.push_back({{inv.markers[r], inv.entities[rng.below(inv.entities.size())]}, sentence, r});
    }
    const int lo = std::max(0, trig_sent - kWindowRadius);
    const int hi = std::min(n_sent - 1, trig_sent + kWindowRadius);
    auto window_sentence = [&] { return lo + static_cast<int>(rng.below(hi - lo + 1)); };
    for (int i = 0; i < config.distractors_per_doc; ++i) {
      items.push_back({{inv.fillers[rng.below(inv.fillers.size())],
                        inv.entities[rng.below(inv.entities.size())]},
                       window_sentence()});
    }
    if (rng.uniform() < config.foreign_role_rate) {
      std::vector<int> foreign;
      for (int r = 0; r < static_cast<int>(inv.roles.size()); ++r) {
        if (std::find(roles.begin(), roles.end(), r) == roles.end()) foreign.push_back(r);
      }
      if (!foreign.empty()) {
        const int r = foreign[rng.below(foreign.size())];
        items.push_back({{inv.markers[r], inv.entities[rng.below(inv.entities.size())]},
                         window_sentence()});
      }
    }

    Document doc;
    doc.doc_id = "synth-" + std::to_string(config.seed) + "-" + std::to_string(d);
    std::vector<Span> item_spans(items.size());
    for (int s = 0; s < n_sent; ++s) {
      std::vector<Unit> units;
      const int len = config.min_sentence_length +
                      static_cast<int>(rng.below(config.max_sentence_length -
                                                 config.min_sentence_length + 1));
      for (int i = 0; i < len; ++i) units.push_back({{inv.fillers[rng.below(inv.fillers.size())]}});
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].sentence != s) continue;
        const auto pos = static_cast<std::ptrdiff_t>(rng.below(units.size() + 1));
        units.insert(units.begin() + pos, Unit{items[i].words, static_cast<int>(i)});
      }
      doc.sentence_starts.push_back(doc.size());
      for (const Unit& u : units) {
        const int start = doc.size();
        doc.tokens.insert(doc.tokens.end(), u.words.begin(), u.words.end());
        if (u.item >= 0) item_spans[u.item] = Span{start, doc.size() - 1};
      }
    }
    doc.events.push_back({"e0", item_spans[0], type_name(type)});
    std::vector<Span> given;
    for (std::size_t i = 1; i < items.size(); ++i) {
      given.push_back(item_spans[i]);
      if (items[i].role >= 0) doc.gold_links.push_back({"e0", inv.roles[items[i].role], item_spans[i]});
    }
    std::sort(given.begin(), given.end());
    doc.given_arguments = std::move(given);
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace arglink
