#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "arglink/candidates.h"
#include "arglink/errors.h"
#include "arglink/synthetic.h"

namespace arglink {
namespace {

std::string serialize(const std::vector<Document>& docs) {
  std::ostringstream out;
  write_jsonl(out, docs);
  return out.str();
}

TEST(Synthetic, DeterministicInConfig) {
  SynthConfig c;
  EXPECT_EQ(serialize(generate_synthetic(c)), serialize(generate_synthetic(c)));
  SynthConfig other = c;
  other.seed = 18;
  EXPECT_NE(serialize(generate_synthetic(c)), serialize(generate_synthetic(other)));
}

TEST(Synthetic, CountsFollowConfig) {
  SynthConfig c;
  c.n_docs = 50;
  c.roles_per_type = 2;
  const auto docs = generate_synthetic(c);
  ASSERT_EQ(docs.size(), 50u);
  std::size_t links = 0;
  for (const auto& d : docs) links += d.gold_links.size();
  EXPECT_EQ(links, 100u);
}

TEST(Synthetic, DocumentsValidateAgainstTheirOntology) {
  SynthConfig c;
  c.n_docs = 200;
  const Ontology o = synthetic_ontology(c);
  EXPECT_EQ(o.types().size(), static_cast<std::size_t>(c.n_event_types));
  std::ostringstream out;
  write_jsonl(out, generate_synthetic(c));
  std::istringstream in(out.str());
  const auto docs = parse_jsonl(in, &o);
  for (const auto& d : docs) {
    ASSERT_EQ(d.events.size(), 1u);
    const auto& type = o.type(*d.events[0].type);
    for (const auto& l : d.gold_links) {
      EXPECT_NE(type.find_role(l.role), nullptr);
      EXPECT_NO_THROW(sentence_distance(d, d.events[0].trigger, l.argument));
      EXPECT_TRUE(std::binary_search(d.given_arguments->begin(), d.given_arguments->end(),
                                     l.argument));
    }
  }
}

TEST(Synthetic, TriggerWordIdentifiesType) {
  SynthConfig c;
  c.n_docs = 300;
  std::map<std::string, std::set<std::string>> types_per_word;
  for (const auto& d : generate_synthetic(c)) {
    const auto& e = d.events[0];
    types_per_word[d.tokens[e.trigger.start]].insert(*e.type);
  }
  EXPECT_EQ(types_per_word.size(), static_cast<std::size_t>(c.n_event_types));
  for (const auto& [w, types] : types_per_word) EXPECT_EQ(types.size(), 1u) << w;
}

TEST(Synthetic, FillersAreMarkerEntityBigrams) {
  SynthConfig c;
  c.n_docs = 100;
  std::map<std::string, std::set<std::string>> markers_per_role;
  for (const auto& d : generate_synthetic(c)) {
    for (const auto& l : d.gold_links) {
      ASSERT_EQ(l.argument.width(), 2);
      markers_per_role[l.role].insert(d.tokens[l.argument.start]);
    }
  }
  std::set<std::string> all;
  for (const auto& [role, markers] : markers_per_role) {
    EXPECT_EQ(markers.size(), 1u) << role;
    all.insert(*markers.begin());
  }
  EXPECT_EQ(all.size(), markers_per_role.size());
}

TEST(Synthetic, OffsetHistogram) {
  SynthConfig c;
  c.n_docs = 10000;
  std::map<int, int> hist;
  for (const auto& d : generate_synthetic(c)) {
    for (const auto& l : d.gold_links) ++hist[sentence_distance(d, d.events[0].trigger, l.argument)];
  }
  int total = 0;
  for (const auto& [k, v] : hist) total += v;
  for (int o = -2; o <= 2; ++o) EXPECT_GT(hist[o], 0) << o;
  for (int o : {-2, -1, 1, 2}) EXPECT_GT(hist[0], hist[o]);
  EXPECT_GT(hist[-1], hist[-2]);
  EXPECT_GT(hist[1], hist[2]);
  EXPECT_NEAR(static_cast<double>(hist[0]) / total, 0.82, 0.04);
}

TEST(Synthetic, WidestGoldSpanIsEnumerated) {
  SynthConfig c;
  c.n_docs = 50;
  for (const auto& d : generate_synthetic(c)) {
    const auto spans = enumerate_spans(d, 2);
    for (const auto& l : d.gold_links) {
      EXPECT_TRUE(std::binary_search(spans.begin(), spans.end(), l.argument));
    }
  }
}

TEST(Synthetic, InvalidConfigs) {
  SynthConfig c;
  c.min_offset = -3;
  EXPECT_THROW(generate_synthetic(c), ConfigError);
  c = {};
  c.n_event_types = 0;
  EXPECT_THROW(generate_synthetic(c), ConfigError);
  c = {};
  c.min_sentences = 1;
  c.max_sentences = 1;
  c.min_offset = 1;
  c.max_offset = 2;
  EXPECT_THROW(generate_synthetic(c), ConfigError);
}

TEST(Synthetic, ConfigText) {
  const auto c = parse_synth_config("n_docs = 7  # docs\nseed 99\nsame_sentence_rate=0.5\n");
  EXPECT_EQ(c.n_docs, 7);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_DOUBLE_EQ(c.same_sentence_rate, 0.5);
  EXPECT_THROW(parse_synth_config("bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_synth_config("n_docs = many\n"), ConfigError);
}

}  // namespace
}  // namespace arglink
