#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "arglink/corpus.h"
#include "arglink/errors.h"
#include "arglink/synthetic.h"
#include "test_util.h"

namespace arglink {
namespace {

using testing::make_document;

Ontology tiny_ontology() {
  return Ontology({{"Conflict.Attack", {{"attacker", 1}, {"target", 1}, {"place", 1}}},
                   {"Life.Die", {{"victim", 1}, {"place", 1}}}});
}

std::vector<Document> parse(const std::string& text, const Ontology* o = nullptr) {
  std::istringstream in(text);
  return parse_jsonl(in, o);
}

const char* kLine =
    R"({"doc_id":"d1","tokens":["A","struck","B",".","Then","C","left"],)"
    R"("sentence_starts":[0,4],"events":[{"event_id":"e1","trigger":[1,1],"type":"Conflict.Attack"}],)"
    R"("given_arguments":null,"gold_links":[{"event_id":"e1","role":"attacker","span":[0,0]}]})";

TEST(Jsonl, ParsesOneDocument) {
  const Ontology o = tiny_ontology();
  const auto docs = parse(std::string(kLine) + "\n", &o);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].gold_links.size(), 1u);
  EXPECT_EQ(docs[0].events[0].type.value(), "Conflict.Attack");
  EXPECT_FALSE(docs[0].given_arguments.has_value());
  EXPECT_EQ(docs[0].num_sentences(), 2);
}

TEST(Jsonl, EmptyInputGivesNoDocuments) { EXPECT_TRUE(parse("").empty()); }

TEST(Jsonl, ErrorsNameTheLine) {
  std::string bad = kLine;
  bad.replace(bad.find("[0,0]"), 5, "[2,1]");
  try {
    parse(std::string(kLine) + "\n" + bad + "\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse("{not json}\n"), FormatError);
}

TEST(Jsonl, RejectsBrokenInvariants) {
  const Ontology o = tiny_ontology();
  auto with = [](const std::string& from, const std::string& to) {
    std::string s = kLine;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  EXPECT_THROW(parse(with("[0,0]", "[2,5]")), ValidationError);        // crosses sentences
  EXPECT_THROW(parse(with("[0,0]", "[6,7]")), ValidationError);        // out of bounds
  EXPECT_THROW(parse(with("[0,4]", "[1,4]")), ValidationError);        // starts not at 0
  EXPECT_THROW(parse(with("\"attacker\"", "\"pilot\""), &o), ValidationError);
  EXPECT_NO_THROW(parse(with("\"attacker\"", "\"pilot\"")));
}

TEST(Jsonl, RoundTripIsFieldForField) {
  SynthConfig c;
  c.n_docs = 5;
  auto docs = generate_synthetic(c);
  docs[1].given_arguments.reset();
  docs[2].events[0].type.reset();
  std::ostringstream out;
  write_jsonl(out, docs);
  EXPECT_EQ(parse(out.str()), docs);
}

TEST(Jsonl, KeyOrderAndLineEndings) {
  const auto docs = parse(kLine);
  const std::string line = to_json_line(docs[0]);
  EXPECT_EQ(line.find("{\"doc_id\""), 0u);
  EXPECT_LT(line.find("\"tokens\""), line.find("\"sentence_starts\""));
  EXPECT_LT(line.find("\"events\""), line.find("\"given_arguments\""));
  EXPECT_LT(line.find("\"given_arguments\""), line.find("\"gold_links\""));
  std::ostringstream out;
  write_jsonl(out, docs);
  EXPECT_EQ(out.str().back(), '\n');
  EXPECT_EQ(out.str().find('\r'), std::string::npos);
}

TEST(ContextWindow, ClipsToDocument) {
  auto doc = make_document("d", {{"a"}, {"b"}, {"c"}, {"d"}, {"e"}, {"f"}, {"g"}});
  EXPECT_EQ(context_window(doc, {3, 3}), std::make_pair(1, 5));
  EXPECT_EQ(context_window(doc, {0, 0}), std::make_pair(0, 2));
  EXPECT_EQ(context_window(doc, {6, 6}), std::make_pair(4, 6));
  auto one = make_document("d", {{"a", "b"}});
  EXPECT_EQ(context_window(one, {1, 1}), std::make_pair(0, 0));
}

TEST(TriggerArgDistance, Formula) {
  EXPECT_EQ(trigger_arg_distance({5, 6}, {10, 12}), 4);
  EXPECT_EQ(trigger_arg_distance({5, 6}, {5, 5}), 0);
  EXPECT_EQ(trigger_arg_distance({5, 6}, {0, 2}), 3);
  // Oracle: token gap between the closest ends, never negative.
  for (int es = 0; es < 8; ++es) {
    for (int ee = es; ee < 8; ++ee) {
      for (int as = 0; as < 8; ++as) {
        for (int ae = as; ae < 8; ++ae) {
          const int gap = ae < es ? es - ae : (as > ee ? as - ee : 0);
          ASSERT_EQ(trigger_arg_distance({es, ee}, {as, ae}), gap);
        }
      }
    }
  }
}

TEST(SentenceDistance, SignedWithinWindow) {
  auto doc = make_document("d", {{"a"}, {"b"}, {"c", "x"}, {"d"}, {"e"}, {"f"}});
  const Span trigger{2, 2};
  EXPECT_EQ(sentence_distance(doc, trigger, {1, 1}), -1);
  EXPECT_EQ(sentence_distance(doc, trigger, {3, 3}), 0);
  EXPECT_EQ(sentence_distance(doc, trigger, {5, 5}), 2);
  EXPECT_EQ(sentence_distance(doc, trigger, {0, 0}), -2);
  EXPECT_THROW(sentence_distance(doc, trigger, {6, 6}), std::out_of_range);
}

TEST(Truncation, KeepsSentencePrefixAndDropsOutsideAnnotations) {
  auto doc = make_document("d", {{"a", "b", "c"}, {"d", "e"}, {"f", "g", "h"}});
  doc.events = {{"e1", {1, 1}, std::nullopt}, {"e2", {6, 6}, std::nullopt}};
  doc.gold_links = {{"e1", "r", {3, 4}}, {"e1", "r", {5, 5}}, {"e2", "r", {0, 0}}};
  doc.given_arguments = std::vector<Span>{{0, 0}, {3, 4}, {7, 7}};
  const auto t = truncate_document(doc, 6);
  EXPECT_EQ(t.size(), 5);
  EXPECT_EQ(t.events.size(), 1u);
  ASSERT_EQ(t.gold_links.size(), 1u);
  EXPECT_EQ(t.gold_links[0].argument, (Span{3, 4}));
  EXPECT_EQ(t.given_arguments->size(), 2u);
  EXPECT_NO_THROW(validate(t));
  EXPECT_EQ(truncate_document(doc, 1000), doc);
  EXPECT_EQ(truncate_document(doc, 1).size(), 3);  // one sentence at least
}

TEST(Segments, SplitAtSentenceBoundaries) {
  auto doc = make_document("d", {{"a", "b", "c"}, {"d", "e"}, {"f", "g", "h", "i", "j"}, {"k"}});
  EXPECT_EQ(segment_starts(doc, 5), (std::vector<int>{0, 5, 10}));
  EXPECT_EQ(segment_starts(doc, 4), (std::vector<int>{0, 3, 5, 10}));
  EXPECT_EQ(segment_starts(doc, 100), (std::vector<int>{0}));
}

Ontology rams_ontology() {
  return Ontology({{"conflict.attack.airstrikemissilestrike",
                    {{"attacker", 1}, {"target", 1}, {"instrument", 1}, {"place", 1}}},
                   {"life.die.deathcausedbyviolentevents", {{"victim", 1}, {"place", 1}}}});
}

std::string rams_line(const std::string& extra = "") {
  return R"({"doc_key":"nw_1","sentences":[["s0"],["s1"],["Jets","bombed","the","town","."],["s3"],["s4","x"],["s5"],["s6"]],)"
         R"("evt_triggers":[[3,3,[["conflict.attack.airstrikemissilestrike",1.0]]]],)"
         R"("ent_spans":[[2,2,[["evt089arg01attacker",1.0]]],[5,5,[["evt089arg02target",1.0]]],[9,9,[]]],)"
         R"("gold_evt_links":[[[3,3],[2,2],"evt089arg01attacker"],[[3,3],[5,5],"evt089arg02target"],[[3,3],[8,9],"evt089arg04place"]])" +
         extra + "}\n";
}

TEST(RamsImport, MapsLabelsAndCropsWindow) {
  std::istringstream in(rams_line());
  const auto docs = parse_rams(in, rams_ontology());
  ASSERT_EQ(docs.size(), 1u);
  const Document& d = docs[0];
  EXPECT_EQ(d.doc_id, "nw_1");
  EXPECT_LE(d.num_sentences(), 5);
  EXPECT_EQ(d.num_sentences(), 5);  // sentences 0..4 around the trigger in sentence 2
  ASSERT_EQ(d.events.size(), 1u);
  EXPECT_EQ(d.events[0].type.value(), "conflict.attack.airstrikemissilestrike");
  EXPECT_EQ(d.tokens[d.events[0].trigger.start], "bombed");
  ASSERT_EQ(d.gold_links.size(), 3u);
  EXPECT_EQ(d.gold_links[0].role, "attacker");
  EXPECT_EQ(d.gold_links[2].role, "place");
  EXPECT_EQ(d.tokens[d.gold_links[2].argument.start], "s4");
  ASSERT_TRUE(d.given_arguments.has_value());
  EXPECT_EQ(d.given_arguments->size(), 4u);
  for (const auto& l : d.gold_links) {
    EXPECT_NO_THROW(sentence_distance(d, d.events[0].trigger, l.argument));
  }
}

TEST(RamsImport, MissingKeyIsNamed) {
  std::istringstream in(R"({"doc_key":"x","sentences":[["a"]],"evt_triggers":[]})");
  try {
    parse_rams(in, rams_ontology());
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("gold_evt_links"), std::string::npos);
  }
}

TEST(RamsImport, UnknownRoleIsRejected) {
  std::string line = rams_line();
  line.replace(line.find("evt089arg04place"), 16, "evt089arg04pilot");
  std::istringstream in(line);
  EXPECT_THROW(parse_rams(in, rams_ontology()), ValidationError);
}

// Split counts of the public release; runs only when the data is provided.
TEST(RamsImport, ReleaseSplitCounts) {
  const char* dir = std::getenv("ARGLINK_RAMS_DIR");
  const char* onto = std::getenv("ARGLINK_RAMS_ONTOLOGY");
  if (!dir || !onto) GTEST_SKIP() << "set ARGLINK_RAMS_DIR and ARGLINK_RAMS_ONTOLOGY";
  const Ontology o = load_ontology(onto);
  auto count = [&](const std::string& split, std::size_t& examples, std::size_t& docs,
                   std::size_t& args) {
    const auto d = import_rams(std::string(dir) + "/" + split + ".jsonlines", o);
    std::set<std::string> ids;
    examples = d.size();
    args = 0;
    for (const auto& x : d) {
      ids.insert(x.doc_id);
      args += x.gold_links.size();
    }
    docs = ids.size();
  };
  std::size_t ex, docs, args;
  count("train", ex, docs, args);
  EXPECT_EQ(ex, 7329u);
  EXPECT_EQ(docs, 3194u);
  count("dev", ex, docs, args);
  EXPECT_EQ(ex, 924u);
  EXPECT_EQ(args, 2188u);
}

}  // namespace
}  // namespace arglink
