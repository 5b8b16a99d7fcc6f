#ifndef ARGLINK_SYNTHETIC_H_
#define ARGLINK_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "arglink/corpus.h"
#include "arglink/ontology.h"

namespace arglink {

// Parameters of the synthetic linking corpus. Every document carries one
// trigger whose word identifies its event type; each role of that type is
// filled by a `marker entity` bigram placed at a sampled sentence offset.
struct SynthConfig {
  int n_docs = 50;
  int n_event_types = 5;
  int roles_per_type = 2;
  int min_offset = -2;
  int max_offset = 2;
  int vocab_size = 200;
  std::uint64_t seed = 17;

  int min_sentences = 5;
  int max_sentences = 7;
  int min_sentence_length = 5;
  int max_sentence_length = 9;
  double same_sentence_rate = 0.82;
  // Unmarked entity bigrams added to given_arguments.
  int distractors_per_doc = 2;
  // Chance of one extra bigram marked with a role the event type lacks.
  double foreign_role_rate = 0.3;
};

void check_config(const SynthConfig& config);

// Same `key = value` text format as the model config, keyed by field name.
void set_option(SynthConfig& config, const std::string& key, const std::string& value);
SynthConfig parse_synth_config(const std::string& text, SynthConfig base = {});

// Ontology shared by every corpus generated from `config.seed`.
Ontology synthetic_ontology(const SynthConfig& config);

// Pure function of `config`.
std::vector<Document> generate_synthetic(const SynthConfig& config);

}  // namespace arglink

#endif  // ARGLINK_SYNTHETIC_H_
