#ifndef ARGLINK_DECODER_H_
#define ARGLINK_DECODER_H_

#include <string>
#include <vector>

#include "arglink/config.h"
#include "arglink/ontology.h"
#include "arglink/prediction.h"

namespace arglink {

// Raw link scores of one role's shortlisted candidates.
struct RoleScores {
  std::string role;
  std::vector<Span> spans;
  std::vector<double> scores;
};

// Everything a decoder needs for one event.
struct EventScoreTable {
  std::string doc_id;
  std::string event_id;
  std::vector<RoleScores> roles;
};

// Best of A_e ∪ {ε} per role. Span ties go to the earlier span; a span scoring
// exactly 0 loses to ε.
std::vector<LinkPrediction> decode_argmax(const EventScoreTable& table);

// Per role, accepts candidates by descending score while the score is
// positive, skipping any that overlap an already accepted span.
std::vector<LinkPrediction> decode_greedy(const EventScoreTable& table);

// Filters greedy output with gold event types: drops roles outside R_e and
// keeps the m_r highest-scoring triples per (event, role). Throws ConfigError
// when an event has no gold type.
std::vector<LinkPrediction> decode_type_constrained(const std::vector<LinkPrediction>& greedy,
                                                    const Ontology& ontology,
                                                    const EventTypeMap& gold_types);

std::vector<LinkPrediction> decode(Decoding strategy, const std::vector<EventScoreTable>& tables,
                                   const Ontology& ontology, const EventTypeMap& gold_types);

}  // namespace arglink

#endif  // ARGLINK_DECODER_H_
