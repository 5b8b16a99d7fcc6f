#ifndef ARGLINK_PREDICTION_H_
#define ARGLINK_PREDICTION_H_

#include <string>
#include <vector>

#include "arglink/span.h"

namespace arglink {

// One emitted (event, role, argument) triple. The ε outcome is never
// materialized: a role without a triple is linked to nothing.
struct LinkPrediction {
  std::string doc_id;
  std::string event_id;
  std::string role;
  Span span;
  double score = 0.0;  // raw link score

  bool operator==(const LinkPrediction&) const = default;
};

// Predictions JSONL: {"doc_id", "event_id", "role", "span": [s,e], "score"}.
std::vector<LinkPrediction> load_predictions(const std::string& path);
void write_predictions(const std::string& path, const std::vector<LinkPrediction>& preds);

}  // namespace arglink

#endif  // ARGLINK_PREDICTION_H_
