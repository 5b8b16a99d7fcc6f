#ifndef ARGLINK_EVALUATION_H_
#define ARGLINK_EVALUATION_H_

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "arglink/corpus.h"
#include "arglink/nn/graph.h"
#include "arglink/prediction.h"

namespace arglink {

// Precision, recall and F1 in percent.
struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  std::size_t correct = 0;
};

// P = correct / predicted (0 without predictions), R = correct / gold, and
// F1 = 2PR / (P + R) (0 when P + R = 0).
Prf make_prf(std::size_t correct, std::size_t predicted, std::size_t gold);

// Exact-match scoring of (doc, event, role, span) triples. Duplicate triples
// are counted once; each duplicate adds a message to `warnings`.
Prf score_triples(const std::vector<LinkPrediction>& predictions,
                  const std::vector<LinkPrediction>& gold,
                  std::vector<std::string>* warnings = nullptr);

struct DistanceRow {
  int distance = 0;  // argument sentence minus trigger sentence
  Prf score;
};

struct DistanceBreakdown {
  std::vector<DistanceRow> rows;  // -radius .. +radius
  Prf total;
};

// Per sentence-distance scores. Triples are located through `docs`; a triple
// outside its event's context window raises ValidationError.
DistanceBreakdown distance_breakdown(const std::vector<LinkPrediction>& predictions,
                                     const std::vector<LinkPrediction>& gold,
                                     const std::vector<Document>& docs,
                                     int radius = kWindowRadius);

inline const std::string kMissed = "<missed>";
inline const std::string kSpurious = "<spurious>";

// Gold role x predicted role counts, aligned per (doc, event, span): exact
// role matches are removed first, then leftover gold and predicted roles are
// paired in sorted order. Unpaired gold roles go to the kMissed column and
// unpaired predicted roles to the kSpurious row. Duplicate triples count once.
struct ConfusionMatrix {
  std::map<std::string, std::map<std::string, double>> counts;

  double matched() const;
  double errors() const;  // gold role paired with a different predicted role
  double missed() const;
  double spurious() const;
  // Each row divided by its total.
  std::map<std::string, std::map<std::string, double>> normalized() const;
};

ConfusionMatrix confusion_matrix(const std::vector<LinkPrediction>& predictions,
                                 const std::vector<LinkPrediction>& gold);

struct SimilarityMatrix {
  std::vector<std::string> roles;
  nn::Matrix cosine;               // NaN in rows/columns of undefined roles
  std::vector<bool> undefined;     // zero-norm embedding
};

SimilarityMatrix role_similarity(const nn::Matrix& embeddings,
                                 const std::vector<std::string>& roles);

enum class MatchMode { kStrict, kApproximate };
MatchMode parse_match_mode(const std::string& name);

// A slot value as a string, e.g. the text of an argument.
struct SlotFill {
  std::string doc_id;
  std::string slot;
  std::string value;
};

// Per-slot scores. Within each (doc, slot), predicted and gold values are
// matched one-to-one: strict requires equal strings, approximate accepts
// either string containing the other.
std::map<std::string, Prf> string_match_score(const std::vector<SlotFill>& predictions,
                                              const std::vector<SlotFill>& gold, MatchMode mode);

// Report and CSV writers.
std::string report_json(const Prf& overall, const DistanceBreakdown* breakdown,
                        const std::vector<std::string>& warnings);
// Row-normalized; always lists the kMissed column and the kSpurious row.
void write_confusion_csv(std::ostream& out, const ConfusionMatrix& matrix);
void write_similarity_csv(std::ostream& out, const SimilarityMatrix& matrix);

}  // namespace arglink

#endif  // ARGLINK_EVALUATION_H_
