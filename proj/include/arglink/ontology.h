#ifndef ARGLINK_ONTOLOGY_H_
#define ARGLINK_ONTOLOGY_H_

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arglink/prediction.h"

namespace arglink {

struct RoleSlot {
  std::string name;
  int multiplicity = 1;  // m_r

  bool operator==(const RoleSlot&) const = default;
};

struct EventType {
  std::string name;  // Type[.Subtype[.Subsubtype]]
  std::vector<RoleSlot> roles;

  const RoleSlot* find_role(const std::string& role) const;
};

struct Violation {
  enum class Kind { kRoleNotPermitted, kTooManyArguments };
  Kind kind;
  std::string doc_id;
  std::string event_id;
  std::string role;
  int count = 0;  // distinct spans predicted (kTooManyArguments)
};

// Event-type hierarchy with per-type role sets. Immutable after construction.
//
// The global role set is indexed lexicographically, so role indices do not
// depend on the order of lines in the ontology file.
class Ontology {
 public:
  Ontology() = default;
  explicit Ontology(std::vector<EventType> types);

  const std::vector<EventType>& types() const { return types_; }
  const std::vector<std::string>& all_roles() const { return roles_; }
  std::size_t num_roles() const { return roles_.size(); }

  bool has_type(const std::string& name) const { return type_index_.count(name) > 0; }
  const EventType& type(const std::string& name) const;
  // Case-insensitive lookup; used when importing corpora with lowercased labels.
  std::optional<std::string> canonical_type_name(const std::string& name) const;

  const std::vector<RoleSlot>& roles_for(const std::string& type_name) const;

  bool has_role(const std::string& role) const { return role_index_.count(role) > 0; }
  int role_index(const std::string& role) const;
  const std::string& role_name(int index) const { return roles_.at(index); }

 private:
  std::vector<EventType> types_;
  std::map<std::string, std::size_t> type_index_;
  std::map<std::string, std::string> lowercase_names_;
  std::vector<std::string> roles_;
  std::map<std::string, int> role_index_;
};

// TSV: `type_name<TAB>role[:m]<TAB>...`, `#` comments and blank lines skipped.
Ontology parse_ontology(std::istream& in);
Ontology load_ontology(const std::string& path);
void write_ontology(std::ostream& out, const Ontology& ontology);

// Predictions that break the ontology: roles outside R_e, or more than m_r
// distinct spans for one (event, role). `gold_types` maps
// doc_id -> event_id -> type name.
using EventTypeMap = std::map<std::string, std::map<std::string, std::string>>;
std::vector<Violation> violations(const Ontology& ontology,
                                  const std::vector<LinkPrediction>& predictions,
                                  const EventTypeMap& gold_types);

}  // namespace arglink

#endif  // ARGLINK_ONTOLOGY_H_
