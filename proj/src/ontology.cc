#include "arglink/ontology.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "arglink/errors.h"

namespace arglink {
namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \r\n\t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \r\n\t");
  return s.substr(b, e - b + 1);
}

}  // namespace

const RoleSlot* EventType::find_role(const std::string& role) const {
  for (const auto& r : roles) {
    if (r.name == role) return &r;
  }
  return nullptr;
}

Ontology::Ontology(std::vector<EventType> types) : types_(std::move(types)) {
  std::set<std::string> roles;
  for (std::size_t i = 0; i < types_.size(); ++i) {
    const EventType& t = types_[i];
    if (!type_index_.emplace(t.name, i).second) {
      throw FormatError("duplicate event type: " + t.name);
    }
    lowercase_names_.emplace(lowercase(t.name), t.name);
    std::set<std::string> seen;
    for (const auto& r : t.roles) {
      if (r.multiplicity < 1) throw FormatError("multiplicity must be >= 1 for " + t.name);
      if (!seen.insert(r.name).second) {
        throw FormatError("duplicate role '" + r.name + "' in " + t.name);
      }
      roles.insert(r.name);
    }
  }
  roles_.assign(roles.begin(), roles.end());
  for (std::size_t i = 0; i < roles_.size(); ++i) role_index_[roles_[i]] = static_cast<int>(i);
}

const EventType& Ontology::type(const std::string& name) const {
  auto it = type_index_.find(name);
  if (it == type_index_.end()) throw LookupError("unknown event type: " + name);
  return types_[it->second];
}

std::optional<std::string> Ontology::canonical_type_name(const std::string& name) const {
  if (has_type(name)) return name;
  auto it = lowercase_names_.find(lowercase(name));
  if (it == lowercase_names_.end()) return std::nullopt;
  return it->second;
}

const std::vector<RoleSlot>& Ontology::roles_for(const std::string& type_name) const {
  return type(type_name).roles;
}

int Ontology::role_index(const std::string& role) const {
  auto it = role_index_.find(role);
  if (it == role_index_.end()) throw LookupError("unknown role: " + role);
  return it->second;
}

Ontology parse_ontology(std::istream& in) {
  std::vector<EventType> types;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    auto fields = split(line, '\t');
    EventType t;
    t.name = trim(fields[0]);
    const auto levels = split(t.name, '.');
    if (t.name.empty() || levels.size() > 3 ||
        std::any_of(levels.begin(), levels.end(), [](const auto& s) { return s.empty(); })) {
      throw FormatError("line " + std::to_string(line_no) + ": bad event type name '" +
                        t.name + "'");
    }
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const std::string field = trim(fields[i]);
      if (field.empty()) continue;
      RoleSlot slot;
      const auto colon = field.find(':');
      slot.name = field.substr(0, colon);
      if (colon != std::string::npos) {
        const std::string m = field.substr(colon + 1);
        if (m.empty() || !std::all_of(m.begin(), m.end(), ::isdigit) || std::stoi(m) < 1) {
          throw FormatError("line " + std::to_string(line_no) + ": bad multiplicity '" + m +
                            "' for role " + slot.name);
        }
        slot.multiplicity = std::stoi(m);
      }
      if (slot.name.empty()) {
        throw FormatError("line " + std::to_string(line_no) + ": empty role name");
      }
      t.roles.push_back(slot);
    }
    types.push_back(std::move(t));
  }
  try {
    return Ontology(std::move(types));
  } catch (const FormatError& e) {
    throw FormatError(std::string("ontology: ") + e.what());
  }
}

Ontology load_ontology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open ontology file: " + path);
  return parse_ontology(in);
}

void write_ontology(std::ostream& out, const Ontology& ontology) {
  for (const auto& t : ontology.types()) {
    out << t.name;
    for (const auto& r : t.roles) {
      out << '\t' << r.name;
      if (r.multiplicity != 1) out << ':' << r.multiplicity;
    }
    out << '\n';
  }
}

std::vector<Violation> violations(const Ontology& ontology,
                                  const std::vector<LinkPrediction>& predictions,
                                  const EventTypeMap& gold_types) {
  std::vector<Violation> out;
  // (doc, event, role) -> distinct spans
  std::map<std::tuple<std::string, std::string, std::string>, std::set<Span>> spans;
  std::set<std::tuple<std::string, std::string, std::string>> reported;
  for (const auto& p : predictions) {
    const auto doc_it = gold_types.find(p.doc_id);
    if (doc_it == gold_types.end()) continue;
    const auto ev_it = doc_it->second.find(p.event_id);
    if (ev_it == doc_it->second.end()) continue;
    const EventType& t = ontology.type(ev_it->second);
    auto key = std::make_tuple(p.doc_id, p.event_id, p.role);
    if (t.find_role(p.role) == nullptr) {
      if (reported.insert(key).second) {
        out.push_back({Violation::Kind::kRoleNotPermitted, p.doc_id, p.event_id, p.role, 1});
      }
      continue;
    }
    spans[key].insert(p.span);
  }
  for (const auto& [key, set] : spans) {
    const auto& [doc, event, role] = key;
    const EventType& t = ontology.type(gold_types.at(doc).at(event));
    const int m = t.find_role(role)->multiplicity;
    if (static_cast<int>(set.size()) > m) {
      out.push_back({Violation::Kind::kTooManyArguments, doc, event, role,
                     static_cast<int>(set.size())});
    }
  }
  return out;
}

}  // namespace arglink
