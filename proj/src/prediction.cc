#include "arglink/prediction.h"

#include <fstream>

#include "arglink/errors.h"
#include "json.hpp"

namespace arglink {

std::vector<LinkPrediction> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::vector<LinkPrediction> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      LinkPrediction p;
      p.doc_id = j.at("doc_id").get<std::string>();
      p.event_id = j.at("event_id").get<std::string>();
      p.role = j.at("role").get<std::string>();
      p.span = Span{j.at("span").at(0).get<int>(), j.at("span").at(1).get<int>()};
      p.score = j.value("score", 0.0);
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_predictions(const std::string& path, const std::vector<LinkPrediction>& preds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  for (const auto& p : preds) {
    nlohmann::ordered_json j;
    j["doc_id"] = p.doc_id;
    j["event_id"] = p.event_id;
    j["role"] = p.role;
    j["span"] = {p.span.start, p.span.end};
    j["score"] = p.score;
    out << j.dump() << '\n';
  }
}

}  // namespace arglink
