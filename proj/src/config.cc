#include "arglink/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "arglink/errors.h"

namespace arglink {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream ss(value);
  T out{};
  ss >> out;
  if (ss.fail() || !ss.eof()) throw ConfigError("config: bad value '" + value + "' for " + key);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: bad boolean '" + value + "' for " + key);
}

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct Field {
  const char* name;
  std::function<void(ModelConfig&, const std::string&)> set;
  std::function<std::string(const ModelConfig&)> get;
};

#define INT_FIELD(f)                                                                   \
  Field {                                                                              \
    #f, [](ModelConfig& c, const std::string& v) { c.f = parse_number<int>(#f, v); }, \
        [](const ModelConfig& c) { return std::to_string(c.f); }                       \
  }
#define REAL_FIELD(f)                                                                     \
  Field {                                                                                 \
    #f, [](ModelConfig& c, const std::string& v) { c.f = parse_number<double>(#f, v); }, \
        [](const ModelConfig& c) { return fmt(c.f); }                                     \
  }
#define BOOL_FIELD(f)                                                              \
  Field {                                                                          \
    #f, [](ModelConfig& c, const std::string& v) { c.f = parse_bool(#f, v); },    \
        [](const ModelConfig& c) { return std::string(c.f ? "true" : "false"); }   \
  }
#define STRING_FIELD(f)                                                      \
  Field {                                                                    \
    #f, [](ModelConfig& c, const std::string& v) { c.f = v; },              \
        [](const ModelConfig& c) { return c.f; }                             \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      INT_FIELD(role_dim),
      INT_FIELD(feature_dim),
      INT_FIELD(char_dim),
      INT_FIELD(char_filters),
      Field{"char_widths",
            [](ModelConfig& c, const std::string& v) {
              c.char_widths.clear();
              std::istringstream ss(v);
              std::string item;
              while (std::getline(ss, item, ',')) {
                c.char_widths.push_back(parse_number<int>("char_widths", trim(item)));
              }
            },
            [](const ModelConfig& c) {
              std::string out;
              for (std::size_t i = 0; i < c.char_widths.size(); ++i) {
                if (i) out += ",";
                out += std::to_string(c.char_widths[i]);
              }
              return out;
            }},
      STRING_FIELD(word_vectors),
      STRING_FIELD(contextual_dir),
      INT_FIELD(contextual_layers),
      INT_FIELD(contextual_dim),
      INT_FIELD(segment_tokens),
      INT_FIELD(lstm_size),
      INT_FIELD(lstm_layers),
      REAL_FIELD(lstm_dropout),
      REAL_FIELD(lexical_dropout),
      BOOL_FIELD(lexical_dropout_tokens),
      INT_FIELD(ffnn_size),
      INT_FIELD(ffnn_layers),
      REAL_FIELD(ffnn_dropout),
      INT_FIELD(top_k),
      REAL_FIELD(lambda_a),
      INT_FIELD(max_span_width),
      INT_FIELD(window_radius),
      BOOL_FIELD(use_s_er),
      BOOL_FIELD(use_s_ar),
      BOOL_FIELD(use_s_l),
      BOOL_FIELD(use_s_c),
      BOOL_FIELD(use_distance),
      REAL_FIELD(learning_rate),
      REAL_FIELD(decay_rate),
      INT_FIELD(decay_steps),
      INT_FIELD(patience),
      INT_FIELD(max_epochs),
      INT_FIELD(max_train_tokens),
      REAL_FIELD(grad_clip),
      BOOL_FIELD(restrict_roles_to_type),
      BOOL_FIELD(epsilon_loss_terms),
      Field{"dev_decoding",
            [](ModelConfig& c, const std::string& v) { c.dev_decoding = parse_decoding(v); },
            [](const ModelConfig& c) { return to_string(c.dev_decoding); }},
      Field{"seed",
            [](ModelConfig& c, const std::string& v) {
              c.seed = parse_number<std::uint64_t>("seed", v);
            },
            [](const ModelConfig& c) { return std::to_string(c.seed); }},
  };
  return kFields;
}

}  // namespace

Decoding parse_decoding(const std::string& name) {
  if (name == "argmax") return Decoding::kArgmax;
  if (name == "greedy") return Decoding::kGreedy;
  if (name == "tcd") return Decoding::kTypeConstrained;
  throw ConfigError("unknown decoding strategy: " + name);
}

std::string to_string(Decoding d) {
  switch (d) {
    case Decoding::kArgmax: return "argmax";
    case Decoding::kGreedy: return "greedy";
    case Decoding::kTypeConstrained: return "tcd";
  }
  return "greedy";
}

void ModelConfig::set(const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key == f.name) {
      f.set(*this, value);
      return;
    }
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> ModelConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.name, f.get(*this));
  return out;
}

void ModelConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  require(role_dim > 0 && feature_dim > 0 && char_dim > 0 && char_filters > 0, "dims must be positive");
  require(!char_widths.empty(), "char_widths must be non-empty");
  for (int w : char_widths) require(w > 0, "char widths must be positive");
  require(lstm_size > 0 && lstm_layers > 0, "lstm size and layers must be positive");
  require(ffnn_size > 0 && ffnn_layers > 0, "ffnn size and layers must be positive");
  require(top_k >= 1, "top_k must be >= 1");
  require(lambda_a > 0, "lambda_a must be positive");
  require(max_span_width >= 1, "max_span_width must be >= 1");
  require(window_radius >= 0, "window_radius must be >= 0");
  require(learning_rate > 0 && decay_rate > 0 && decay_steps > 0, "bad learning-rate schedule");
  require(patience >= 1, "patience must be >= 1");
  require(max_epochs >= 1 && max_train_tokens >= 1, "max_epochs and max_train_tokens must be positive");
  require(lstm_dropout >= 0 && lstm_dropout < 1 && lexical_dropout >= 0 && lexical_dropout < 1 &&
              ffnn_dropout >= 0 && ffnn_dropout < 1,
          "dropout must be in [0, 1)");
  require(use_s_er || use_s_ar || use_s_l || use_s_c, "at least one link score component must be on");
  require((contextual_layers == 0) == (contextual_dim == 0),
          "contextual_layers and contextual_dim must both be set");
  require(contextual_layers == 0 || !contextual_dir.empty(), "contextual_dir required");
}

ModelConfig parse_config(const std::string& text, ModelConfig base) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto sep = line.find('=');
    if (sep == std::string::npos) sep = line.find_first_of(" \t");
    if (sep == std::string::npos) throw ConfigError("config: missing value in '" + line + "'");
    base.set(trim(line.substr(0, sep)), trim(line.substr(sep + 1)));
  }
  return base;
}

ModelConfig load_config(const std::string& path, ModelConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string format_config(const ModelConfig& config) {
  std::string out;
  for (const auto& [k, v] : config.entries()) out += k + " = " + v + "\n";
  return out;
}

}  // namespace arglink
