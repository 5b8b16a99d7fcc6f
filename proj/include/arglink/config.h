#ifndef ARGLINK_CONFIG_H_
#define ARGLINK_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace arglink {

enum class Decoding { kArgmax, kGreedy, kTypeConstrained };

Decoding parse_decoding(const std::string& name);
std::string to_string(Decoding d);

// Model and training hyperparameters. Defaults are the RAMS settings.
struct ModelConfig {
  // Embeddings.
  int role_dim = 50;
  int feature_dim = 20;  // distance and width embeddings
  int char_dim = 8;
  int char_filters = 50;
  std::vector<int> char_widths = {3, 4, 5};
  std::string word_vectors;  // optional whitespace-separated text file
  std::string contextual_dir;  // optional directory of <doc_id>.ctxe files
  int contextual_layers = 0;
  int contextual_dim = 0;
  int segment_tokens = 512;

  // Encoder.
  int lstm_size = 200;
  int lstm_layers = 3;
  double lstm_dropout = 0.4;
  double lexical_dropout = 0.5;
  // Drop whole token vectors per source instead of single coordinates.
  bool lexical_dropout_tokens = false;

  // Feed-forward scorers.
  int ffnn_size = 150;
  int ffnn_layers = 2;
  double ffnn_dropout = 0.2;

  // Pruning.
  int top_k = 10;
  double lambda_a = 0.4;
  int max_span_width = 5;
  int window_radius = 2;

  // Link score components.
  bool use_s_er = false;
  bool use_s_ar = true;
  bool use_s_l = true;
  bool use_s_c = false;
  bool use_distance = true;

  // Training.
  double learning_rate = 0.001;
  double decay_rate = 0.999;
  int decay_steps = 100;
  int patience = 10;
  int max_epochs = 100;
  int max_train_tokens = 1000;
  double grad_clip = 0.0;  // 0 disables clipping
  bool restrict_roles_to_type = false;
  bool epsilon_loss_terms = true;
  Decoding dev_decoding = Decoding::kGreedy;
  std::uint64_t seed = 1;

  // Throws ConfigError on an unknown key or unparsable value.
  void set(const std::string& key, const std::string& value);
  std::vector<std::pair<std::string, std::string>> entries() const;
  void validate() const;
};

// `key = value` per line (or `key value`); `#` starts a comment.
ModelConfig parse_config(const std::string& text, ModelConfig base = {});
ModelConfig load_config(const std::string& path, ModelConfig base = {});
std::string format_config(const ModelConfig& config);

}  // namespace arglink

#endif  // ARGLINK_CONFIG_H_
