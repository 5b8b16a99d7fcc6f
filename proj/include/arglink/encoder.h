#ifndef ARGLINK_ENCODER_H_
#define ARGLINK_ENCODER_H_

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "arglink/config.h"
#include "arglink/corpus.h"
#include "arglink/nn/graph.h"

namespace arglink {

// Fixed word vectors read from a whitespace-separated text file
// (`word v1 ... vd` per line; a leading `count dim` header is skipped).
class WordVectors {
 public:
  static WordVectors load(const std::string& path);
  WordVectors(std::vector<std::string> words, nn::Matrix vectors);

  int dim() const { return static_cast<int>(vectors_.cols()); }
  std::size_t size() const { return words_.size(); }
  // Row of `word` (exact, then lowercased), or -1.
  int find(const std::string& word) const;
  const nn::Matrix& vectors() const { return vectors_; }

 private:
  std::vector<std::string> words_;
  std::map<std::string, int> index_;
  nn::Matrix vectors_;
};

// Precomputed contextual layers for one document: L x n x d, row-major
// (layer, token, dim).
struct ContextualStack {
  int layers = 0;
  int tokens = 0;
  int dim = 0;
  std::vector<float> data;

  nn::Matrix layer(int l) const;
};

// Binary format: "CTXE", u16 version (1), u16 L, u32 n, u32 d, then L*n*d
// little-endian float32.
ContextualStack read_ctxe(const std::string& path);
void write_ctxe(const std::string& path, const ContextualStack& stack);

// Finds the stack for a document as `<dir>/<doc_id>.ctxe`, or as consecutive
// segment files `<dir>/<doc_id>.<i>.ctxe` whose token counts follow
// segment_starts(). Results are cached.
class ContextualStore {
 public:
  explicit ContextualStore(std::string dir) : dir_(std::move(dir)) {}
  const ContextualStack& get(const Document& doc, int segment_tokens);

 private:
  std::string dir_;
  std::mutex mu_;
  std::map<std::string, std::unique_ptr<ContextualStack>> cache_;
};

// scale * sum_l softmax(weights)_l * layer_l. `weights` is 1 x L, `scale` 1 x 1.
nn::Var scalar_mixture(nn::Graph& g, const ContextualStack& stack, nn::Var weights,
                       nn::Var scale);

// Unidirectional LSTM over every sentence of the sequence; the state is reset
// at each entry of `sentence_starts`. `input` is n x d_in, result n x h.
struct LstmParams {
  nn::Parameter* input_weight;      // d_in x 4h, gate order i, f, g, o
  nn::Parameter* recurrent_weight;  // h x 4h
  nn::Parameter* bias;              // 1 x 4h
};
nn::Var lstm(nn::Graph& g, nn::Var input, const LstmParams& params,
             const std::vector<int>& sentence_starts, bool reverse);

// Max-pooled character convolutions over UTF-8 bytes. Tokens are padded to
// the widest filter. Result is n x (filters * widths).
struct CharCnnParams {
  nn::Parameter* embedding;              // 257 x char_dim (row 256 is padding)
  std::vector<int> widths;
  std::vector<nn::Parameter*> filters;   // (w * char_dim) x F per width
  std::vector<nn::Parameter*> biases;    // 1 x F per width
};
inline constexpr int kCharPad = 256;
inline constexpr int kMaxTokenBytes = 50;
nn::Var char_cnn(nn::Graph& g, const std::vector<std::string>& tokens, const CharCnnParams& params);

// Attention-weighted sum of `embeddings` rows within each span; `token_scores`
// is n x 1. Result is |spans| x d. When `weights_out` is set it receives the
// attention weights of each span.
nn::Var span_attention(nn::Graph& g, nn::Var embeddings, nn::Var token_scores,
                       const std::vector<Span>& spans,
                       std::vector<std::vector<double>>* weights_out = nullptr);

// Width buckets {1, 2, 3, 4, 5-7, 8-15, 16-31, 32+}.
inline constexpr int kWidthBuckets = 8;
int width_bucket(int width);

// Token embeddings, the sentence-level BiLSTM and span representations.
class Encoder {
 public:
  Encoder(nn::ParameterStore& store, const ModelConfig& config,
          std::shared_ptr<const WordVectors> words, nn::Rng& init);

  int input_dim() const { return input_dim_; }
  int hidden_dim() const { return 2 * config_.lstm_size; }
  // [h_start; h_end; attention head; width feature]
  int span_dim() const { return 2 * hidden_dim() + input_dim_ + config_.feature_dim; }

  // n x input_dim: [word vector; char-CNN; contextual mixture], each source
  // with its own lexical dropout mask in training graphs.
  nn::Var embed_tokens(nn::Graph& g, const Document& doc, const ContextualStack* context) const;
  // n x hidden_dim; every sentence encoded independently.
  nn::Var contextualize(nn::Graph& g, nn::Var embeddings,
                        const std::vector<int>& sentence_starts) const;
  nn::Var span_representations(nn::Graph& g, nn::Var hidden, nn::Var embeddings,
                               const std::vector<Span>& spans) const;

 private:
  nn::Var lookup(nn::Graph& g, const Document& doc) const;

  ModelConfig config_;
  std::shared_ptr<const WordVectors> words_;
  int input_dim_ = 0;
  nn::Parameter* unk_ = nullptr;
  CharCnnParams chars_;
  nn::Parameter* mix_weights_ = nullptr;
  nn::Parameter* mix_scale_ = nullptr;
  std::vector<LstmParams> forward_;
  std::vector<LstmParams> backward_;
  nn::Linear head_scorer_;
  nn::Parameter* width_embedding_ = nullptr;
};

}  // namespace arglink

#endif  // ARGLINK_ENCODER_H_
