#include "arglink/encoder.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "arglink/errors.h"

namespace arglink {

using nn::Graph;
using nn::Matrix;
using nn::Var;

// ---------------------------------------------------------------------------
// Word vectors

WordVectors::WordVectors(std::vector<std::string> words, Matrix vectors)
    : words_(std::move(words)), vectors_(std::move(vectors)) {
  for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], static_cast<int>(i));
}

WordVectors WordVectors::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open word vectors " + path);
  std::vector<std::string> words;
  std::vector<std::vector<double>> rows;
  std::string line;
  int dim = -1;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string word;
    if (!(ss >> word)) continue;
    std::vector<double> values;
    double v;
    while (ss >> v) values.push_back(v);
    if (line_no == 1 && values.size() == 1) continue;  // "count dim" header
    if (dim < 0) dim = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != dim || dim == 0) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(dim) + " values");
    }
    words.push_back(word);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw FormatError("no vectors in " + path);
  Matrix m(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), j) = rows[i][j];
  }
  return WordVectors(std::move(words), std::move(m));
}

int WordVectors::find(const std::string& word) const {
  auto it = index_.find(word);
  if (it != index_.end()) return it->second;
  std::string lower = word;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  it = index_.find(lower);
  return it == index_.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------
// Contextual layer files

Matrix ContextualStack::layer(int l) const {
  Matrix m(tokens, dim);
  const float* src = data.data() + static_cast<std::size_t>(l) * tokens * dim;
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = src[i];
  return m;
}

namespace {

template <typename T>
T read_le(std::istream& in, const std::string& path) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    throw FormatError(path + ": truncated contextual file");
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return static_cast<T>(v);
}

template <typename T>
void write_le(std::ostream& out, T value) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

}  // namespace

ContextualStack read_ctxe(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "CTXE", 4) != 0) {
    throw FormatError(path + ": bad magic");
  }
  const auto version = read_le<std::uint16_t>(in, path);
  if (version != 1) throw FormatError(path + ": unsupported version " + std::to_string(version));
  ContextualStack s;
  s.layers = read_le<std::uint16_t>(in, path);
  s.tokens = static_cast<int>(read_le<std::uint32_t>(in, path));
  s.dim = static_cast<int>(read_le<std::uint32_t>(in, path));
  const std::size_t count = static_cast<std::size_t>(s.layers) * s.tokens * s.dim;
  s.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto bits = read_le<std::uint32_t>(in, path);
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    s.data[i] = f;
  }
  return s;
}

void write_ctxe(const std::string& path, const ContextualStack& s) {
  if (s.data.size() != static_cast<std::size_t>(s.layers) * s.tokens * s.dim) {
    throw ConfigError("contextual stack size does not match its header");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out.write("CTXE", 4);
  write_le<std::uint16_t>(out, 1);
  write_le<std::uint16_t>(out, static_cast<std::uint16_t>(s.layers));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.tokens));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.dim));
  for (float f : s.data) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof(f));
    write_le<std::uint32_t>(out, bits);
  }
}

const ContextualStack& ContextualStore::get(const Document& doc, int segment_tokens) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(doc.doc_id);
  if (it != cache_.end()) return *it->second;
  namespace fs = std::filesystem;
  auto stack = std::make_unique<ContextualStack>();
  const fs::path whole = fs::path(dir_) / (doc.doc_id + ".ctxe");
  if (fs::exists(whole)) {
    *stack = read_ctxe(whole.string());
  } else {
    const auto starts = segment_starts(doc, segment_tokens);
    for (std::size_t i = 0; i < starts.size(); ++i) {
      const fs::path part = fs::path(dir_) / (doc.doc_id + "." + std::to_string(i) + ".ctxe");
      if (!fs::exists(part)) throw FormatError("no contextual file for document " + doc.doc_id);
      ContextualStack seg = read_ctxe(part.string());
      const int expected = (i + 1 < starts.size() ? starts[i + 1] : doc.size()) - starts[i];
      if (seg.tokens != expected) {
        throw ValidationError("alignment error: segment " + part.string() + " has " +
                              std::to_string(seg.tokens) + " tokens, expected " +
                              std::to_string(expected));
      }
      if (i == 0) {
        stack->layers = seg.layers;
        stack->dim = seg.dim;
      } else if (seg.layers != stack->layers || seg.dim != stack->dim) {
        throw ValidationError("alignment error: segment shapes differ in " + doc.doc_id);
      }
      stack->tokens += seg.tokens;
      stack->data.resize(static_cast<std::size_t>(stack->layers) * stack->tokens * stack->dim);
    }
    // Interleave segments per layer.
    int offset = 0;
    for (std::size_t i = 0; i < starts.size(); ++i) {
      const fs::path part = fs::path(dir_) / (doc.doc_id + "." + std::to_string(i) + ".ctxe");
      ContextualStack seg = read_ctxe(part.string());
      for (int l = 0; l < seg.layers; ++l) {
        std::copy_n(seg.data.begin() + static_cast<std::ptrdiff_t>(l) * seg.tokens * seg.dim,
                    static_cast<std::ptrdiff_t>(seg.tokens) * seg.dim,
                    stack->data.begin() +
                        (static_cast<std::ptrdiff_t>(l) * stack->tokens + offset) * stack->dim);
      }
      offset += seg.tokens;
    }
  }
  if (stack->tokens != doc.size()) {
    throw ValidationError("alignment error: contextual file for " + doc.doc_id + " has " +
                          std::to_string(stack->tokens) + " tokens, document has " +
                          std::to_string(doc.size()));
  }
  return *cache_.emplace(doc.doc_id, std::move(stack)).first->second;
}

// ---------------------------------------------------------------------------
// Differentiable building blocks

Var scalar_mixture(Graph& g, const ContextualStack& stack, Var weights, Var scale) {
  const int L = stack.layers;
  if (L < 1) throw ConfigError("scalar mixture needs at least one layer");
  if (g.cols(weights) != L) {
    throw ConfigError("scalar mixture: " + std::to_string(g.cols(weights)) +
                      " weights for " + std::to_string(L) + " layers");
  }
  if (stack.data.size() != static_cast<std::size_t>(L) * stack.tokens * stack.dim) {
    throw ConfigError("scalar mixture: layer shape mismatch");
  }
  const auto& w = g.value(weights);
  Eigen::RowVectorXd p = (w.row(0).array() - w.maxCoeff()).exp();
  p /= p.sum();
  const double gamma = g.scalar(scale);
  auto layers = std::make_shared<std::vector<Matrix>>();
  Matrix mix = Matrix::Zero(stack.tokens, stack.dim);
  for (int l = 0; l < L; ++l) {
    layers->push_back(stack.layer(l));
    mix += p(l) * layers->back();
  }
  Matrix out = gamma * mix;
  return g.custom(std::move(out), {weights, scale},
                  [layers, p, gamma, mix](const Matrix& dout, std::vector<Matrix*>& in) {
                    if (in[1]) (*in[1])(0, 0) += dout.cwiseProduct(mix).sum();
                    if (in[0]) {
                      Eigen::RowVectorXd dp(p.size());
                      for (Eigen::Index l = 0; l < p.size(); ++l) {
                        dp(l) = gamma * dout.cwiseProduct((*layers)[l]).sum();
                      }
                      const double dot = p.dot(dp);
                      for (Eigen::Index l = 0; l < p.size(); ++l) {
                        (*in[0])(0, l) += p(l) * (dp(l) - dot);
                      }
                    }
                  });
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Var lstm(Graph& g, Var input, const LstmParams& params, const std::vector<int>& sentence_starts,
         bool reverse) {
  Var W = g.param(*params.input_weight);
  Var U = g.param(*params.recurrent_weight);
  Var b = g.param(*params.bias);
  const Matrix& X = g.value(input);
  const Matrix& Uv = g.value(U);
  const int n = static_cast<int>(X.rows());
  const int h = static_cast<int>(Uv.rows());
  if (g.rows(W) != X.cols() || g.cols(W) != 4 * h) throw ConfigError("lstm: input size mismatch");

  // Step order and predecessor of each position.
  std::vector<int> order;
  std::vector<int> prev(n, -1);
  for (std::size_t s = 0; s < sentence_starts.size(); ++s) {
    const int begin = sentence_starts[s];
    const int end = s + 1 < sentence_starts.size() ? sentence_starts[s + 1] : n;
    if (!reverse) {
      for (int t = begin; t < end; ++t) {
        order.push_back(t);
        prev[t] = t > begin ? t - 1 : -1;
      }
    } else {
      for (int t = end - 1; t >= begin; --t) {
        order.push_back(t);
        prev[t] = t < end - 1 ? t + 1 : -1;
      }
    }
  }

  auto gates = std::make_shared<Matrix>(X * g.value(W));
  gates->rowwise() += g.value(b).row(0);
  auto cells = std::make_shared<Matrix>(Matrix::Zero(n, h));
  auto tanh_cells = std::make_shared<Matrix>(Matrix::Zero(n, h));
  Matrix H = Matrix::Zero(n, h);
  for (int t : order) {
    auto z = gates->row(t);
    if (prev[t] >= 0) z.noalias() += H.row(prev[t]) * Uv;
    for (int j = 0; j < h; ++j) {
      z(j) = sigmoid(z(j));                   // input
      z(h + j) = sigmoid(z(h + j));           // forget
      z(2 * h + j) = std::tanh(z(2 * h + j)); // candidate
      z(3 * h + j) = sigmoid(z(3 * h + j));   // output
      const double c_prev = prev[t] >= 0 ? (*cells)(prev[t], j) : 0.0;
      const double c = z(h + j) * c_prev + z(j) * z(2 * h + j);
      (*cells)(t, j) = c;
      (*tanh_cells)(t, j) = std::tanh(c);
      H(t, j) = z(3 * h + j) * (*tanh_cells)(t, j);
    }
  }

  const int out_id = static_cast<int>(g.size());
  return g.custom(
      std::move(H), {input, W, U, b},
      [&g, input, W, U, order, prev, gates, cells, tanh_cells, n, h, out_id](
          const Matrix& dout, std::vector<Matrix*>& in) {
        const Matrix& Hv = g.value(Var{out_id});
        const Matrix& Uv = g.value(U);
        Matrix dZ = Matrix::Zero(n, 4 * h);
        Matrix dh_carry = Matrix::Zero(n, h);
        Matrix dc_carry = Matrix::Zero(n, h);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
          const int t = *it;
          const auto a = gates->row(t);
          for (int j = 0; j < h; ++j) {
            const double i_g = a(j), f_g = a(h + j), c_g = a(2 * h + j), o_g = a(3 * h + j);
            const double tc = (*tanh_cells)(t, j);
            const double dh = dout(t, j) + dh_carry(t, j);
            const double dc = dh * o_g * (1.0 - tc * tc) + dc_carry(t, j);
            const double c_prev = prev[t] >= 0 ? (*cells)(prev[t], j) : 0.0;
            dZ(t, j) = dc * c_g * i_g * (1.0 - i_g);
            dZ(t, h + j) = dc * c_prev * f_g * (1.0 - f_g);
            dZ(t, 2 * h + j) = dc * i_g * (1.0 - c_g * c_g);
            dZ(t, 3 * h + j) = dh * tc * o_g * (1.0 - o_g);
            if (prev[t] >= 0) dc_carry(prev[t], j) += dc * f_g;
          }
          if (prev[t] >= 0) dh_carry.row(prev[t]).noalias() += dZ.row(t) * Uv.transpose();
        }
        if (in[0]) in[0]->noalias() += dZ * g.value(W).transpose();
        if (in[1]) in[1]->noalias() += g.value(input).transpose() * dZ;
        if (in[2]) {
          Matrix h_prev = Matrix::Zero(n, h);
          for (int t = 0; t < n; ++t) {
            if (prev[t] >= 0) h_prev.row(t) = Hv.row(prev[t]);
          }
          in[2]->noalias() += h_prev.transpose() * dZ;
        }
        if (in[3]) *in[3] += dZ.colwise().sum();
      });
}

namespace {

std::vector<int> token_chars(const std::string& token, int min_length) {
  std::vector<int> ids;
  for (std::size_t i = 0; i < token.size() && static_cast<int>(i) < kMaxTokenBytes; ++i) {
    ids.push_back(static_cast<unsigned char>(token[i]));
  }
  while (static_cast<int>(ids.size()) < min_length) ids.push_back(kCharPad);
  return ids;
}

// Rows are convolution windows: (L - w + 1) x (w * char_dim).
Matrix windows(const Matrix& embedding, const std::vector<int>& chars, int width) {
  const int cd = static_cast<int>(embedding.cols());
  const int count = static_cast<int>(chars.size()) - width + 1;
  Matrix win(count, width * cd);
  for (int p = 0; p < count; ++p) {
    for (int j = 0; j < width; ++j) win.block(p, j * cd, 1, cd) = embedding.row(chars[p + j]);
  }
  return win;
}

}  // namespace

Var char_cnn(Graph& g, const std::vector<std::string>& tokens, const CharCnnParams& params) {
  std::vector<Var> inputs{g.param(*params.embedding)};
  for (auto* f : params.filters) inputs.push_back(g.param(*f));
  for (auto* b : params.biases) inputs.push_back(g.param(*b));
  const int K = static_cast<int>(params.widths.size());
  const int F = static_cast<int>(params.filters[0]->value.cols());
  const int max_width = *std::max_element(params.widths.begin(), params.widths.end());
  const int n = static_cast<int>(tokens.size());

  auto chars = std::make_shared<std::vector<std::vector<int>>>();
  for (const auto& t : tokens) chars->push_back(token_chars(t, max_width));
  auto argmax = std::make_shared<std::vector<int>>(static_cast<std::size_t>(n) * K * F, -1);
  Matrix out = Matrix::Zero(n, K * F);
  const Matrix& E = params.embedding->value;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < K; ++k) {
      const Matrix win = windows(E, (*chars)[i], params.widths[k]);
      Matrix z = win * params.filters[k]->value;
      z.rowwise() += params.biases[k]->value.row(0);
      for (int f = 0; f < F; ++f) {
        Eigen::Index best;
        const double m = z.col(f).maxCoeff(&best);
        if (m > 0.0) {
          out(i, k * F + f) = m;
          (*argmax)[(static_cast<std::size_t>(i) * K + k) * F + f] = static_cast<int>(best);
        }
      }
    }
  }

  std::vector<int> widths = params.widths;
  std::vector<Var> filter_vars(inputs.begin() + 1, inputs.begin() + 1 + K);
  Var emb_var = inputs[0];
  return g.custom(
      std::move(out), inputs,
      [&g, chars, argmax, widths, filter_vars, emb_var, K, F, n](const Matrix& dout,
                                                                 std::vector<Matrix*>& in) {
        const Matrix& E = g.value(emb_var);
        const int cd = static_cast<int>(E.cols());
        for (int i = 0; i < n; ++i) {
          const auto& ids = (*chars)[i];
          for (int k = 0; k < K; ++k) {
            const int w = widths[k];
            const int count = static_cast<int>(ids.size()) - w + 1;
            Matrix dz = Matrix::Zero(count, F);
            bool any = false;
            for (int f = 0; f < F; ++f) {
              const int p = (*argmax)[(static_cast<std::size_t>(i) * K + k) * F + f];
              if (p >= 0) {
                dz(p, f) = dout(i, k * F + f);
                any = true;
              }
            }
            if (!any) continue;
            const Matrix win = windows(E, ids, w);
            if (in[1 + k]) in[1 + k]->noalias() += win.transpose() * dz;
            if (in[1 + K + k]) *in[1 + K + k] += dz.colwise().sum();
            if (in[0]) {
              const Matrix dwin = dz * g.value(filter_vars[k]).transpose();
              for (int p = 0; p < count; ++p) {
                for (int j = 0; j < w; ++j) in[0]->row(ids[p + j]) += dwin.block(p, j * cd, 1, cd);
              }
            }
          }
        }
      });
}

Var span_attention(Graph& g, Var embeddings, Var token_scores, const std::vector<Span>& spans,
                   std::vector<std::vector<double>>* weights_out) {
  const Matrix& X = g.value(embeddings);
  const Matrix& s = g.value(token_scores);
  auto alphas = std::make_shared<std::vector<Eigen::VectorXd>>();
  Matrix out(static_cast<Eigen::Index>(spans.size()), X.cols());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const Span& sp = spans[i];
    Eigen::VectorXd a = s.col(0).segment(sp.start, sp.width());
    a = (a.array() - a.maxCoeff()).exp();
    a /= a.sum();
    out.row(static_cast<Eigen::Index>(i)) = a.transpose() * X.middleRows(sp.start, sp.width());
    if (weights_out) weights_out->emplace_back(a.data(), a.data() + a.size());
    alphas->push_back(std::move(a));
  }
  return g.custom(std::move(out), {embeddings, token_scores},
                  [&g, embeddings, spans, alphas](const Matrix& dout, std::vector<Matrix*>& in) {
                    const Matrix& X = g.value(embeddings);
                    for (std::size_t i = 0; i < spans.size(); ++i) {
                      const Span& sp = spans[i];
                      const auto& a = (*alphas)[i];
                      const auto drow = dout.row(static_cast<Eigen::Index>(i));
                      if (in[0]) in[0]->middleRows(sp.start, sp.width()).noalias() += a * drow;
                      if (in[1]) {
                        const Eigen::VectorXd da = X.middleRows(sp.start, sp.width()) * drow.transpose();
                        const double dot = a.dot(da);
                        in[1]->col(0).segment(sp.start, sp.width()) +=
                            (a.array() * (da.array() - dot)).matrix();
                      }
                    }
                  });
}

int width_bucket(int width) {
  if (width <= 4) return std::max(0, width - 1);
  if (width <= 7) return 4;
  if (width <= 15) return 5;
  if (width <= 31) return 6;
  return 7;
}

// ---------------------------------------------------------------------------
// Encoder

Encoder::Encoder(nn::ParameterStore& store, const ModelConfig& config,
                 std::shared_ptr<const WordVectors> words, nn::Rng& init)
    : config_(config), words_(std::move(words)) {
  if (words_) {
    unk_ = &store.add("encoder.unk", nn::gaussian(1, words_->dim(), 0.1, init));
    input_dim_ += words_->dim();
  }
  chars_.embedding = &store.add("encoder.char.embedding", nn::gaussian(kCharPad + 1, config.char_dim, 0.1, init));
  chars_.widths = config.char_widths;
  for (int w : config.char_widths) {
    const std::string name = "encoder.char.conv" + std::to_string(w);
    chars_.filters.push_back(&store.add(name + ".weight",
                                        nn::glorot_uniform(w * config.char_dim, config.char_filters, init)));
    chars_.biases.push_back(&store.add(name + ".bias", Matrix::Zero(1, config.char_filters)));
  }
  input_dim_ += config.char_filters * static_cast<int>(config.char_widths.size());
  if (config.contextual_layers > 0) {
    mix_weights_ = &store.add("encoder.mix.weights", Matrix::Zero(1, config.contextual_layers));
    mix_scale_ = &store.add("encoder.mix.scale", Matrix::Ones(1, 1));
    input_dim_ += config.contextual_dim;
  }
  int in = input_dim_;
  const int h = config.lstm_size;
  for (int l = 0; l < config.lstm_layers; ++l) {
    for (int dir = 0; dir < 2; ++dir) {
      const std::string name =
          "encoder.lstm" + std::to_string(l) + (dir == 0 ? ".forward" : ".backward");
      Matrix bias = Matrix::Zero(1, 4 * h);
      bias.middleCols(h, h).setOnes();  // forget gate
      LstmParams p{&store.add(name + ".input", nn::glorot_uniform(in, 4 * h, init)),
                   &store.add(name + ".recurrent", nn::glorot_uniform(h, 4 * h, init)),
                   &store.add(name + ".bias", std::move(bias))};
      (dir == 0 ? forward_ : backward_).push_back(p);
    }
    in = 2 * h;
  }
  head_scorer_ = nn::Linear::create(store, "encoder.head", hidden_dim(), 1, init);
  width_embedding_ =
      &store.add("encoder.width", nn::gaussian(kWidthBuckets, config.feature_dim, 0.1, init));
}

Var Encoder::lookup(Graph& g, const Document& doc) const {
  const int n = doc.size();
  Matrix out(n, words_->dim());
  auto unknown = std::make_shared<std::vector<int>>();
  for (int i = 0; i < n; ++i) {
    const int row = words_->find(doc.tokens[i]);
    if (row >= 0) {
      out.row(i) = words_->vectors().row(row);
    } else {
      out.row(i) = unk_->value.row(0);
      unknown->push_back(i);
    }
  }
  return g.custom(std::move(out), {g.param(*unk_)},
                  [unknown](const Matrix& dout, std::vector<Matrix*>& in) {
                    if (!in[0]) return;
                    for (int i : *unknown) in[0]->row(0) += dout.row(i);
                  });
}

Var Encoder::embed_tokens(Graph& g, const Document& doc, const ContextualStack* context) const {
  auto lexical = [&](Var x) {
    return config_.lexical_dropout_tokens ? g.row_dropout(x, config_.lexical_dropout)
                                          : g.dropout(x, config_.lexical_dropout);
  };
  std::vector<Var> parts;
  if (words_) parts.push_back(lexical(lookup(g, doc)));
  parts.push_back(lexical(char_cnn(g, doc.tokens, chars_)));
  if (mix_weights_) {
    if (!context) throw ConfigError("model expects contextual layers for " + doc.doc_id);
    if (context->tokens != doc.size()) {
      throw ValidationError("alignment error: contextual stack has " +
                            std::to_string(context->tokens) + " tokens, document " + doc.doc_id +
                            " has " + std::to_string(doc.size()));
    }
    if (context->dim != config_.contextual_dim) {
      throw ValidationError("alignment error: contextual dim " + std::to_string(context->dim) +
                            " != configured " + std::to_string(config_.contextual_dim));
    }
    Var mix = scalar_mixture(g, *context, g.param(*mix_weights_), g.param(*mix_scale_));
    parts.push_back(lexical(mix));
  }
  return parts.size() == 1 ? parts[0] : g.concat_cols(parts);
}

Var Encoder::contextualize(Graph& g, Var embeddings, const std::vector<int>& sentence_starts) const {
  Var x = embeddings;
  for (std::size_t l = 0; l < forward_.size(); ++l) {
    Var f = lstm(g, x, forward_[l], sentence_starts, false);
    Var b = lstm(g, x, backward_[l], sentence_starts, true);
    x = g.dropout(g.concat_cols({f, b}), config_.lstm_dropout);
  }
  return x;
}

Var Encoder::span_representations(Graph& g, Var hidden, Var embeddings,
                                  const std::vector<Span>& spans) const {
  std::vector<int> starts, ends, widths;
  for (const auto& s : spans) {
    starts.push_back(s.start);
    ends.push_back(s.end);
    widths.push_back(width_bucket(s.width()));
  }
  Var scores = head_scorer_.apply(g, hidden);
  Var head = span_attention(g, embeddings, scores, spans);
  Var width = g.gather_rows(g.param(*width_embedding_), widths);
  return g.concat_cols({g.gather_rows(hidden, starts), g.gather_rows(hidden, ends), head, width});
}

}  // namespace arglink
