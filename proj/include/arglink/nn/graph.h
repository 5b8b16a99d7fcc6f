// Minimal reverse-mode automatic differentiation over dense matrices.
//
// A Graph is built fresh for every forward pass. Each node owns its value and,
// once backward() runs, its gradient. Parameters live outside the graph in a
// ParameterStore; a parameter leaf accumulates into Parameter::grad.
//
// Convention: matrices are row-major and rows index items (tokens, spans,
// event-role pairs) while columns index features.

#ifndef ARGLINK_NN_GRAPH_H_
#define ARGLINK_NN_GRAPH_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace arglink::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  // Adam moments.
  Matrix m;
  Matrix v;
};

// Owns all learned tensors of a model. Insertion order is the canonical order
// for checkpoints and optimizer updates.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;

  Parameter& add(const std::string& name, Matrix init);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::map<std::string, Parameter*> index_;
};

// Deterministic generator used for initialization and dropout. The mapping
// from engine output to doubles is done by hand so that results do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);
  double normal();
  std::uint64_t below(std::uint64_t n);   // [0, n)
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

Matrix glorot_uniform(int rows, int cols, Rng& rng);
Matrix gaussian(int rows, int cols, double stddev, Rng& rng);

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

class Graph {
 public:
  // Gradients for custom ops: `out_grad` is dL/d(output); `in_grads[i]` is the
  // accumulator for input i, or nullptr when that input needs no gradient.
  using Backward =
      std::function<void(const Matrix& out_grad, std::vector<Matrix*>& in_grads)>;

  // When `rng` is null dropout is the identity.
  explicit Graph(Rng* rng = nullptr) : rng_(rng) {}

  bool training() const { return rng_ != nullptr; }
  Rng* rng() { return rng_; }

  Var input(Matrix value);
  Var param(Parameter& p);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  double scalar(Var v) const { return nodes_[v.id].value(0, 0); }
  int rows(Var v) const { return static_cast<int>(nodes_[v.id].value.rows()); }
  int cols(Var v) const { return static_cast<int>(nodes_[v.id].value.cols()); }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  Var custom(Matrix value, std::vector<Var> inputs, Backward backward);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var add_bias(Var a, Var row);
  Var scale(Var a, double c);
  Var transpose(Var a);
  Var cmul(Var a, Var b);
  Var relu(Var a);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var concat_cols(const std::vector<Var>& parts);
  Var concat_rows(const std::vector<Var>& parts);
  Var slice_rows(Var a, int start, int count);
  Var gather_rows(Var a, const std::vector<int>& index);
  // Sums each row: n x d -> n x 1.
  Var row_sum(Var a);
  Var sum(Var a);
  // Inverted dropout; identity outside training.
  Var dropout(Var a, double p);
  // Drops whole rows at once.
  Var row_dropout(Var a, double p);

  // Runs reverse accumulation from a 1x1 root.
  void backward(Var root);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::vector<Var> inputs;
    Backward backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };

  Var push(Node node);

  std::vector<Node> nodes_;
  Rng* rng_;
};

// Dense layer y = x W + b.
struct Linear {
  Parameter* weight = nullptr;
  Parameter* bias = nullptr;

  static Linear create(ParameterStore& store, const std::string& name, int in, int out,
                       Rng& rng, bool with_bias = true);
  Var apply(Graph& g, Var x) const;
  int in_dim() const { return static_cast<int>(weight->value.rows()); }
  int out_dim() const { return static_cast<int>(weight->value.cols()); }
};

// Stack of ReLU layers with dropout after each hidden layer.
struct FeedForward {
  std::vector<Linear> layers;
  double dropout = 0.0;

  static FeedForward create(ParameterStore& store, const std::string& name, int in,
                            int hidden, int depth, double dropout, Rng& rng);
  Var apply(Graph& g, Var x) const;
  int out_dim() const { return layers.back().out_dim(); }
};

// FeedForward followed by a bias-free linear head producing one score per row.
struct Scorer {
  FeedForward ffnn;
  Linear head;

  static Scorer create(ParameterStore& store, const std::string& name, int in, int hidden,
                       int depth, double dropout, Rng& rng);
  Var apply(Graph& g, Var x) const;
};

}  // namespace arglink::nn

#endif  // ARGLINK_NN_GRAPH_H_
