#include "arglink/nn/graph.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace arglink::nn {

Parameter& ParameterStore::add(const std::string& name, Matrix init) {
  if (index_.count(name)) throw std::logic_error("duplicate parameter: " + name);
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->grad = Matrix::Zero(init.rows(), init.cols());
  p->m = Matrix::Zero(init.rows(), init.cols());
  p->v = Matrix::Zero(init.rows(), init.cols());
  p->value = std::move(init);
  Parameter* raw = p.get();
  params_.push_back(std::move(p));
  index_[name] = raw;
  return *raw;
}

Parameter& ParameterStore::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
  return *it->second;
}

const Parameter& ParameterStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
  return *it->second;
}

std::vector<Parameter*> ParameterStore::all() {
  std::vector<Parameter*> out;
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<const Parameter*> ParameterStore::all() const {
  std::vector<const Parameter*> out;
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p->grad.setZero();
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  // Box-Muller; the second variate is discarded to keep the stream simple.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) return 0;
  return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
}

Matrix glorot_uniform(int rows, int cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-limit, limit);
  return m;
}

Matrix gaussian(int rows, int cols, double stddev, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = stddev * rng.normal();
  return m;
}

Var Graph::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Graph::input(Matrix value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Graph::param(Parameter& p) {
  Node n;
  n.value = p.value;
  n.param = &p;
  n.requires_grad = true;
  return push(std::move(n));
}

Var Graph::custom(Matrix value, std::vector<Var> inputs, Backward backward) {
  Node n;
  n.value = std::move(value);
  for (Var in : inputs) n.requires_grad = n.requires_grad || nodes_[in.id].requires_grad;
  n.inputs = std::move(inputs);
  if (n.requires_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

void Graph::backward(Var root) {
  if (nodes_[root.id].value.size() != 1) throw std::logic_error("backward root must be 1x1");
  for (auto& n : nodes_) n.grad.resize(0, 0);
  nodes_[root.id].grad = Matrix::Ones(1, 1);
  for (int i = root.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.param != nullptr) {
      n.param->grad += n.grad;
      continue;
    }
    if (!n.backward) continue;
    std::vector<Matrix*> in_grads;
    in_grads.reserve(n.inputs.size());
    for (Var in : n.inputs) {
      Node& src = nodes_[in.id];
      if (!src.requires_grad) {
        in_grads.push_back(nullptr);
        continue;
      }
      if (src.grad.size() == 0) src.grad = Matrix::Zero(src.value.rows(), src.value.cols());
      in_grads.push_back(&src.grad);
    }
    n.backward(n.grad, in_grads);
  }
}

Var Graph::matmul(Var a, Var b) {
  if (cols(a) != rows(b)) throw std::logic_error("matmul shape mismatch");
  Matrix out = value(a) * value(b);
  return custom(std::move(out), {a, b},
                [this, a, b](const Matrix& dout, std::vector<Matrix*>& in) {
                  if (in[0]) in[0]->noalias() += dout * value(b).transpose();
                  if (in[1]) in[1]->noalias() += value(a).transpose() * dout;
                });
}

Var Graph::add(Var a, Var b) {
  if (rows(a) != rows(b) || cols(a) != cols(b)) throw std::logic_error("add shape mismatch");
  Matrix out = value(a) + value(b);
  return custom(std::move(out), {a, b}, [](const Matrix& dout, std::vector<Matrix*>& in) {
    if (in[0]) *in[0] += dout;
    if (in[1]) *in[1] += dout;
  });
}

Var Graph::add_bias(Var a, Var row) {
  if (rows(row) != 1 || cols(row) != cols(a)) throw std::logic_error("bias shape mismatch");
  Matrix out = value(a).rowwise() + value(row).row(0);
  return custom(std::move(out), {a, row}, [](const Matrix& dout, std::vector<Matrix*>& in) {
    if (in[0]) *in[0] += dout;
    if (in[1]) *in[1] += dout.colwise().sum();
  });
}

Var Graph::scale(Var a, double c) {
  Matrix out = value(a) * c;
  return custom(std::move(out), {a}, [c](const Matrix& dout, std::vector<Matrix*>& in) {
    if (in[0]) *in[0] += dout * c;
  });
}

Var Graph::transpose(Var a) {
  Matrix out = value(a).transpose();
  return custom(std::move(out), {a}, [](const Matrix& dout, std::vector<Matrix*>& in) {
    if (in[0]) *in[0] += dout.transpose();
  });
}

Var Graph::cmul(Var a, Var b) {
  if (rows(a) != rows(b) || cols(a) != cols(b)) throw std::logic_error("cmul shape mismatch");
  Matrix out = value(a).cwiseProduct(value(b));
  return custom(std::move(out), {a, b},
                [this, a, b](const Matrix& dout, std::vector<Matrix*>& in) {
                  if (in[0]) *in[0] += dout.cwiseProduct(value(b));
                  if (in[1]) *in[1] += dout.cwiseProduct(value(a));
                });
}

Var Graph::relu(Var a) {
  Matrix out = value(a).cwiseMax(0.0);
  Var self{static_cast<int>(nodes_.size())};
  return custom(std::move(out), {a}, [this, self](const Matrix& dout, std::vector<Matrix*>& in) {
    if (in[0]) *in[0] += (value(self).array() > 0.0).cast<double>().matrix().cwiseProduct(dout);
  });
}

Var Graph::tanh(Var a) {
  Matrix out = value(a).array().tanh().matrix();
  Var self{static_cast<int>(nodes_.size())};
  return custom(std::move(out), {a}, [this, self](const Matrix& dout, std::vector<Matrix*>& in) {
    if (in[0]) *in[0] += ((1.0 - value(self).array().square()) * dout.array()).matrix();
  });
}

Var Graph::sigmoid(Var a) {
  Matrix out = (1.0 / (1.0 + (-value(a).array()).exp())).matrix();
  Var self{static_cast<int>(nodes_.size())};
  return custom(std::move(out), {a}, [this, self](const Matrix& dout, std::vector<Matrix*>& in) {
    const auto& y = value(self).array();
    if (in[0]) *in[0] += (y * (1.0 - y) * dout.array()).matrix();
  });
}

Var Graph::concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::logic_error("concat of nothing");
  const int n = rows(parts[0]);
  int total = 0;
  for (Var p : parts) {
    if (rows(p) != n) throw std::logic_error("concat_cols row mismatch");
    total += cols(p);
  }
  Matrix out(n, total);
  std::vector<int> offsets;
  int off = 0;
  for (Var p : parts) {
    out.middleCols(off, cols(p)) = value(p);
    offsets.push_back(off);
    off += cols(p);
  }
  return custom(std::move(out), parts,
                [offsets](const Matrix& dout, std::vector<Matrix*>& in) {
                  for (std::size_t i = 0; i < in.size(); ++i) {
                    if (in[i]) *in[i] += dout.middleCols(offsets[i], in[i]->cols());
                  }
                });
}

Var Graph::concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::logic_error("concat of nothing");
  const int d = cols(parts[0]);
  int total = 0;
  for (Var p : parts) {
    if (cols(p) != d) throw std::logic_error("concat_rows col mismatch");
    total += rows(p);
  }
  Matrix out(total, d);
  std::vector<int> offsets;
  int off = 0;
  for (Var p : parts) {
    out.middleRows(off, rows(p)) = value(p);
    offsets.push_back(off);
    off += rows(p);
  }
  return custom(std::move(out), parts,
                [offsets](const Matrix& dout, std::vector<Matrix*>& in) {
                  for (std::size_t i = 0; i < in.size(); ++i) {
                    if (in[i]) *in[i] += dout.middleRows(offsets[i], in[i]->rows());
                  }
                });
}

Var Graph::slice_rows(Var a, int start, int count) {
  if (start < 0 || count < 0 || start + count > rows(a)) throw std::logic_error("slice out of range");
  Matrix out = value(a).middleRows(start, count);
  return custom(std::move(out), {a},
                [start, count](const Matrix& dout, std::vector<Matrix*>& in) {
                  if (in[0]) in[0]->middleRows(start, count) += dout;
                });
}

Var Graph::gather_rows(Var a, const std::vector<int>& index) {
  const Matrix& src = value(a);
  Matrix out(static_cast<Eigen::Index>(index.size()), src.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || index[i] >= src.rows()) throw std::logic_error("gather index out of range");
    out.row(static_cast<Eigen::Index>(i)) = src.row(index[i]);
  }
  return custom(std::move(out), {a}, [index](const Matrix& dout, std::vector<Matrix*>& in) {
    if (!in[0]) return;
    for (std::size_t i = 0; i < index.size(); ++i) {
      in[0]->row(index[i]) += dout.row(static_cast<Eigen::Index>(i));
    }
  });
}

Var Graph::row_sum(Var a) {
  Matrix out = value(a).rowwise().sum();
  const int d = cols(a);
  return custom(std::move(out), {a}, [d](const Matrix& dout, std::vector<Matrix*>& in) {
    if (in[0]) *in[0] += dout.replicate(1, d);
  });
}

Var Graph::sum(Var a) {
  Matrix out(1, 1);
  out(0, 0) = value(a).sum();
  return custom(std::move(out), {a}, [](const Matrix& dout, std::vector<Matrix*>& in) {
    if (in[0]) in[0]->array() += dout(0, 0);
  });
}

Var Graph::dropout(Var a, double p) {
  if (!training() || p <= 0.0) return a;
  if (p >= 1.0) throw std::logic_error("dropout probability must be < 1");
  const Matrix& x = value(a);
  Matrix mask(x.rows(), x.cols());
  const double keep = 1.0 - p;
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng_->uniform() < keep ? 1.0 / keep : 0.0;
  }
  Matrix out = x.cwiseProduct(mask);
  return custom(std::move(out), {a}, [mask](const Matrix& dout, std::vector<Matrix*>& in) {
    if (in[0]) *in[0] += dout.cwiseProduct(mask);
  });
}

Var Graph::row_dropout(Var a, double p) {
  if (!training() || p <= 0.0) return a;
  if (p >= 1.0) throw std::logic_error("dropout probability must be < 1");
  const Matrix& x = value(a);
  const double keep = 1.0 - p;
  Eigen::VectorXd mask(x.rows());
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask(i) = rng_->uniform() < keep ? 1.0 / keep : 0.0;
  Matrix out = mask.asDiagonal() * x;
  return custom(std::move(out), {a}, [mask](const Matrix& dout, std::vector<Matrix*>& in) {
    if (in[0]) *in[0] += mask.asDiagonal() * dout;
  });
}

Linear Linear::create(ParameterStore& store, const std::string& name, int in, int out,
                      Rng& rng, bool with_bias) {
  Linear l;
  l.weight = &store.add(name + ".weight", glorot_uniform(in, out, rng));
  if (with_bias) l.bias = &store.add(name + ".bias", Matrix::Zero(1, out));
  return l;
}

Var Linear::apply(Graph& g, Var x) const {
  Var y = g.matmul(x, g.param(*weight));
  if (bias) y = g.add_bias(y, g.param(*bias));
  return y;
}

FeedForward FeedForward::create(ParameterStore& store, const std::string& name, int in,
                                int hidden, int depth, double dropout, Rng& rng) {
  FeedForward f;
  f.dropout = dropout;
  int dim = in;
  for (int i = 0; i < depth; ++i) {
    f.layers.push_back(Linear::create(store, name + "." + std::to_string(i), dim, hidden, rng));
    dim = hidden;
  }
  return f;
}

Var FeedForward::apply(Graph& g, Var x) const {
  for (const Linear& l : layers) x = g.dropout(g.relu(l.apply(g, x)), dropout);
  return x;
}

Scorer Scorer::create(ParameterStore& store, const std::string& name, int in, int hidden,
                      int depth, double dropout, Rng& rng) {
  Scorer s;
  s.ffnn = FeedForward::create(store, name, in, hidden, depth, dropout, rng);
  s.head = Linear::create(store, name + ".head", hidden, 1, rng, false);
  return s;
}

Var Scorer::apply(Graph& g, Var x) const { return head.apply(g, ffnn.apply(g, x)); }

}  // namespace arglink::nn
