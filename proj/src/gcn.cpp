#include "golf/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "golf/error.hpp"
#include "golf/kernels.hpp"

namespace golf {

void check(const TrainConfig& c) {
  if (!(c.learning_rate > 0.0)) throw ParameterError("learning rate must be positive");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw ParameterError("dropout must lie in [0, 1)");
  if (!(c.weight_decay >= 0.0)) throw ParameterError("weight decay must be non-negative");
  if (c.hidden_units < 1) throw ParameterError("need at least one hidden unit");
  if (c.num_layers < 2) throw ParameterError("a GCN needs at least two layers");
}

SparseMatrix normalized_adjacency(const Graph& graph) {
  const std::size_t n = graph.num_nodes;
  SparseMatrix s;
  s.rows = s.cols = n;
  s.offsets.assign(n + 1, 0);
  s.indices.reserve(graph.adjacency.size() + n);
  s.values.reserve(graph.adjacency.size() + n);
  std::vector<double> inv_sqrt(n);
  for (NodeId i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(graph.degree(i) + 1));
  for (NodeId i = 0; i < n; ++i) {
    bool self_done = false;
    for (NodeId j : graph.neighbors(i)) {
      if (!self_done && j > i) {
        s.indices.push_back(i);
        s.values.push_back(inv_sqrt[i] * inv_sqrt[i]);
        self_done = true;
      }
      s.indices.push_back(j);
      s.values.push_back(inv_sqrt[i] * inv_sqrt[j]);
    }
    if (!self_done) {
      s.indices.push_back(i);
      s.values.push_back(inv_sqrt[i] * inv_sqrt[i]);
    }
    s.offsets[i + 1] = s.indices.size();
  }
  return s;
}

SparseMatrix input_features(const Graph& graph, bool row_normalize) {
  SparseMatrix s;
  s.rows = graph.num_nodes;
  s.cols = graph.feature_dim;
  s.offsets.assign(graph.num_nodes + 1, 0);
  for (NodeId i = 0; i < graph.num_nodes; ++i) {
    auto row = graph.feature_row(i);
    double sum = 0.0;
    for (float v : row) sum += v;
    const double scale = (row_normalize && sum != 0.0) ? 1.0 / sum : 1.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] == 0.0f) continue;
      s.indices.push_back(static_cast<std::uint32_t>(c));
      s.values.push_back(static_cast<double>(row[c]) * scale);
    }
    s.offsets[i + 1] = s.indices.size();
  }
  return s;
}

void multiply(const SparseMatrix& s, const Matrix& in, Matrix& out) {
  if (in.rows != s.cols) throw ContractViolation("sparse multiply: inner dimensions differ");
  out = Matrix(s.rows, in.cols);
  for (std::size_t i = 0; i < s.rows; ++i) {
    auto dst = out.row(i);
    for (std::size_t p = s.offsets[i]; p < s.offsets[i + 1]; ++p) kernels::axpy(s.values[p], in.row(s.indices[p]), dst);
  }
}

namespace {

// out = in * w, in dense
void dense_times(const Matrix& in, const Matrix& w, Matrix& out) {
  out = Matrix(in.rows, w.cols);
  for (std::size_t i = 0; i < in.rows; ++i) {
    auto dst = out.row(i);
    for (std::size_t p = 0; p < in.cols; ++p) {
      const double a = in(i, p);
      if (a != 0.0) kernels::axpy(a, w.row(p), dst);
    }
  }
}

// grad += in^T * delta
void accumulate_transpose_times(const Matrix& in, const Matrix& delta, Matrix& grad) {
  for (std::size_t i = 0; i < in.rows; ++i) {
    for (std::size_t p = 0; p < in.cols; ++p) {
      const double a = in(i, p);
      if (a != 0.0) kernels::axpy(a, delta.row(i), grad.row(p));
    }
  }
}

void accumulate_transpose_times(const SparseMatrix& in, const Matrix& delta, Matrix& grad) {
  for (std::size_t i = 0; i < in.rows; ++i) {
    for (std::size_t p = in.offsets[i]; p < in.offsets[i + 1]; ++p) {
      kernels::axpy(in.values[p], delta.row(i), grad.row(in.indices[p]));
    }
  }
}

// out = delta * w^T
void times_transpose(const Matrix& delta, const Matrix& w, Matrix& out) {
  out = Matrix(delta.rows, w.rows);
  for (std::size_t i = 0; i < delta.rows; ++i) {
    for (std::size_t p = 0; p < w.rows; ++p) out(i, p) = kernels::dot(delta.row(i), w.row(p));
  }
}

void softmax_rows(Matrix& m) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    auto r = m.row(i);
    const double hi = *std::max_element(r.begin(), r.end());
    double sum = 0.0;
    for (double& v : r) {
      v = std::exp(v - hi);
      sum += v;
    }
    for (double& v : r) v /= sum;
  }
}

// Activations kept for the backward pass.
struct Trace {
  SparseMatrix input;                 // first-layer input after dropout
  std::vector<Matrix> hidden_inputs;  // inputs of layers 1.. after dropout
  std::vector<Matrix> hidden_masks;   // dropout scale per entry (0 or 1/(1-p))
  std::vector<Matrix> pre;            // A_hat * X * W per layer
  Matrix probabilities;
};

SparseMatrix drop_sparse(const SparseMatrix& x, double p, std::mt19937_64& rng) {
  SparseMatrix out = x;
  std::bernoulli_distribution keep(1.0 - p);
  const double scale = 1.0 / (1.0 - p);
  for (double& v : out.values) v = keep(rng) ? v * scale : 0.0;
  return out;
}

Trace run_forward(const GcnModel& model, const SparseMatrix& features, bool train_mode, double dropout,
                  std::mt19937_64& rng) {
  if (model.weights.empty() || features.cols != model.weights.front().rows) {
    throw ContractViolation("feature dimension does not match the first layer");
  }
  if (features.rows != model.propagation.rows) throw ContractViolation("feature rows do not match the graph");
  const bool drop = train_mode && dropout > 0.0;
  Trace t;
  t.input = drop ? drop_sparse(features, dropout, rng) : features;

  Matrix projected(features.rows, model.weights[0].cols);
  for (std::size_t i = 0; i < t.input.rows; ++i) {
    auto dst = projected.row(i);
    for (std::size_t p = t.input.offsets[i]; p < t.input.offsets[i + 1]; ++p) {
      if (t.input.values[p] != 0.0) kernels::axpy(t.input.values[p], model.weights[0].row(t.input.indices[p]), dst);
    }
  }
  Matrix pre;
  multiply(model.propagation, projected, pre);
  t.pre.push_back(pre);

  for (std::size_t l = 1; l < model.num_layers(); ++l) {
    Matrix h = t.pre.back();
    Matrix mask(h.rows, h.cols);
    std::bernoulli_distribution keep(1.0 - dropout);
    const double scale = drop ? 1.0 / (1.0 - dropout) : 1.0;
    for (std::size_t e = 0; e < h.data.size(); ++e) {
      const double relu = std::max(h.data[e], 0.0);
      mask.data[e] = (!drop || keep(rng)) ? scale : 0.0;
      h.data[e] = relu * mask.data[e];
    }
    dense_times(h, model.weights[l], projected);
    multiply(model.propagation, projected, pre);
    t.hidden_inputs.push_back(std::move(h));
    t.hidden_masks.push_back(std::move(mask));
    t.pre.push_back(pre);
  }
  t.probabilities = t.pre.back();
  softmax_rows(t.probabilities);
  return t;
}

}  // namespace

GcnModel make_model(const Graph& graph, std::size_t input_dim, std::size_t num_classes, const TrainConfig& config,
                    std::mt19937_64& rng) {
  check(config);
  if (num_classes < 1) throw ParameterError("model needs at least one output class");
  GcnModel model;
  model.propagation = normalized_adjacency(graph);
  std::size_t in = input_dim;
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    const std::size_t out = (l + 1 == config.num_layers) ? num_classes : config.hidden_units;
    Matrix w(in, out);
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> init(-limit, limit);
    for (double& v : w.data) v = init(rng);
    model.weights.push_back(std::move(w));
    in = out;
  }
  return model;
}

Matrix forward(const GcnModel& model, const SparseMatrix& features, bool train_mode, double dropout,
               std::mt19937_64& rng) {
  return run_forward(model, features, train_mode, dropout, rng).probabilities;
}

LossAndGradients loss_and_gradients(const GcnModel& model, const SparseMatrix& features, const Supervision& sup,
                                    double dropout, double weight_decay, std::mt19937_64& rng) {
  if (sup.nodes.empty()) throw ContractViolation("loss needs at least one labeled node");
  Trace t = run_forward(model, features, true, dropout, rng);
  const std::size_t layers = model.num_layers();
  const std::size_t classes = model.num_classes();
  const double inv_count = 1.0 / static_cast<double>(sup.nodes.size());

  LossAndGradients out;
  Matrix delta(t.probabilities.rows, classes);  // dLoss / d pre-activation of the current layer
  for (NodeId v : sup.nodes) {
    const auto y = static_cast<std::size_t>(sup.labels[v]);
    if (y >= classes) throw ContractViolation("label outside the model's class range");
    out.data_loss -= std::log(std::max(t.probabilities(v, y), 1e-300)) * inv_count;
    for (std::size_t c = 0; c < classes; ++c) delta(v, c) = t.probabilities(v, c) * inv_count;
    delta(v, y) -= inv_count;
  }
  double l2 = 0.0;
  for (double w : model.weights[0].data) l2 += w * w;
  out.loss = out.data_loss + 0.5 * weight_decay * l2;

  out.gradients.resize(layers);
  Matrix back;
  for (std::size_t l = layers; l-- > 0;) {
    multiply(model.propagation, delta, back);  // A_hat is symmetric
    Matrix grad(model.weights[l].rows, model.weights[l].cols);
    if (l == 0) {
      accumulate_transpose_times(t.input, back, grad);
      for (std::size_t e = 0; e < grad.data.size(); ++e) grad.data[e] += weight_decay * model.weights[0].data[e];
    } else {
      const Matrix& h = t.hidden_inputs[l - 1];
      accumulate_transpose_times(h, back, grad);
      Matrix dh;
      times_transpose(back, model.weights[l], dh);
      const Matrix& mask = t.hidden_masks[l - 1];
      const Matrix& pre = t.pre[l - 1];
      for (std::size_t e = 0; e < dh.data.size(); ++e) {
        dh.data[e] = pre.data[e] > 0.0 ? dh.data[e] * mask.data[e] : 0.0;
      }
      delta = std::move(dh);
    }
    out.gradients[l] = std::move(grad);
  }
  return out;
}

double accuracy(const Matrix& probabilities, std::span<const NodeId> nodes, std::span<const std::int32_t> labels) {
  if (nodes.empty()) return 0.0;
  std::size_t hits = 0;
  for (NodeId v : nodes) {
    auto r = probabilities.row(v);
    const auto pred = static_cast<std::int32_t>(std::max_element(r.begin(), r.end()) - r.begin());
    if (pred == labels[v]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(nodes.size());
}

TrainResult train(const Graph& graph, const SparseMatrix& features, const Supervision& sup,
                  const TrainConfig& config) {
  check(config);
  if (sup.nodes.empty()) throw ParameterError("training needs at least one labeled node");
  std::mt19937_64 rng(config.seed);
  std::size_t classes = graph.num_classes;
  for (NodeId v : sup.nodes) classes = std::max(classes, static_cast<std::size_t>(sup.labels[v]) + 1);
  TrainResult result{make_model(graph, features.cols, classes, config, rng), {}};
  GcnModel& model = result.model;

  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<Matrix> m, v;
  for (const auto& w : model.weights) {
    m.emplace_back(w.rows, w.cols);
    v.emplace_back(w.rows, w.cols);
  }
  result.curve.reserve(config.epochs);
  double b1t = 1.0, b2t = 1.0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    auto lg = loss_and_gradients(model, features, sup, config.dropout, config.weight_decay, rng);
    if (!std::isfinite(lg.loss)) {
      throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) + " (lr=" +
                            std::to_string(config.learning_rate) + ")");
    }
    b1t *= beta1;
    b2t *= beta2;
    const double step = config.learning_rate * std::sqrt(1.0 - b2t) / (1.0 - b1t);
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
      auto& w = model.weights[l].data;
      const auto& g = lg.gradients[l].data;
      auto& ml = m[l].data;
      auto& vl = v[l].data;
      for (std::size_t e = 0; e < w.size(); ++e) {
        ml[e] = beta1 * ml[e] + (1.0 - beta1) * g[e];
        vl[e] = beta2 * vl[e] + (1.0 - beta2) * g[e] * g[e];
        w[e] -= step * ml[e] / (std::sqrt(vl[e]) + eps);
      }
    }
    std::mt19937_64 unused;
    const Matrix probs = forward(model, features, false, 0.0, unused);
    result.curve.push_back({lg.loss, accuracy(probs, sup.nodes, sup.labels)});
  }
  return result;
}

TrainResult train(const Graph& graph, std::span<const NodeId> labeled, const TrainConfig& config) {
  if (!graph.has_labels()) throw ParameterError("training needs a labeled graph");
  const SparseMatrix features = input_features(graph, config.row_normalize);
  return train(graph, features, Supervision{labeled, graph.labels}, config);
}

double evaluate(const GcnModel& model, const SparseMatrix& features, std::span<const NodeId> test_nodes,
                std::span<const std::int32_t> labels, std::span<const NodeId> labeled) {
  if (test_nodes.empty()) throw ParameterError("test set is empty");
  if (!labeled.empty()) {
    std::unordered_set<NodeId> train_set(labeled.begin(), labeled.end());
    for (NodeId v : test_nodes) {
      if (train_set.count(v)) throw ContractViolation("test node " + std::to_string(v) + " is also labeled");
    }
  }
  std::mt19937_64 unused;
  const Matrix probs = forward(model, features, false, 0.0, unused);
  return accuracy(probs, test_nodes, labels);
}

}  // namespace golf
