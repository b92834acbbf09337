#pragma once

// Minimal full-batch GCN: H' = act(A_hat * dropout(H) * W), softmax output,
// masked cross-entropy, hand-written backward pass, Adam.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "golf/graph.hpp"

namespace golf {

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 200;
  double dropout = 0.5;
  double weight_decay = 5e-4;  // L2 on the first layer's weights
  std::size_t hidden_units = 16;
  std::size_t num_layers = 2;
  std::uint64_t seed = 0;
  bool row_normalize = true;  // scale each input feature row to unit sum
};

void check(const TrainConfig& config);

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Row-compressed sparse matrix. Used for both the propagation operator and
// the (mostly zero) input features.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
};

// D^-1/2 (A + I) D^-1/2 including the self-loop entries. Symmetric.
SparseMatrix normalized_adjacency(const Graph& graph);

SparseMatrix input_features(const Graph& graph, bool row_normalize);

// out = S * in
void multiply(const SparseMatrix& s, const Matrix& in, Matrix& out);

struct GcnModel {
  std::vector<Matrix> weights;  // layer l maps weights[l].rows -> weights[l].cols
  SparseMatrix propagation;

  std::size_t num_layers() const { return weights.size(); }
  std::size_t num_classes() const { return weights.empty() ? 0 : weights.back().cols; }
};

// Glorot-uniform weights for dims in -> hidden ... hidden -> classes.
GcnModel make_model(const Graph& graph, std::size_t input_dim, std::size_t num_classes, const TrainConfig& config,
                    std::mt19937_64& rng);

// Row-wise class probabilities. Dropout is active only in train mode.
Matrix forward(const GcnModel& model, const SparseMatrix& features, bool train_mode, double dropout,
               std::mt19937_64& rng);

struct Supervision {
  std::span<const NodeId> nodes;          // labeled nodes
  std::span<const std::int32_t> labels;   // indexed by node id
};

struct LossAndGradients {
  double loss = 0.0;
  double data_loss = 0.0;  // cross-entropy part
  std::vector<Matrix> gradients;  // same shapes as model.weights
};

// Mean cross-entropy over the labeled nodes plus weight_decay * |W_0|^2 / 2.
LossAndGradients loss_and_gradients(const GcnModel& model, const SparseMatrix& features, const Supervision& sup,
                                    double dropout, double weight_decay, std::mt19937_64& rng);

struct EpochStats {
  double loss;
  double train_accuracy;
};

struct TrainResult {
  GcnModel model;
  std::vector<EpochStats> curve;
};

// Throws DivergenceError on a non-finite loss.
TrainResult train(const Graph& graph, const SparseMatrix& features, const Supervision& sup,
                  const TrainConfig& config);
TrainResult train(const Graph& graph, std::span<const NodeId> labeled, const TrainConfig& config);

// Fraction of test nodes whose argmax matches the label. Throws
// ParameterError for an empty test set and ContractViolation when a test
// node is also labeled.
double evaluate(const GcnModel& model, const SparseMatrix& features, std::span<const NodeId> test_nodes,
                std::span<const std::int32_t> labels, std::span<const NodeId> labeled = {});
double accuracy(const Matrix& probabilities, std::span<const NodeId> nodes, std::span<const std::int32_t> labels);

}  // namespace golf
