#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dlu/cca.hpp"

namespace dlu {

enum class Activation { Tanh, Identity };

struct NetworkSpec {
  int input_dim = 0;
  std::vector<int> hidden_widths;  // empty + Identity = single linear map
  int output_dim = 0;
  Activation activation = Activation::Tanh;
};

struct Layer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
};

struct Network {
  NetworkSpec spec;
  std::vector<Layer> layers;
};

struct TrainConfig {
  double learning_rate = 1e-2;
  int max_iters = 500;
  double tol = 1e-7;
  std::uint64_t seed = 0;
  CcaConfig cca;
};

// Two feed-forward networks plus the linear CCA fitted on their outputs.
struct DccaModel {
  Network net1;
  Network net2;
  CcaSolution cca_on_outputs;
  std::vector<std::pair<int, double>> train_log;  // (iteration, objective)
};

struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;          // activation entering each layer
  std::vector<Eigen::MatrixXd> preactivations;  // affine output of each layer
};

DccaModel init_model(const NetworkSpec& spec1, const NetworkSpec& spec2,
                     std::uint64_t seed);

// x is variables x samples, variables = spec.input_dim.
Eigen::MatrixXd forward(const Network& net, const Eigen::MatrixXd& x,
                        ForwardCache* cache = nullptr);

// Backpropagates dObjective/dOutput to per-layer parameter gradients.
struct NetGrads {
  std::vector<Eigen::MatrixXd> d_weights;
  std::vector<Eigen::VectorXd> d_bias;
};
NetGrads backward(const Network& net, const ForwardCache& cache,
                  const Eigen::MatrixXd& d_output);

// Full-batch gradient ascent on the total canonical correlation of the
// network outputs; a fresh model per utterance pair.
DccaModel train(const UtteranceMatrix& utt1, const UtteranceMatrix& utt2,
                const NetworkSpec& spec1, const NetworkSpec& spec2,
                const TrainConfig& tc);

struct DccaProjection {
  Eigen::MatrixXd lambda1;        // p x k
  Eigen::MatrixXd lambda2;        // p x k
  Eigen::VectorXd correlations;   // k
};

DccaProjection transform(const DccaModel& model, const UtteranceMatrix& utt1,
                         const UtteranceMatrix& utt2);

// Versioned JSON dump; round-trips exactly.
std::string serialize_model(const DccaModel& model);
DccaModel deserialize_model(const std::string& text);

}  // namespace dlu
