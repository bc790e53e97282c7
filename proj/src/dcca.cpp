#include "dlu/dcca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "dlu/errors.hpp"
#include "dlu/rng.hpp"

namespace dlu {

namespace {

std::vector<int> layer_widths(const NetworkSpec& spec) {
  std::vector<int> w;
  w.push_back(spec.input_dim);
  for (int h : spec.hidden_widths) w.push_back(h);
  w.push_back(spec.output_dim);
  return w;
}

Network init_network(const NetworkSpec& spec, Rng& rng) {
  Network net;
  net.spec = spec;
  const auto widths = layer_widths(spec);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Layer layer;
    const int fan_in = widths[l];
    const int fan_out = widths[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    layer.weights.resize(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) layer.weights(r, c) = bound * rng.symmetric();
    layer.bias = Eigen::VectorXd::Zero(fan_out);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

void ascend(Network& net, const NetGrads& grads, double lr) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    net.layers[l].weights += lr * grads.d_weights[l];
    net.layers[l].bias += lr * grads.d_bias[l];
  }
}

int clamped_k(const CcaConfig& cfg, Eigen::Index d1, Eigen::Index d2) {
  return static_cast<int>(
      std::min<Eigen::Index>(cfg.num_components_k, std::min(d1, d2)));
}

}  // namespace

DccaModel init_model(const NetworkSpec& spec1, const NetworkSpec& spec2,
                     std::uint64_t seed) {
  if (spec1.output_dim != spec2.output_dim)
    throw SpecMismatch("network output dimensions differ");
  if (spec1.input_dim < 1 || spec1.output_dim < 1 || spec2.input_dim < 1)
    throw SpecMismatch("network dimensions must be positive");
  Rng rng(seed);
  DccaModel model;
  model.net1 = init_network(spec1, rng);
  model.net2 = init_network(spec2, rng);
  return model;
}

Eigen::MatrixXd forward(const Network& net, const Eigen::MatrixXd& x,
                        ForwardCache* cache) {
  if (x.rows() != net.spec.input_dim)
    throw DimensionMismatch("input variable count does not match network spec");
  Eigen::MatrixXd a = x;
  if (cache) {
    cache->inputs.clear();
    cache->preactivations.clear();
  }
  for (const Layer& layer : net.layers) {
    if (cache) cache->inputs.push_back(a);
    Eigen::MatrixXd z = (layer.weights * a).colwise() + layer.bias;
    if (cache) cache->preactivations.push_back(z);
    a = (net.spec.activation == Activation::Tanh) ? z.array().tanh().matrix() : z;
  }
  return a;
}

NetGrads backward(const Network& net, const ForwardCache& cache,
                  const Eigen::MatrixXd& d_output) {
  NetGrads grads;
  grads.d_weights.resize(net.layers.size());
  grads.d_bias.resize(net.layers.size());
  Eigen::MatrixXd da = d_output;
  for (std::size_t i = net.layers.size(); i-- > 0;) {
    Eigen::MatrixXd dz;
    if (net.spec.activation == Activation::Tanh) {
      const Eigen::ArrayXXd t = cache.preactivations[i].array().tanh();
      dz = (da.array() * (1.0 - t * t)).matrix();
    } else {
      dz = da;
    }
    grads.d_weights[i] = dz * cache.inputs[i].transpose();
    grads.d_bias[i] = dz.rowwise().sum();
    da = net.layers[i].weights.transpose() * dz;
  }
  return grads;
}

DccaModel train(const UtteranceMatrix& utt1, const UtteranceMatrix& utt2,
                const NetworkSpec& spec1, const NetworkSpec& spec2,
                const TrainConfig& tc) {
  if (utt1.dim_p() != utt2.dim_p())
    throw DimensionMismatch("views disagree on feature dimension");
  if (utt1.dim_p() < 2) throw TooFewSamples("need feature dimension >= 2");
  if (spec1.input_dim != utt1.token_count() || spec2.input_dim != utt2.token_count())
    throw SpecMismatch("network input dimensions must match token counts");

  DccaModel model = init_model(spec1, spec2, tc.seed);
  CcaConfig cca = tc.cca;
  cca.num_components_k = clamped_k(cca, spec1.output_dim, spec2.output_dim);

  // variables = tokens, samples = features
  const Eigen::MatrixXd& x1 = utt1.rows;
  const Eigen::MatrixXd& x2 = utt2.rows;

  double prev = -std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= tc.max_iters; ++iter) {
    ForwardCache c1, c2;
    const Eigen::MatrixXd h1 = forward(model.net1, x1, &c1);
    const Eigen::MatrixXd h2 = forward(model.net2, x2, &c2);
    const CorrGrad cg = corr_objective_grad(h1, h2, cca);
    if (!std::isfinite(cg.objective)) throw NonFiniteLoss();
    model.train_log.emplace_back(iter, cg.objective);
    if (cg.objective - prev < tc.tol && iter > 1) break;
    prev = cg.objective;
    ascend(model.net1, backward(model.net1, c1, cg.grad1), tc.learning_rate);
    ascend(model.net2, backward(model.net2, c2, cg.grad2), tc.learning_rate);
  }

  const Eigen::MatrixXd h1 = forward(model.net1, x1);
  const Eigen::MatrixXd h2 = forward(model.net2, x2);
  model.cca_on_outputs = fit_cca(h1, h2, cca);
  return model;
}

DccaProjection transform(const DccaModel& model, const UtteranceMatrix& utt1,
                         const UtteranceMatrix& utt2) {
  const Eigen::MatrixXd h1 = forward(model.net1, utt1.rows);
  const Eigen::MatrixXd h2 = forward(model.net2, utt2.rows);
  DccaProjection out;
  out.lambda1 = h1.transpose() * model.cca_on_outputs.weights_a;
  out.lambda2 = h2.transpose() * model.cca_on_outputs.weights_b;
  out.correlations = model.cca_on_outputs.correlations;
  return out;
}

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

json network_to_json(const Network& net) {
  json j;
  j["input_dim"] = net.spec.input_dim;
  j["hidden_widths"] = net.spec.hidden_widths;
  j["output_dim"] = net.spec.output_dim;
  j["activation"] = net.spec.activation == Activation::Tanh ? "tanh" : "identity";
  json layers = json::array();
  for (const Layer& l : net.layers) {
    layers.push_back({{"weights", matrix_to_json(l.weights)},
                      {"bias", vector_to_json(l.bias)}});
  }
  j["layers"] = std::move(layers);
  return j;
}

Network network_from_json(const json& j) {
  Network net;
  net.spec.input_dim = j.at("input_dim").get<int>();
  net.spec.hidden_widths = j.at("hidden_widths").get<std::vector<int>>();
  net.spec.output_dim = j.at("output_dim").get<int>();
  net.spec.activation =
      j.at("activation").get<std::string>() == "tanh" ? Activation::Tanh
                                                      : Activation::Identity;
  for (const auto& lj : j.at("layers")) {
    Layer l;
    l.weights = matrix_from_json(lj.at("weights"));
    l.bias = vector_from_json(lj.at("bias"));
    net.layers.push_back(std::move(l));
  }
  return net;
}

json cca_to_json(const CcaSolution& s) {
  return {{"weights_a", matrix_to_json(s.weights_a)},
          {"weights_b", matrix_to_json(s.weights_b)},
          {"correlations", vector_to_json(s.correlations)},
          {"proj_1", matrix_to_json(s.proj_1)},
          {"proj_2", matrix_to_json(s.proj_2)},
          {"objective", s.objective}};
}

CcaSolution cca_from_json(const json& j) {
  CcaSolution s;
  s.weights_a = matrix_from_json(j.at("weights_a"));
  s.weights_b = matrix_from_json(j.at("weights_b"));
  s.correlations = vector_from_json(j.at("correlations"));
  s.proj_1 = matrix_from_json(j.at("proj_1"));
  s.proj_2 = matrix_from_json(j.at("proj_2"));
  s.objective = j.at("objective").get<double>();
  return s;
}

}  // namespace

std::string serialize_model(const DccaModel& model) {
  json j;
  j["schema_version"] = 1;
  j["net1"] = network_to_json(model.net1);
  j["net2"] = network_to_json(model.net2);
  j["cca_on_outputs"] = cca_to_json(model.cca_on_outputs);
  json log = json::array();
  for (const auto& [it, obj] : model.train_log) log.push_back({it, obj});
  j["train_log"] = std::move(log);
  return j.dump(2);
}

DccaModel deserialize_model(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("schema_version").get<int>() != 1)
    throw ConfigError("unsupported model schema version");
  DccaModel model;
  model.net1 = network_from_json(j.at("net1"));
  model.net2 = network_from_json(j.at("net2"));
  model.cca_on_outputs = cca_from_json(j.at("cca_on_outputs"));
  for (const auto& e : j.at("train_log"))
    model.train_log.emplace_back(e[0].get<int>(), e[1].get<double>());
  return model;
}

}  // namespace dlu
