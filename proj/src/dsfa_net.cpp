#include "dsfa/dsfa_net.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dsfa/linear_sfa.hpp"
#include "dsfa/rng.hpp"

namespace dsfa {
namespace {

Matrix apply_activation(const Matrix& Z, Activation act) {
  if (act == Activation::Tanh) return Z.array().tanh();
  return (1.0 / (1.0 + (-Z.array()).exp())).matrix();
}

// Derivative expressed in terms of the layer output h = s(z).
Matrix activation_deriv(const Matrix& H, Activation act) {
  if (act == Activation::Tanh) return (1.0 - H.array().square()).matrix();
  return (H.array() * (1.0 - H.array())).matrix();
}

NetworkParams init_one(Rng& rng, const std::vector<Index>& dims, Activation act) {
  NetworkParams net;
  net.activation = act;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const Index h_in = dims[l];
    const Index h_out = dims[l + 1];
    LayerParams layer;
    layer.weights.resize(h_out, h_in);
    const double bound = std::sqrt(6.0 / static_cast<double>(h_in + h_out));
    for (Index j = 0; j < h_in; ++j)
      for (Index i = 0; i < h_out; ++i) layer.weights(i, j) = rng.uniform(-bound, bound);
    layer.bias = Vector::Zero(h_out);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

struct LossGrads {
  double loss = 0.0;
  Matrix gx;
  Matrix gy;
};

// Shared core for dsfa_loss and loss_feature_grad.
LossGrads loss_and_feature_grads(const Matrix& Xc, const Matrix& Yc, double r,
                                 bool want_grads) {
  const CovTriple cov = covariances(Xc, Yc, r);
  const Matrix& A = cov.sigma_xy;
  const Matrix B = 0.5 * (cov.sigma_xx + cov.sigma_yy);

  Eigen::LLT<Matrix> llt(B);
  if (llt.info() != Eigen::Success)
    throw std::logic_error("dsfa_loss: B is not positive definite despite r > 0");

  const Matrix Binv = llt.solve(Matrix::Identity(B.rows(), B.cols()));
  const Matrix P = Binv * A;  // B^-1 A

  LossGrads out;
  out.loss = (P * P).trace();
  if (!want_grads) return out;

  const double n = static_cast<double>(Xc.cols());
  Matrix grad_a = 2.0 * P * Binv;            // 2 B^-1 A B^-1
  Matrix grad_b = -2.0 * P * P * Binv;       // -2 B^-1 A B^-1 A B^-1
  grad_a = 0.5 * (grad_a + grad_a.transpose());
  grad_b = 0.5 * (grad_b + grad_b.transpose());

  const Matrix ax = grad_a * Xc;
  const Matrix ay = grad_a * Yc;
  out.gx = (2.0 / n) * (ax - ay) + (1.0 / n) * (grad_b * Xc);
  out.gy = (2.0 / n) * (ay - ax) + (1.0 / n) * (grad_b * Yc);
  return out;
}

// Backpropagate dL/d(output activations) through one stream.
NetGrads backprop(const NetworkParams& theta, const ForwardCache& cache, const Matrix& Gout) {
  const std::size_t L = theta.layers.size();
  NetGrads grads;
  grads.layers.resize(L);

  Matrix delta = Gout.cwiseProduct(activation_deriv(cache.activations[L], theta.activation));
  for (std::size_t l = L; l-- > 0;) {
    grads.layers[l].weights.noalias() = delta * cache.activations[l].transpose();
    grads.layers[l].bias = delta.rowwise().sum();
    if (l > 0) {
      delta = (theta.layers[l].weights.transpose() * delta)
                  .cwiseProduct(activation_deriv(cache.activations[l], theta.activation));
    }
  }
  return grads;
}

void write_f64le(std::ofstream& out, const double* data, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t u;
    std::memcpy(&u, data + i, sizeof u);
    std::uint8_t b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<std::uint8_t>(u >> (8 * k));
    out.write(reinterpret_cast<const char*>(b), 8);
  }
}

void read_f64le(std::ifstream& in, double* data, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    std::uint8_t b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error("checkpoint payload truncated");
    std::uint64_t u = 0;
    for (int k = 0; k < 8; ++k) u |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    std::memcpy(data + i, &u, sizeof u);
  }
}

}  // namespace

std::pair<NetworkParams, NetworkParams> init_params(const TrainConfig& config, int input_dim) {
  if (input_dim < 1) throw std::invalid_argument("init_params: input_dim must be positive");
  if (config.reg_r <= 0.0) throw std::invalid_argument("init_params: reg_r must be positive");
  for (int h : config.hidden_sizes)
    if (h < 1) throw std::invalid_argument("init_params: hidden sizes must be positive");
  const int out_dim = config.out_dim > 0 ? config.out_dim : input_dim;

  std::vector<Index> dims;
  dims.push_back(input_dim);
  for (int h : config.hidden_sizes) dims.push_back(h);
  dims.push_back(out_dim);

  Rng rng(config.seed);
  NetworkParams theta1 = init_one(rng, dims, config.activation);
  NetworkParams theta2 = init_one(rng, dims, config.activation);
  return {std::move(theta1), std::move(theta2)};
}

Matrix forward(const NetworkParams& theta, const Matrix& X) {
  ForwardCache cache;
  return forward(theta, X, cache);
}

Matrix forward(const NetworkParams& theta, const Matrix& X, ForwardCache& cache) {
  if (theta.layers.empty()) throw std::invalid_argument("forward: network has no layers");
  if (X.rows() != theta.input_dim())
    throw std::invalid_argument("forward: input has " + std::to_string(X.rows()) +
                                " rows, network expects " + std::to_string(theta.input_dim()));
  cache.activations.clear();
  cache.activations.reserve(theta.layers.size() + 1);
  cache.activations.push_back(X);
  for (const LayerParams& layer : theta.layers) {
    Matrix Z = layer.weights * cache.activations.back();
    Z.colwise() += layer.bias;
    cache.activations.push_back(apply_activation(Z, theta.activation));
  }
  return cache.activations.back();
}

Matrix center(const Matrix& Xphi) {
  if (Xphi.cols() < 2) throw std::invalid_argument("center: need at least 2 samples");
  return Xphi.colwise() - Xphi.rowwise().mean();
}

CovTriple covariances(const Matrix& Xc, const Matrix& Yc, double r) {
  if (r <= 0.0) throw std::invalid_argument("covariances: r must be positive");
  if (Xc.rows() != Yc.rows() || Xc.cols() != Yc.cols())
    throw std::invalid_argument("covariances: shapes differ");
  const double n = static_cast<double>(Xc.cols());
  const Index o = Xc.rows();
  const Matrix I = Matrix::Identity(o, o);

  CovTriple cov;
  cov.sigma_xx = (Xc * Xc.transpose()) / n + r * I;
  cov.sigma_yy = (Yc * Yc.transpose()) / n + r * I;
  const Matrix D = Xc - Yc;
  cov.sigma_xy = (D * D.transpose()) / n;
  cov.sigma_xx = 0.5 * (cov.sigma_xx + cov.sigma_xx.transpose());
  cov.sigma_yy = 0.5 * (cov.sigma_yy + cov.sigma_yy.transpose());
  cov.sigma_xy = 0.5 * (cov.sigma_xy + cov.sigma_xy.transpose());
  return cov;
}

double dsfa_loss(const Matrix& Xc, const Matrix& Yc, double r) {
  return loss_and_feature_grads(Xc, Yc, r, false).loss;
}

std::pair<Matrix, Matrix> loss_feature_grad(const Matrix& Xc, const Matrix& Yc, double r) {
  LossGrads lg = loss_and_feature_grads(Xc, Yc, r, true);
  return {std::move(lg.gx), std::move(lg.gy)};
}

ParamGradsResult param_grads(const NetworkParams& theta1, const NetworkParams& theta2,
                             const Matrix& X, const Matrix& Y, double r) {
  ForwardCache cache1, cache2;
  const Matrix Xphi = forward(theta1, X, cache1);
  const Matrix Yphi = forward(theta2, Y, cache2);
  const Matrix Xc = center(Xphi);
  const Matrix Yc = center(Yphi);

  LossGrads lg = loss_and_feature_grads(Xc, Yc, r, true);

  // d(center)/d(features) subtracts the row mean from the incoming gradient.
  const Matrix gx_phi = lg.gx.colwise() - lg.gx.rowwise().mean();
  const Matrix gy_phi = lg.gy.colwise() - lg.gy.rowwise().mean();

  ParamGradsResult out;
  out.loss = lg.loss;
  out.grads1 = backprop(theta1, cache1, gx_phi);
  out.grads2 = backprop(theta2, cache2, gy_phi);
  return out;
}

TrainResult train(const Matrix& Xs, const Matrix& Ys, const TrainConfig& config) {
  if (Xs.rows() != Ys.rows() || Xs.cols() != Ys.cols())
    throw std::invalid_argument("train: sample shapes differ");
  if (Xs.cols() < 2) throw std::invalid_argument("train: need at least 2 sample pairs");
  if (config.learning_rate < 0.0) throw std::invalid_argument("train: negative learning rate");
  if (config.max_epochs < 1) throw std::invalid_argument("train: max_epochs must be positive");

  TrainResult result;
  std::tie(result.theta1, result.theta2) =
      init_params(config, static_cast<int>(Xs.rows()));
  result.loss_history.reserve(static_cast<std::size_t>(config.max_epochs));

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    ParamGradsResult pg = param_grads(result.theta1, result.theta2, Xs, Ys, config.reg_r);
    if (!std::isfinite(pg.loss))
      throw std::runtime_error("train: loss diverged at epoch " + std::to_string(epoch) +
                               "; lower the learning rate");
    result.loss_history.push_back(pg.loss);
    for (std::size_t l = 0; l < result.theta1.layers.size(); ++l) {
      result.theta1.layers[l].weights -= config.learning_rate * pg.grads1.layers[l].weights;
      result.theta1.layers[l].bias -= config.learning_rate * pg.grads1.layers[l].bias;
      result.theta2.layers[l].weights -= config.learning_rate * pg.grads2.layers[l].weights;
      result.theta2.layers[l].bias -= config.learning_rate * pg.grads2.layers[l].bias;
    }
  }
  return result;
}

Matrix project_dsfa(const NetworkParams& theta1, const NetworkParams& theta2,
                    const Matrix& X, const Matrix& Y, double ridge) {
  const Matrix Xc = center(forward(theta1, X));
  const Matrix Yc = center(forward(theta2, Y));
  auto [A, B] = sfa_matrices(Xc, Yc);
  if (ridge > 0.0) B += ridge * Matrix::Identity(B.rows(), B.cols());
  const SfaModel model = solve_sfa(A, B);
  return transform_diff(model, Xc, Yc);
}

void save_checkpoint(const std::filesystem::path& base, const NetworkParams& theta1,
                     const NetworkParams& theta2, std::uint64_t seed, int epoch) {
  namespace fs = std::filesystem;
  fs::path header = base;
  header += ".json";
  fs::path payload = base;
  payload += ".bin";
  if (header.has_parent_path()) fs::create_directories(header.parent_path());

  auto dims_of = [](const NetworkParams& t) {
    nlohmann::json dims = nlohmann::json::array();
    for (const LayerParams& l : t.layers)
      dims.push_back({l.weights.rows(), l.weights.cols()});
    return dims;
  };
  nlohmann::ordered_json hdr;
  hdr["layers1"] = dims_of(theta1);
  hdr["layers2"] = dims_of(theta2);
  hdr["activation"] = theta1.activation == Activation::Tanh ? "tanh" : "sigmoid";
  hdr["seed"] = seed;
  hdr["epoch"] = epoch;
  hdr["dtype"] = "f64";
  {
    std::ofstream out(header);
    if (!out) throw std::runtime_error("cannot write " + header.string());
    out << hdr.dump(2) << '\n';
  }

  std::ofstream out(payload, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + payload.string());
  for (const NetworkParams* t : {&theta1, &theta2}) {
    for (const LayerParams& l : t->layers) {
      write_f64le(out, l.weights.data(), static_cast<std::size_t>(l.weights.size()));
      write_f64le(out, l.bias.data(), static_cast<std::size_t>(l.bias.size()));
    }
  }
  if (!out) throw std::runtime_error("short write to " + payload.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& base) {
  namespace fs = std::filesystem;
  fs::path header = base;
  header += ".json";
  fs::path payload = base;
  payload += ".bin";

  nlohmann::json hdr;
  {
    std::ifstream in(header);
    if (!in) throw std::runtime_error("cannot open " + header.string());
    in >> hdr;
  }
  Checkpoint ck;
  const std::string act = hdr.at("activation").get<std::string>();
  const Activation activation = act == "tanh" ? Activation::Tanh : Activation::Sigmoid;
  ck.seed = hdr.at("seed").get<std::uint64_t>();
  ck.epoch = hdr.at("epoch").get<int>();

  auto shaped = [&](const nlohmann::json& dims) {
    NetworkParams t;
    t.activation = activation;
    for (const auto& d : dims) {
      LayerParams l;
      l.weights.resize(d[0].get<Index>(), d[1].get<Index>());
      l.bias.resize(d[0].get<Index>());
      t.layers.push_back(std::move(l));
    }
    return t;
  };
  ck.theta1 = shaped(hdr.at("layers1"));
  ck.theta2 = shaped(hdr.at("layers2"));

  std::ifstream in(payload, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + payload.string());
  for (NetworkParams* t : {&ck.theta1, &ck.theta2}) {
    for (LayerParams& l : t->layers) {
      read_f64le(in, l.weights.data(), static_cast<std::size_t>(l.weights.size()));
      read_f64le(in, l.bias.data(), static_cast<std::size_t>(l.bias.size()));
    }
  }
  return ck;
}

}  // namespace dsfa
