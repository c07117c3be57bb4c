#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "dsfa/types.hpp"

namespace dsfa {

enum class Activation { Tanh, Sigmoid };

struct LayerParams {
  Matrix weights;  // h_out x h_in
  Vector bias;     // h_out
};

// One stream's fully-connected stack. The activation is applied after every
// layer, the output layer included.
struct NetworkParams {
  std::vector<LayerParams> layers;
  Activation activation = Activation::Tanh;

  Index input_dim() const { return layers.front().weights.cols(); }
  Index output_dim() const { return layers.back().weights.rows(); }
};

struct TrainConfig {
  std::vector<int> hidden_sizes{128, 128};
  int out_dim = 0;  // 0 = match the input band count
  double learning_rate = 1e-4;
  int max_epochs = 2000;
  double reg_r = 1e-4;
  std::uint64_t seed = 0;
  Activation activation = Activation::Tanh;
};

struct CovTriple {
  Matrix sigma_xx;
  Matrix sigma_yy;
  Matrix sigma_xy;
};

// Layer outputs kept for backpropagation; activations[0] is the input.
struct ForwardCache {
  std::vector<Matrix> activations;
};

struct NetGrads {
  std::vector<LayerParams> layers;  // same shapes as the parameters
};

struct ParamGradsResult {
  NetGrads grads1;
  NetGrads grads2;
  double loss = 0.0;
};

struct TrainResult {
  NetworkParams theta1;
  NetworkParams theta2;
  std::vector<double> loss_history;  // loss at the start of each epoch
};

// Glorot-uniform weights on [-sqrt(6/(h_in+h_out)), +sqrt(6/(h_in+h_out))],
// zero biases; the two streams are independent draws from one seeded stream.
std::pair<NetworkParams, NetworkParams> init_params(const TrainConfig& config, int input_dim);

Matrix forward(const NetworkParams& theta, const Matrix& X);
Matrix forward(const NetworkParams& theta, const Matrix& X, ForwardCache& cache);

// Removes the per-feature mean across the n samples (zero temporal mean).
Matrix center(const Matrix& Xphi);

// sigma_xx = Xc Xc^T / n + r I, sigma_yy likewise,
// sigma_xy = (Xc-Yc)(Xc-Yc)^T / n. Requires r > 0.
CovTriple covariances(const Matrix& Xc, const Matrix& Yc, double r);

// tr[(B^-1 A)^2] with A = sigma_xy and B = (sigma_xx + sigma_yy)/2: the sum
// of squared generalized eigenvalues, driven toward zero during training.
double dsfa_loss(const Matrix& Xc, const Matrix& Yc, double r);

// Gradients of the loss with respect to the centered features, from
// grad_A = 2 B^-1 A B^-1 and grad_B = -2 B^-1 A B^-1 A B^-1:
//   Gx = (2/n)(grad_A Xc - grad_A Yc) + (1/n) grad_B Xc
// and the mirrored expression for Gy (the grad_A term flips sign).
std::pair<Matrix, Matrix> loss_feature_grad(const Matrix& Xc, const Matrix& Yc, double r);

// Full analytic gradients: feature gradients chained through the centering
// map, then through the activations and affine layers of both streams.
ParamGradsResult param_grads(const NetworkParams& theta1, const NetworkParams& theta2,
                             const Matrix& X, const Matrix& Y, double r);

// Full-batch gradient descent for max_epochs steps, deterministic per seed.
// Aborts if the loss stops being finite.
TrainResult train(const Matrix& Xs, const Matrix& Ys, const TrainConfig& config);

// Forward both streams over the full scene, center with full-scene
// statistics, solve the SFA problem on the centered features (B gets
// ridge * I added when ridge > 0) and return the projected difference.
Matrix project_dsfa(const NetworkParams& theta1, const NetworkParams& theta2,
                    const Matrix& X, const Matrix& Y, double ridge = 0.0);

// Checkpoint pair: <base>.json manifest (layer dims, activation, seed, epoch)
// plus <base>.bin raw little-endian float64 payload.
void save_checkpoint(const std::filesystem::path& base, const NetworkParams& theta1,
                     const NetworkParams& theta2, std::uint64_t seed, int epoch);

struct Checkpoint {
  NetworkParams theta1;
  NetworkParams theta2;
  std::uint64_t seed = 0;
  int epoch = 0;
};

Checkpoint load_checkpoint(const std::filesystem::path& base);

}  // namespace dsfa
