#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

namespace metamat::regress {

enum class OptimizerKind { adam, sgd };

struct MlpConfig {
  int input_dim = 3;
  int hidden1 = 64;
  int hidden2 = 64;
  OptimizerKind optimizer = OptimizerKind::adam;
  double learning_rate = 0.0025;
  double weight_decay = 0.0;  // decoupled, applied per step
  int epochs = 1000;
  int batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;
};

struct MlpGradients {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;
};

// Two-hidden-layer perceptron, rectifier activations, identity output,
// trained on mean squared error. Inputs are expected pre-scaled; targets
// are raw.
struct MlpModel {
  MlpConfig config;
  Eigen::MatrixXd w1, w2, w3;  // (h1 x in), (h2 x h1), (1 x h2)
  Eigen::VectorXd b1, b2, b3;
  std::vector<double> train_loss;  // per-epoch MSE
  std::vector<double> val_loss;
  bool aborted_nonfinite = false;

  double predict(const std::array<double, 3>& x) const;
  /// X has one sample per row.
  Eigen::VectorXd predict_batch(const Eigen::MatrixXd& X) const;
  double mse(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const;
  /// Mean-squared-error gradients for a batch (no weight decay term).
  MlpGradients loss_gradients(const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y) const;

  std::vector<double> parameters() const;
  void set_parameters(const std::vector<double>& flat);
};

/// Seeded init + training loop. Weight decay is decoupled: each step takes
/// theta -= lr * step(theta) + lr * wd * theta off the parameters. Training
/// stops immediately (flagging the model) if the loss goes non-finite.
MlpModel fit_mlp(const Eigen::MatrixXd& X_train, const Eigen::VectorXd& y_train,
                 const Eigen::MatrixXd& X_val, const Eigen::VectorXd& y_val,
                 const MlpConfig& config);

/// Fresh seeded He-normal initialization without any training steps.
MlpModel init_mlp(const MlpConfig& config);

}  // namespace metamat::regress
