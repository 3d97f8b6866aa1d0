#include "metamat/mlp.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "metamat/rng.hpp"

namespace metamat::regress {

namespace {

Eigen::MatrixXd he_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  const double std_dev = std::sqrt(2.0 / static_cast<double>(cols));
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = std_dev * rng.normal();
  return m;
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

}  // namespace

MlpModel init_mlp(const MlpConfig& config) {
  if (!(config.learning_rate > 0.0))
    throw std::domain_error("mlp: learning rate must be > 0");
  if (config.input_dim < 1 || config.hidden1 < 1 || config.hidden2 < 1)
    throw std::domain_error("mlp: layer sizes must be >= 1");

  MlpModel model;
  model.config = config;
  Rng rng(mix_seed(config.seed, 0x6d6c70));
  model.w1 = he_normal(config.hidden1, config.input_dim, rng);
  model.w2 = he_normal(config.hidden2, config.hidden1, rng);
  model.w3 = he_normal(1, config.hidden2, rng);
  model.b1 = Eigen::VectorXd::Zero(config.hidden1);
  model.b2 = Eigen::VectorXd::Zero(config.hidden2);
  model.b3 = Eigen::VectorXd::Zero(1);
  return model;
}

Eigen::VectorXd MlpModel::predict_batch(const Eigen::MatrixXd& X) const {
  const Eigen::MatrixXd a1 =
      relu((w1 * X.transpose()).colwise() + b1);            // h1 x n
  const Eigen::MatrixXd a2 = relu((w2 * a1).colwise() + b2);  // h2 x n
  return ((w3 * a2).colwise() + b3).transpose();              // n x 1
}

double MlpModel::predict(const std::array<double, 3>& x) const {
  Eigen::MatrixXd row(1, config.input_dim);
  for (int i = 0; i < config.input_dim; ++i) row(0, i) = x[i];
  return predict_batch(row)(0);
}

double MlpModel::mse(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const {
  const Eigen::VectorXd pred = predict_batch(X);
  return (pred - y).squaredNorm() / static_cast<double>(y.size());
}

MlpGradients MlpModel::loss_gradients(const Eigen::MatrixXd& X,
                                      const Eigen::VectorXd& y) const {
  const double n = static_cast<double>(X.rows());
  const Eigen::MatrixXd xt = X.transpose();              // in x n
  const Eigen::MatrixXd z1 = (w1 * xt).colwise() + b1;   // h1 x n
  const Eigen::MatrixXd a1 = relu(z1);
  const Eigen::MatrixXd z2 = (w2 * a1).colwise() + b2;   // h2 x n
  const Eigen::MatrixXd a2 = relu(z2);
  const Eigen::MatrixXd out = (w3 * a2).colwise() + b3;  // 1 x n

  // d(MSE)/d(out) for out row vs target row
  Eigen::MatrixXd delta3 = (out - y.transpose()) * (2.0 / n);  // 1 x n

  MlpGradients g;
  g.w3 = delta3 * a2.transpose();
  g.b3 = delta3.rowwise().sum();
  Eigen::MatrixXd delta2 =
      (w3.transpose() * delta3).cwiseProduct((z2.array() > 0.0).cast<double>().matrix());
  g.w2 = delta2 * a1.transpose();
  g.b2 = delta2.rowwise().sum();
  Eigen::MatrixXd delta1 =
      (w2.transpose() * delta2).cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
  g.w1 = delta1 * xt.transpose();
  g.b1 = delta1.rowwise().sum();
  return g;
}

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

// One optimizer slot per tensor; Adam keeps first/second moment estimates.
template <typename Tensor>
struct AdamState {
  Tensor m, v;
  explicit AdamState(const Tensor& shape)
      : m(Tensor::Zero(shape.rows(), shape.cols())),
        v(Tensor::Zero(shape.rows(), shape.cols())) {}
};

template <typename Tensor>
void apply_step(Tensor& theta, const Tensor& grad, AdamState<Tensor>& state,
                const MlpConfig& cfg, long step) {
  if (cfg.optimizer == OptimizerKind::adam) {
    state.m = kBeta1 * state.m + (1.0 - kBeta1) * grad;
    state.v = kBeta2 * state.v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
    const double mc = 1.0 - std::pow(kBeta1, static_cast<double>(step));
    const double vc = 1.0 - std::pow(kBeta2, static_cast<double>(step));
    theta -= (cfg.learning_rate *
              (state.m / mc).array() /
              ((state.v / vc).array().sqrt() + kAdamEps))
                 .matrix();
  } else {
    theta -= cfg.learning_rate * grad;
  }
  if (cfg.weight_decay > 0.0)
    theta -= cfg.learning_rate * cfg.weight_decay * theta;
}

}  // namespace

MlpModel fit_mlp(const Eigen::MatrixXd& X_train, const Eigen::VectorXd& y_train,
                 const Eigen::MatrixXd& X_val, const Eigen::VectorXd& y_val,
                 const MlpConfig& config) {
  if (X_train.rows() == 0 || X_train.rows() != y_train.size())
    throw std::domain_error("fit_mlp: bad training data");
  if (X_train.cols() != config.input_dim)
    throw std::domain_error("fit_mlp: feature width != input_dim");

  MlpModel model = init_mlp(config);
  AdamState s_w1(model.w1), s_w2(model.w2), s_w3(model.w3);
  AdamState s_b1(model.b1), s_b2(model.b2), s_b3(model.b3);

  Rng batch_rng(mix_seed(config.seed, 0x62617463));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(X_train.rows()));
  std::iota(order.begin(), order.end(), 0);

  long step = 0;
  const bool has_val = X_val.rows() > 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_loss = 0.0;
    int batches = 0;

    auto train_batch = [&](const Eigen::MatrixXd& xb, const Eigen::VectorXd& yb) {
      const MlpGradients g = model.loss_gradients(xb, yb);
      const double loss =
          (model.predict_batch(xb) - yb).squaredNorm() / yb.size();
      ++step;
      apply_step(model.w1, g.w1, s_w1, config, step);
      apply_step(model.w2, g.w2, s_w2, config, step);
      apply_step(model.w3, g.w3, s_w3, config, step);
      apply_step(model.b1, g.b1, s_b1, config, step);
      apply_step(model.b2, g.b2, s_b2, config, step);
      apply_step(model.b3, g.b3, s_b3, config, step);
      epoch_loss += loss;
      ++batches;
      return std::isfinite(loss);
    };

    bool finite = true;
    if (config.batch_size <= 0 ||
        config.batch_size >= X_train.rows()) {
      finite = train_batch(X_train, y_train);
    } else {
      batch_rng.shuffle(order);
      for (Eigen::Index start = 0; start < X_train.rows() && finite;
           start += config.batch_size) {
        const Eigen::Index count =
            std::min<Eigen::Index>(config.batch_size, X_train.rows() - start);
        Eigen::MatrixXd xb(count, X_train.cols());
        Eigen::VectorXd yb(count);
        for (Eigen::Index i = 0; i < count; ++i) {
          xb.row(i) = X_train.row(order[static_cast<std::size_t>(start + i)]);
          yb(i) = y_train(order[static_cast<std::size_t>(start + i)]);
        }
        finite = train_batch(xb, yb);
      }
    }

    model.train_loss.push_back(epoch_loss / std::max(batches, 1));
    if (has_val) model.val_loss.push_back(model.mse(X_val, y_val));
    if (!finite || !std::isfinite(model.train_loss.back())) {
      model.aborted_nonfinite = true;
      break;
    }
  }
  return model;
}

std::vector<double> MlpModel::parameters() const {
  std::vector<double> flat;
  auto append = [&](const Eigen::MatrixXd& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) flat.push_back(m(r, c));
  };
  append(w1);
  append(b1);
  append(w2);
  append(b2);
  append(w3);
  append(b3);
  return flat;
}

void MlpModel::set_parameters(const std::vector<double>& flat) {
  std::size_t pos = 0;
  auto take = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = flat.at(pos++);
  };
  auto take_vec = [&](Eigen::VectorXd& v) {
    for (Eigen::Index r = 0; r < v.size(); ++r) v(r) = flat.at(pos++);
  };
  take(w1);
  take_vec(b1);
  take(w2);
  take_vec(b2);
  take(w3);
  take_vec(b3);
  if (pos != flat.size())
    throw std::domain_error("mlp: parameter vector size mismatch");
}

}  // namespace metamat::regress
