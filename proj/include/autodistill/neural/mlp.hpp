#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace autodistill::neural {

// Output-layer activation. Hidden layers are always ReLU.
enum class Output { linear, relu, tanh_scaled };

// Fully-connected network with analytic gradients. Batches are column-major:
// each column of a matrix argument is one sample.
class Mlp {
 public:
  Mlp(std::vector<int> sizes, std::uint64_t seed,
      Output output = Output::linear, double output_scale = 1.0);

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  Output output() const { return output_; }
  double output_scale() const { return output_scale_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& X) const;

  struct Cache {
    std::vector<Eigen::MatrixXd> acts;  // acts[0] = input, acts[L] = output
    std::vector<Eigen::MatrixXd> pre;   // pre-activation per layer
  };
  Eigen::MatrixXd forward(const Eigen::MatrixXd& X, Cache& cache) const;

  // Backpropagates the upstream gradient dY (same shape as the output batch)
  // through the cached forward pass. Returns the flat parameter gradient;
  // optionally also produces the gradient with respect to the input batch.
  // Parameters are untouched.
  Eigen::VectorXd backward(const Cache& cache, const Eigen::MatrixXd& dY,
                           Eigen::MatrixXd* dX = nullptr) const;

  // Flat parameter vector: per layer, W row-major (out x in), then b.
  int num_parameters() const { return num_params_; }
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& theta);

  // Versioned binary weight snapshot (header, layer dims, row-major doubles).
  void save_file(const std::string& path) const;
  static Mlp load_file(const std::string& path);

 private:
  struct Layer {
    Eigen::MatrixXd w;
    Eigen::VectorXd b;
  };

  std::vector<int> sizes_;
  Output output_;
  double output_scale_;
  int num_params_ = 0;
  std::vector<Layer> layers_;
};

// Standard Adam with bias correction over a flat parameter vector.
// Non-finite gradients abort training loudly.
class Adam {
 public:
  explicit Adam(int dim, double lr = 1e-3, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  long long t() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long long t_ = 0;
  Eigen::VectorXd m_, v_;
};

// Dueling Q-network: shared ReLU trunk feeding a scalar value stream and an
// advantage stream, combined as Q = V + A - mean_a(A).
class DuelingQ {
 public:
  DuelingQ(int state_dim, int num_actions, int hidden, std::uint64_t seed);

  int state_dim() const { return trunk_.input_dim(); }
  int num_actions() const { return adv_.output_dim(); }

  Eigen::VectorXd q(const Eigen::VectorXd& s) const;
  Eigen::MatrixXd q(const Eigen::MatrixXd& S) const;

  struct Cache {
    Mlp::Cache trunk, value, adv;
    Eigen::MatrixXd q;
  };
  Eigen::MatrixXd q(const Eigen::MatrixXd& S, Cache& cache) const;
  Eigen::VectorXd backward(const Cache& cache, const Eigen::MatrixXd& dQ) const;

  int num_parameters() const;
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& theta);

  void save_file(const std::string& path) const;
  static DuelingQ load_file(const std::string& path);

 private:
  DuelingQ(Mlp trunk, Mlp value, Mlp adv);
  Mlp trunk_, value_, adv_;
};

// Target parameters change only through an explicit sync call.
template <class Net>
class TargetNetwork {
 public:
  explicit TargetNetwork(const Net& online) : net_(online) {}

  const Net& net() const { return net_; }
  void hard_copy(const Net& online) { net_.set_parameters(online.parameters()); }
  void polyak(const Net& online, double tau) {
    net_.set_parameters(tau * online.parameters() +
                        (1.0 - tau) * net_.parameters());
  }

 private:
  Net net_;
};

// Environment features concatenated with a one-hot encoding of the
// automaton state.
Eigen::VectorXd encode_product_state(const Eigen::VectorXd& features,
                                     int omega, int num_automaton_states);

}  // namespace autodistill::neural
