#include <autodistill/neural/mlp.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace autodistill::neural {

namespace {

constexpr char kMagic[8] = {'A', 'D', 'N', 'N', '0', '0', '0', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("truncated weight snapshot");
  return v;
}

void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

double read_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("truncated weight snapshot");
  return v;
}

}  // namespace

Mlp::Mlp(std::vector<int> sizes, std::uint64_t seed, Output output,
         double output_scale)
    : sizes_(std::move(sizes)), output_(output), output_scale_(output_scale) {
  if (sizes_.size() < 2)
    throw std::invalid_argument("network needs at least input and output");
  for (int n : sizes_)
    if (n <= 0) throw std::invalid_argument("layer sizes must be positive");

  std::mt19937_64 rng(seed);
  for (std::size_t l = 1; l < sizes_.size(); ++l) {
    Layer layer;
    int in = sizes_[l - 1], out = sizes_[l];
    std::normal_distribution<double> init(0.0, std::sqrt(2.0 / in));
    layer.w = Eigen::MatrixXd::NullaryExpr(
        out, in, [&](Eigen::Index, Eigen::Index) { return init(rng); });
    layer.b = Eigen::VectorXd::Zero(out);
    num_params_ += out * in + out;
    layers_.push_back(std::move(layer));
  }
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  return forward(Eigen::MatrixXd(x)).col(0);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& X) const {
  Cache scratch;
  return forward(X, scratch);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& X, Cache& cache) const {
  if (X.rows() != input_dim())
    throw std::invalid_argument("input dimension mismatch");
  cache.acts.clear();
  cache.pre.clear();
  cache.acts.push_back(X);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z =
        (layers_[l].w * cache.acts.back()).colwise() + layers_[l].b;
    cache.pre.push_back(z);
    bool last = l + 1 == layers_.size();
    Eigen::MatrixXd a;
    if (!last || output_ == Output::relu) {
      a = z.cwiseMax(0.0);
    } else if (output_ == Output::linear) {
      a = z;
    } else {  // tanh_scaled
      a = output_scale_ * z.array().tanh();
    }
    cache.acts.push_back(std::move(a));
  }
  return cache.acts.back();
}

Eigen::VectorXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& dY,
                              Eigen::MatrixXd* dX) const {
  if (cache.acts.size() != layers_.size() + 1)
    throw std::invalid_argument("cache does not match network depth");
  if (dY.rows() != output_dim() || dY.cols() != cache.acts.back().cols())
    throw std::invalid_argument("upstream gradient shape mismatch");

  Eigen::VectorXd grad(num_params_);
  Eigen::MatrixXd delta;  // dL/dZ for the current layer
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    bool last = l + 1 == static_cast<int>(layers_.size());
    const Eigen::MatrixXd& z = cache.pre[l];
    if (last) {
      if (output_ == Output::linear) {
        delta = dY;
      } else if (output_ == Output::relu) {
        delta = dY.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
      } else {
        Eigen::ArrayXXd th = z.array().tanh();
        delta = (dY.array() * output_scale_ * (1.0 - th.square())).matrix();
      }
    } else {
      Eigen::MatrixXd dA = layers_[l + 1].w.transpose() * delta;
      delta = dA.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
    }
    Eigen::MatrixXd dW = delta * cache.acts[l].transpose();
    Eigen::VectorXd db = delta.rowwise().sum();
    int offset = 0;
    for (int k = 0; k < l; ++k)
      offset += sizes_[k + 1] * sizes_[k] + sizes_[k + 1];
    for (int i = 0; i < dW.rows(); ++i)
      for (int j = 0; j < dW.cols(); ++j)
        grad[offset + i * dW.cols() + j] = dW(i, j);
    for (int i = 0; i < db.size(); ++i)
      grad[offset + dW.rows() * dW.cols() + i] = db[i];
  }
  if (dX) *dX = layers_[0].w.transpose() * delta;
  return grad;
}

Eigen::VectorXd Mlp::parameters() const {
  Eigen::VectorXd theta(num_params_);
  int k = 0;
  for (const Layer& layer : layers_) {
    for (int i = 0; i < layer.w.rows(); ++i)
      for (int j = 0; j < layer.w.cols(); ++j) theta[k++] = layer.w(i, j);
    for (int i = 0; i < layer.b.size(); ++i) theta[k++] = layer.b[i];
  }
  return theta;
}

void Mlp::set_parameters(const Eigen::VectorXd& theta) {
  if (theta.size() != num_params_)
    throw std::invalid_argument("parameter vector size mismatch");
  int k = 0;
  for (Layer& layer : layers_) {
    for (int i = 0; i < layer.w.rows(); ++i)
      for (int j = 0; j < layer.w.cols(); ++j) layer.w(i, j) = theta[k++];
    for (int i = 0; i < layer.b.size(); ++i) layer.b[i] = theta[k++];
  }
}

void Mlp::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, static_cast<std::uint32_t>(sizes_.size()));
  for (int n : sizes_) write_u32(out, static_cast<std::uint32_t>(n));
  write_u32(out, static_cast<std::uint32_t>(output_));
  write_f64(out, output_scale_);
  Eigen::VectorXd theta = parameters();
  for (int i = 0; i < theta.size(); ++i) write_f64(out, theta[i]);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Mlp Mlp::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("unrecognized weight snapshot header");
  std::uint32_t depth = read_u32(in);
  if (depth < 2 || depth > 64)
    throw std::runtime_error("implausible snapshot layer count");
  std::vector<int> sizes(depth);
  for (auto& n : sizes) n = static_cast<int>(read_u32(in));
  auto output = static_cast<Output>(read_u32(in));
  double scale = read_f64(in);
  Mlp net(sizes, 0, output, scale);
  Eigen::VectorXd theta(net.num_parameters());
  for (int i = 0; i < theta.size(); ++i) theta[i] = read_f64(in);
  net.set_parameters(theta);
  return net;
}

Adam::Adam(int dim, double lr, double beta1, double beta2, double eps)
    : lr_(lr),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(Eigen::VectorXd::Zero(dim)),
      v_(Eigen::VectorXd::Zero(dim)) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw std::invalid_argument("optimizer dimension mismatch");
  if (!grad.allFinite())
    throw std::runtime_error("non-finite gradient; aborting training");
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_.array().matrix() +
       (1.0 - beta2_) * grad.cwiseProduct(grad);
  double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -=
      lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

DuelingQ::DuelingQ(int state_dim, int num_actions, int hidden,
                   std::uint64_t seed)
    : trunk_({state_dim, hidden, hidden}, seed, Output::relu),
      value_({hidden, 1}, seed + 1),
      adv_({hidden, num_actions}, seed + 2) {}

DuelingQ::DuelingQ(Mlp trunk, Mlp value, Mlp adv)
    : trunk_(std::move(trunk)), value_(std::move(value)), adv_(std::move(adv)) {}

Eigen::VectorXd DuelingQ::q(const Eigen::VectorXd& s) const {
  return q(Eigen::MatrixXd(s)).col(0);
}

Eigen::MatrixXd DuelingQ::q(const Eigen::MatrixXd& S) const {
  Cache scratch;
  return q(S, scratch);
}

Eigen::MatrixXd DuelingQ::q(const Eigen::MatrixXd& S, Cache& cache) const {
  Eigen::MatrixXd h = trunk_.forward(S, cache.trunk);
  Eigen::MatrixXd v = value_.forward(h, cache.value);
  Eigen::MatrixXd a = adv_.forward(h, cache.adv);
  Eigen::RowVectorXd mean = a.colwise().mean();
  cache.q = (a.rowwise() - mean).rowwise() + v.row(0);
  return cache.q;
}

Eigen::VectorXd DuelingQ::backward(const Cache& cache,
                                   const Eigen::MatrixXd& dQ) const {
  // Q_j = V + A_j - mean_k(A_k), so dA_j = dQ_j - mean_k(dQ_k) and
  // dV = sum_j dQ_j.
  Eigen::RowVectorXd col_sum = dQ.colwise().sum();
  Eigen::MatrixXd dA =
      dQ.rowwise() - (col_sum / static_cast<double>(dQ.rows()));
  Eigen::MatrixXd dV = col_sum;

  Eigen::MatrixXd dh_value, dh_adv;
  Eigen::VectorXd g_value = value_.backward(cache.value, dV, &dh_value);
  Eigen::VectorXd g_adv = adv_.backward(cache.adv, dA, &dh_adv);
  Eigen::VectorXd g_trunk =
      trunk_.backward(cache.trunk, dh_value + dh_adv, nullptr);

  Eigen::VectorXd grad(num_parameters());
  grad << g_trunk, g_value, g_adv;
  return grad;
}

int DuelingQ::num_parameters() const {
  return trunk_.num_parameters() + value_.num_parameters() +
         adv_.num_parameters();
}

Eigen::VectorXd DuelingQ::parameters() const {
  Eigen::VectorXd theta(num_parameters());
  theta << trunk_.parameters(), value_.parameters(), adv_.parameters();
  return theta;
}

void DuelingQ::set_parameters(const Eigen::VectorXd& theta) {
  if (theta.size() != num_parameters())
    throw std::invalid_argument("parameter vector size mismatch");
  int a = trunk_.num_parameters(), b = value_.num_parameters();
  trunk_.set_parameters(theta.head(a));
  value_.set_parameters(theta.segment(a, b));
  adv_.set_parameters(theta.tail(adv_.num_parameters()));
}

void DuelingQ::save_file(const std::string& path) const {
  trunk_.save_file(path + ".trunk");
  value_.save_file(path + ".value");
  adv_.save_file(path + ".adv");
}

DuelingQ DuelingQ::load_file(const std::string& path) {
  return DuelingQ(Mlp::load_file(path + ".trunk"),
                  Mlp::load_file(path + ".value"),
                  Mlp::load_file(path + ".adv"));
}

Eigen::VectorXd encode_product_state(const Eigen::VectorXd& features,
                                     int omega, int num_automaton_states) {
  if (omega < 0 || omega >= num_automaton_states)
    throw std::invalid_argument("automaton state out of range");
  Eigen::VectorXd out(features.size() + num_automaton_states);
  out.head(features.size()) = features;
  out.tail(num_automaton_states).setZero();
  out[features.size() + omega] = 1.0;
  return out;
}

}  // namespace autodistill::neural
