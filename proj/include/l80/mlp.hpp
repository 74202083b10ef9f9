#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace l80 {

struct DenseLayer {
  Eigen::MatrixXd W;  // out x in
  Eigen::VectorXd b;
};

/// tanh multilayer perceptron with affine input normalization and output
/// de-normalization:
///
///   u_n = (u - in_shift) / in_scale
///   h_k = tanh(W_k h_{k-1} + b_k),  k = 1..L
///   out = out_shift + out_scale * (W_out h_L + b_out)
///
/// `layers` holds the L hidden layers followed by the linear output layer.
struct MlpParams {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::size_t hidden_layers = 0;
  std::size_t width = 0;
  std::vector<DenseLayer> layers;
  Eigen::VectorXd in_shift, in_scale;
  Eigen::VectorXd out_shift, out_scale;

  void validate() const;
  std::size_t parameter_count() const;
};

struct Architecture {
  std::size_t hidden_layers = 1;
  std::size_t width = 5;

  /// "LxP", e.g. "1x5".
  static Architecture parse(const std::string& text);
  std::string str() const;
};

/// Zero weights and biases, identity normalizations.
MlpParams zero_mlp(std::size_t in_dim, std::size_t out_dim, Architecture arch);

/// Uniform(-r, r) weights with r = sqrt(6 / (fan_in + fan_out)), zero biases,
/// identity normalizations. Deterministic in `seed`.
MlpParams init_mlp(std::size_t in_dim, std::size_t out_dim, Architecture arch,
                   std::uint64_t seed);

std::vector<double> mlp_forward(const MlpParams& m, std::span<const double> u);

/// Allocation-free single-sample forward pass; reentrant.
void mlp_forward_into(const MlpParams& m, const double* u, double* out);

/// Forward pass on a batch, one sample per row.
Eigen::MatrixXd mlp_forward_batch(const MlpParams& m, const Eigen::MatrixXd& inputs);

/// Trainable parameters flattened layer by layer: W row-major, then b.
std::vector<double> pack_parameters(const MlpParams& m);
void unpack_parameters(MlpParams& m, std::span<const double> theta);

struct LossGradient {
  double loss = 0.0;               // sum over rows of ||m(u) - t||^2
  std::vector<double> gradient;    // d loss / d theta, packed order
};

/// Exact reverse-mode gradient of the summed squared error over the rows of
/// (inputs, targets). Normalizations are constants.
LossGradient mlp_gradient(const MlpParams& m, const Eigen::MatrixXd& inputs,
                          const Eigen::MatrixXd& targets);

/// Summed squared error only.
double mlp_loss(const MlpParams& m, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets);

// "L80N" model file: magic, u32 version = 1, u32 in_dim, u32 out_dim, u32 L,
// u32 p, f64 in_shift[in], in_scale[in], out_shift[out], out_scale[out], then
// per layer f64 W (row-major) and b. Little-endian.
void write_mlp(std::ostream& out, const MlpParams& m);
MlpParams read_mlp(std::istream& in);
void save_mlp(const std::string& path, const MlpParams& m);
MlpParams load_mlp(const std::string& path);

}  // namespace l80
