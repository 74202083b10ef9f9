#include "l80/mlp.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "l80/errors.hpp"
#include "l80/kv.hpp"
#include "l80/rng.hpp"

namespace l80 {

namespace {

constexpr char kMagic[4] = {'L', '8', '0', 'N'};
constexpr std::uint32_t kVersion = 1;

bool finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

void check_layers(const MlpParams& m) {
  const std::size_t expected = m.hidden_layers + 1;
  if (m.layers.size() != expected) throw std::invalid_argument("mlp: layer count mismatch");
  std::size_t fan_in = m.in_dim;
  for (std::size_t k = 0; k < m.layers.size(); ++k) {
    const std::size_t fan_out = k + 1 == m.layers.size() ? m.out_dim : m.width;
    const auto& layer = m.layers[k];
    if (static_cast<std::size_t>(layer.W.rows()) != fan_out ||
        static_cast<std::size_t>(layer.W.cols()) != fan_in ||
        static_cast<std::size_t>(layer.b.size()) != fan_out) {
      throw std::invalid_argument("mlp: inconsistent layer dimensions");
    }
    if (!finite(layer.W) || !layer.b.allFinite()) throw std::invalid_argument("mlp: non-finite parameter");
    fan_in = fan_out;
  }
}

Eigen::MatrixXd normalize_inputs(const MlpParams& m, const Eigen::MatrixXd& inputs) {
  if (static_cast<std::size_t>(inputs.cols()) != m.in_dim) {
    throw std::invalid_argument("mlp: input dimension mismatch");
  }
  // One sample per column from here on.
  return ((inputs.rowwise() - m.in_shift.transpose()).array().rowwise() /
          m.in_scale.transpose().array())
      .matrix()
      .transpose();
}

template <class T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!in) throw std::runtime_error("mlp file: truncated input");
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void MlpParams::validate() const {
  if (in_dim == 0 || out_dim == 0) throw std::invalid_argument("mlp: zero dimension");
  if (hidden_layers > 0 && width == 0) throw std::invalid_argument("mlp: zero width");
  check_layers(*this);
  if (static_cast<std::size_t>(in_shift.size()) != in_dim ||
      static_cast<std::size_t>(in_scale.size()) != in_dim ||
      static_cast<std::size_t>(out_shift.size()) != out_dim ||
      static_cast<std::size_t>(out_scale.size()) != out_dim) {
    throw std::invalid_argument("mlp: normalization dimension mismatch");
  }
  if (!in_shift.allFinite() || !out_shift.allFinite() || !in_scale.allFinite() ||
      !out_scale.allFinite()) {
    throw std::invalid_argument("mlp: non-finite normalization");
  }
  if ((in_scale.array() <= 0.0).any() || (out_scale.array() <= 0.0).any()) {
    throw std::invalid_argument("mlp: normalization scales must be > 0");
  }
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.W.size() + l.b.size());
  return n;
}

Architecture Architecture::parse(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos || x == 0 || x + 1 == text.size()) {
    throw ConfigError("architecture must look like LxP, got '" + text + "'");
  }
  try {
    std::size_t used_l = 0, used_p = 0;
    const auto l = std::stoul(text.substr(0, x), &used_l);
    const auto p = std::stoul(text.substr(x + 1), &used_p);
    if (used_l != x || used_p != text.size() - x - 1 || l == 0 || p == 0) throw std::invalid_argument("");
    return {l, p};
  } catch (const std::logic_error&) {
    throw ConfigError("architecture must look like LxP, got '" + text + "'");
  }
}

std::string Architecture::str() const {
  return std::to_string(hidden_layers) + "x" + std::to_string(width);
}

MlpParams zero_mlp(std::size_t in_dim, std::size_t out_dim, Architecture arch) {
  MlpParams m;
  m.in_dim = in_dim;
  m.out_dim = out_dim;
  m.hidden_layers = arch.hidden_layers;
  m.width = arch.width;
  std::size_t fan_in = in_dim;
  for (std::size_t k = 0; k <= arch.hidden_layers; ++k) {
    const std::size_t fan_out = k == arch.hidden_layers ? out_dim : arch.width;
    m.layers.push_back({Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fan_out),
                                              static_cast<Eigen::Index>(fan_in)),
                        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fan_out))});
    fan_in = fan_out;
  }
  m.in_shift = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(in_dim));
  m.in_scale = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(in_dim));
  m.out_shift = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out_dim));
  m.out_scale = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(out_dim));
  return m;
}

MlpParams init_mlp(std::size_t in_dim, std::size_t out_dim, Architecture arch,
                   std::uint64_t seed) {
  MlpParams m = zero_mlp(in_dim, out_dim, arch);
  Rng rng(seed);
  for (auto& layer : m.layers) {
    const double r = std::sqrt(6.0 / static_cast<double>(layer.W.rows() + layer.W.cols()));
    for (Eigen::Index i = 0; i < layer.W.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.W.cols(); ++j) layer.W(i, j) = rng.uniform(-r, r);
    }
  }
  return m;
}

void mlp_forward_into(const MlpParams& m, const double* u, double* out) {
  thread_local std::vector<double> a, b;
  const std::size_t widest = std::max({m.in_dim, m.width, m.out_dim});
  if (a.size() < widest) {
    a.resize(widest);
    b.resize(widest);
  }
  for (std::size_t i = 0; i < m.in_dim; ++i) a[i] = (u[i] - m.in_shift[i]) / m.in_scale[i];

  const std::size_t last = m.layers.size() - 1;
  for (std::size_t k = 0; k < m.layers.size(); ++k) {
    const auto& W = m.layers[k].W;
    const auto& bias = m.layers[k].b;
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
      double acc = bias[r];
      for (Eigen::Index c = 0; c < W.cols(); ++c) acc += W(r, c) * a[c];
      b[r] = k == last ? acc : std::tanh(acc);
    }
    std::swap(a, b);
  }
  for (std::size_t i = 0; i < m.out_dim; ++i) out[i] = m.out_shift[i] + m.out_scale[i] * a[i];
}

std::vector<double> mlp_forward(const MlpParams& m, std::span<const double> u) {
  if (u.size() != m.in_dim) throw std::invalid_argument("mlp: input dimension mismatch");
  std::vector<double> out(m.out_dim);
  mlp_forward_into(m, u.data(), out.data());
  return out;
}

Eigen::MatrixXd mlp_forward_batch(const MlpParams& m, const Eigen::MatrixXd& inputs) {
  Eigen::MatrixXd h = normalize_inputs(m, inputs);
  for (std::size_t k = 0; k + 1 < m.layers.size(); ++k) {
    h = ((m.layers[k].W * h).colwise() + m.layers[k].b).array().tanh().matrix();
  }
  Eigen::MatrixXd o = (m.layers.back().W * h).colwise() + m.layers.back().b;
  o = (o.array().colwise() * m.out_scale.array()).colwise() + m.out_shift.array();
  return o.transpose();
}

std::vector<double> pack_parameters(const MlpParams& m) {
  std::vector<double> theta;
  theta.reserve(m.parameter_count());
  for (const auto& l : m.layers) {
    for (Eigen::Index i = 0; i < l.W.rows(); ++i) {
      for (Eigen::Index j = 0; j < l.W.cols(); ++j) theta.push_back(l.W(i, j));
    }
    for (Eigen::Index i = 0; i < l.b.size(); ++i) theta.push_back(l.b[i]);
  }
  return theta;
}

void unpack_parameters(MlpParams& m, std::span<const double> theta) {
  if (theta.size() != m.parameter_count()) throw std::invalid_argument("mlp: parameter count mismatch");
  std::size_t p = 0;
  for (auto& l : m.layers) {
    for (Eigen::Index i = 0; i < l.W.rows(); ++i) {
      for (Eigen::Index j = 0; j < l.W.cols(); ++j) l.W(i, j) = theta[p++];
    }
    for (Eigen::Index i = 0; i < l.b.size(); ++i) l.b[i] = theta[p++];
  }
}

LossGradient mlp_gradient(const MlpParams& m, const Eigen::MatrixXd& inputs,
                          const Eigen::MatrixXd& targets) {
  if (inputs.rows() != targets.rows()) throw std::invalid_argument("mlp: row count mismatch");
  if (static_cast<std::size_t>(targets.cols()) != m.out_dim) {
    throw std::invalid_argument("mlp: target dimension mismatch");
  }

  // Forward, keeping every activation (samples as columns).
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(m.layers.size());
  acts.push_back(normalize_inputs(m, inputs));
  for (std::size_t k = 0; k + 1 < m.layers.size(); ++k) {
    acts.push_back(
        ((m.layers[k].W * acts.back()).colwise() + m.layers[k].b).array().tanh().matrix());
  }
  Eigen::MatrixXd o = (m.layers.back().W * acts.back()).colwise() + m.layers.back().b;
  const Eigen::MatrixXd residual =
      ((o.array().colwise() * m.out_scale.array()).colwise() + m.out_shift.array()).matrix() -
      targets.transpose();

  LossGradient res;
  res.loss = residual.squaredNorm();

  // delta = d loss / d (pre-activation of the current layer)
  Eigen::MatrixXd delta = (2.0 * residual.array()).colwise() * m.out_scale.array();
  std::vector<DenseLayer> grads(m.layers.size());
  for (std::size_t k = m.layers.size(); k-- > 0;) {
    grads[k].W = delta * acts[k].transpose();
    grads[k].b = delta.rowwise().sum();
    if (k > 0) {
      delta = ((m.layers[k].W.transpose() * delta).array() * (1.0 - acts[k].array().square()))
                  .matrix();
    }
  }

  res.gradient.reserve(m.parameter_count());
  for (const auto& g : grads) {
    for (Eigen::Index i = 0; i < g.W.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.W.cols(); ++j) res.gradient.push_back(g.W(i, j));
    }
    for (Eigen::Index i = 0; i < g.b.size(); ++i) res.gradient.push_back(g.b[i]);
  }
  return res;
}

double mlp_loss(const MlpParams& m, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) {
  if (inputs.rows() != targets.rows()) throw std::invalid_argument("mlp: row count mismatch");
  return (mlp_forward_batch(m, inputs) - targets).squaredNorm();
}

void write_mlp(std::ostream& out, const MlpParams& m) {
  m.validate();
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.in_dim));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.out_dim));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.hidden_layers));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.width));
  for (const auto* v : {&m.in_shift, &m.in_scale, &m.out_shift, &m.out_scale}) {
    for (Eigen::Index i = 0; i < v->size(); ++i) put_le<double>(out, (*v)[i]);
  }
  for (double t : pack_parameters(m)) put_le<double>(out, t);
  if (!out) throw std::runtime_error("mlp file: write failed");
}

MlpParams read_mlp(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("mlp file: bad magic");
  if (const auto version = get_le<std::uint32_t>(in); version != kVersion) {
    throw std::runtime_error("mlp file: unsupported version " + std::to_string(version));
  }
  const auto in_dim = get_le<std::uint32_t>(in);
  const auto out_dim = get_le<std::uint32_t>(in);
  const auto hidden = get_le<std::uint32_t>(in);
  const auto width = get_le<std::uint32_t>(in);
  if (in_dim == 0 || out_dim == 0 || hidden > 64 || width > 1u << 16) {
    throw std::runtime_error("mlp file: implausible dimensions");
  }
  MlpParams m = zero_mlp(in_dim, out_dim, {hidden, width});
  for (auto* v : {&m.in_shift, &m.in_scale, &m.out_shift, &m.out_scale}) {
    for (Eigen::Index i = 0; i < v->size(); ++i) (*v)[i] = get_le<double>(in);
  }
  std::vector<double> theta(m.parameter_count());
  for (auto& t : theta) t = get_le<double>(in);
  unpack_parameters(m, theta);
  m.validate();
  return m;
}

void save_mlp(const std::string& path, const MlpParams& m) {
  std::ostringstream buf(std::ios::binary);
  write_mlp(buf, m);
  write_file_atomic(path, buf.str());
}

MlpParams load_mlp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_mlp(in);
}

}  // namespace l80
