#include "l80/model.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "l80/kv.hpp"

namespace l80 {

namespace {

bool all_finite(const Vec3& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

}  // namespace

void ModelParams::validate() const {
  for (double ai : a) {
    if (!(ai > 0.0)) throw std::invalid_argument("model params: a_i must be strictly positive");
  }
  if (!(time_unit_days > 0.0)) throw std::invalid_argument("model params: dt_model_days must be > 0");
  if (!(nu0 >= 0.0)) throw std::invalid_argument("model params: nu0 must be >= 0");
  if (!(kappa0 >= 0.0)) throw std::invalid_argument("model params: kappa0 must be >= 0");
  if (!all_finite(b) || !all_finite(F) || !all_finite(h) || !std::isfinite(c) ||
      !std::isfinite(g0)) {
    throw std::invalid_argument("model params: non-finite coefficient");
  }
}

bool State9::finite() const {
  for (double e : v) {
    if (!std::isfinite(e)) return false;
  }
  return true;
}

void l80_rhs_into(const double* s, const ModelParams& p, double* out) noexcept {
  const double* x = s;
  const double* y = s + 3;
  const double* z = s + 6;
  const auto& a = p.a;
  const auto& b = p.b;
  const double c = p.c;
  for (const auto [i, j, k] : kCyclicTriples) {
    const double zk = z[k] - p.h[k];
    const double zj = z[j] - p.h[j];
    out[i] = (-p.nu0 * a[i] * a[i] * x[i] - c * (a[i] - a[k]) * x[j] * y[k] +
              c * (a[i] - a[j]) * y[j] * x[k] + a[i] * b[i] * x[j] * x[k] -
              2.0 * c * c * y[j] * y[k] + a[i] * (y[i] - z[i])) /
             a[i];
    out[3 + i] = (-a[k] * b[k] * x[j] * y[k] - a[j] * b[j] * y[j] * x[k] +
                  c * (a[k] - a[j]) * y[j] * y[k] - a[i] * x[i] - p.nu0 * a[i] * a[i] * y[i]) /
                 a[i];
    out[6 + i] = p.g0 * a[i] * x[i] - b[k] * x[j] * zk - b[j] * zj * x[k] + c * y[j] * zk -
                 c * zj * y[k] - p.kappa0 * a[i] * z[i] + p.F[i];
  }
}

State9 l80_rhs(const State9& s, const ModelParams& p) {
  if (!s.finite()) throw NonFiniteState();
  State9 d;
  l80_rhs_into(s.v.data(), p, d.v.data());
  return d;
}

void y_equation_rhs_into(const double* y, const double* x, const ModelParams& p,
                         double* out) noexcept {
  const auto& a = p.a;
  const auto& b = p.b;
  for (const auto [i, j, k] : kCyclicTriples) {
    out[i] = (-a[k] * b[k] * x[j] * y[k] - a[j] * b[j] * y[j] * x[k] +
              p.c * (a[k] - a[j]) * y[j] * y[k] - a[i] * x[i] - p.nu0 * a[i] * a[i] * y[i]) /
             a[i];
  }
}

Vec3 y_equation_rhs(const Vec3& y, const Vec3& x, const ModelParams& p) {
  if (!all_finite(y) || !all_finite(x)) throw NonFiniteState();
  Vec3 d;
  y_equation_rhs_into(y.data(), x.data(), p, d.data());
  return d;
}

double y_energy(const Vec3& y, const ModelParams& p) {
  return p.a[0] * y[0] * y[0] + p.a[1] * y[1] * y[1] + p.a[2] * y[2] * y[2];
}

ModelParams parse_params(std::string_view text) {
  ModelParams p;
  struct Slot {
    const char* key;
    double* target;
    bool seen = false;
  };
  Slot slots[] = {{"a1", &p.a[0]},    {"a2", &p.a[1]},
                  {"a3", &p.a[2]},    {"b1", &p.b[0]},
                  {"b2", &p.b[1]},    {"b3", &p.b[2]},
                  {"c", &p.c},        {"nu0", &p.nu0},
                  {"kappa0", &p.kappa0}, {"g0", &p.g0},
                  {"F1", &p.F[0]},    {"F2", &p.F[1]},
                  {"F3", &p.F[2]},    {"h1", &p.h[0]},
                  {"h2", &p.h[1]},    {"h3", &p.h[2]},
                  {"dt_model_days", &p.time_unit_days}};

  for (const auto& kv : parse_key_values(text, false)) {
    Slot* hit = nullptr;
    for (auto& s : slots) {
      if (kv.key == s.key) hit = &s;
    }
    if (hit == nullptr) {
      throw ConfigError("line " + std::to_string(kv.line) + ": unknown key '" + kv.key + "'");
    }
    *hit->target = parse_double(kv);
    hit->seen = true;
  }
  for (const auto& s : slots) {
    if (!s.seen) throw ConfigError(std::string("missing key '") + s.key + "'");
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

ModelParams load_params(const std::filesystem::path& file) {
  try {
    return parse_params(read_text_file(file.string()));
  } catch (const ConfigError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

std::string format_params(const ModelParams& p) {
  std::ostringstream os;
  os.precision(17);
  for (int i = 0; i < 3; ++i) os << 'a' << i + 1 << " = " << p.a[i] << '\n';
  for (int i = 0; i < 3; ++i) os << 'b' << i + 1 << " = " << p.b[i] << '\n';
  os << "c = " << p.c << '\n'
     << "nu0 = " << p.nu0 << '\n'
     << "kappa0 = " << p.kappa0 << '\n'
     << "g0 = " << p.g0 << '\n';
  for (int i = 0; i < 3; ++i) os << 'F' << i + 1 << " = " << p.F[i] << '\n';
  for (int i = 0; i < 3; ++i) os << 'h' << i + 1 << " = " << p.h[i] << '\n';
  os << "dt_model_days = " << p.time_unit_days << '\n';
  return os.str();
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("L80_PRESET_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return L80_PRESET_DIR;
}

ModelParams load_preset(std::string_view name) {
  if (name != "hlf" && name != "slow") {
    throw ConfigError("unknown regime preset '" + std::string(name) + "'");
  }
  return load_params(preset_dir() / (std::string(name) + ".cfg"));
}

}  // namespace l80
