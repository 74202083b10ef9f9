#include "l80/trajectory.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "l80/integrator.hpp"
#include "l80/kv.hpp"

namespace l80 {

namespace {

constexpr char kMagic[4] = {'L', '8', '0', 'T'};
constexpr std::uint32_t kVersion = 1;

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
  if (!in) throw std::runtime_error("trajectory: truncated input");
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

std::vector<double> Trajectory::component(std::size_t c) const {
  if (c >= n_components) throw std::out_of_range("trajectory: component index");
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = data[i * n_components + c];
  return out;
}

Trajectory Trajectory::slice(std::size_t first, std::size_t count) const {
  if (first + count > size()) throw std::out_of_range("trajectory: slice out of range");
  Trajectory out;
  out.t0 = time(first);
  out.dt = dt;
  out.n_components = n_components;
  out.data.assign(data.begin() + static_cast<std::ptrdiff_t>(first * n_components),
                  data.begin() + static_cast<std::ptrdiff_t>((first + count) * n_components));
  return out;
}

void Trajectory::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("trajectory: dt must be > 0");
  if (n_components == 0 || data.empty()) throw std::invalid_argument("trajectory: empty");
  if (data.size() % n_components != 0) throw std::invalid_argument("trajectory: ragged data");
  for (double v : data) {
    if (!std::isfinite(v)) throw std::invalid_argument("trajectory: non-finite sample");
  }
}

std::vector<std::string> component_names(std::size_t n_components) {
  switch (n_components) {
    case 9:
      return {"x1", "x2", "x3", "y1", "y2", "y3", "z1", "z2", "z3"};
    case 6:
      return {"y1", "y2", "y3", "x1", "x2", "x3"};
    case 3:
      return {"y1", "y2", "y3"};
    default: {
      std::vector<std::string> names;
      for (std::size_t i = 0; i < n_components; ++i) names.push_back("c" + std::to_string(i + 1));
      return names;
    }
  }
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  if (traj.n_components == 0 || traj.n_components > 255) {
    throw std::invalid_argument("trajectory: component count must fit in u8");
  }
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint64_t>(out, traj.size());
  put_le<double>(out, traj.t0);
  put_le<double>(out, traj.dt);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(traj.n_components));
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(traj.data.data()),
              static_cast<std::streamsize>(traj.data.size() * sizeof(double)));
  } else {
    for (double v : traj.data) put_le<double>(out, v);
  }
  if (!out) throw std::runtime_error("trajectory: write failed");
}

Trajectory read_trajectory(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("trajectory: bad magic");
  if (const auto version = get_le<std::uint32_t>(in); version != kVersion) {
    throw std::runtime_error("trajectory: unsupported version " + std::to_string(version));
  }
  Trajectory traj;
  const auto n = get_le<std::uint64_t>(in);
  traj.t0 = get_le<double>(in);
  traj.dt = get_le<double>(in);
  traj.n_components = get_le<std::uint8_t>(in);
  if (traj.n_components == 0) throw std::runtime_error("trajectory: zero components");
  traj.data.resize(n * traj.n_components);
  if constexpr (std::endian::native == std::endian::little) {
    in.read(reinterpret_cast<char*>(traj.data.data()),
            static_cast<std::streamsize>(traj.data.size() * sizeof(double)));
    if (!in) throw std::runtime_error("trajectory: truncated input");
  } else {
    for (auto& v : traj.data) v = get_le<double>(in);
  }
  return traj;
}

void save_trajectory(const std::string& path, const Trajectory& traj) {
  std::ostringstream buf(std::ios::binary);
  write_trajectory(buf, traj);
  write_file_atomic(path, buf.str());
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_trajectory(in);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << 't';
  for (const auto& name : component_names(traj.n_components)) out << ',' << name;
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << traj.time(i);
    for (double v : traj.row(i)) out << ',' << v;
    out << '\n';
  }
}

void save_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ostringstream buf;
  write_trajectory_csv(buf, traj);
  write_file_atomic(path, buf.str());
}

std::uint64_t steps_for(double days, double dt_days) {
  if (!(dt_days > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(days >= 0.0)) throw std::invalid_argument("duration must be >= 0");
  return static_cast<std::uint64_t>(std::llround(days / dt_days));
}

Trajectory spinup_then_record(const ModelParams& p, const State9& s0, double spinup_days,
                              double record_days, double dt_days, std::uint64_t stride) {
  if (!(spinup_days >= 0.0)) throw std::invalid_argument("spinup_days must be >= 0");
  p.validate();
  const L80Field field(p);
  State9 start = s0;
  if (const auto n_spin = steps_for(spinup_days, dt_days); n_spin > 0) {
    const Trajectory spin = integrate(field, start.v, dt_days, n_spin, n_spin);
    const auto last = spin.row(spin.size() - 1);
    std::copy(last.begin(), last.end(), start.v.begin());
  }
  return integrate(field, start.v, dt_days, steps_for(record_days, dt_days), stride);
}

State9 default_initial_state() {
  State9 s;
  for (int i = 0; i < 3; ++i) {
    s.y(i) = 0.1;
    s.z(i) = 0.1;
  }
  return s;
}

}  // namespace l80
