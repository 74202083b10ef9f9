#include "l80/lobes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "l80/errors.hpp"

namespace l80 {

void LobeSpec::validate() const {
  if (!(y_b > 0.0)) throw std::invalid_argument("lobe spec: y_b must be > 0");
  if (y_index > 2) throw std::invalid_argument("lobe spec: y_index must be 0, 1 or 2");
}

std::size_t y_column(std::size_t n_components, std::size_t y_index) {
  switch (n_components) {
    case 9:
      return 3 + y_index;
    case 3:
    case 6:
      return y_index;
    default:
      throw std::invalid_argument("trajectory layout has no y block");
  }
}

std::string to_string(Lobe lobe) { return lobe == Lobe::left ? "left" : "right"; }

std::vector<Extremum> local_extrema(std::span<const double> s) {
  std::vector<Extremum> out;
  const std::size_t n = s.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    const bool rise = s[i] > s[i - 1];
    const bool fall = s[i] < s[i - 1];
    if (!rise && !fall) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n && s[j] == s[i]) ++j;
    if (j < n) {
      if (rise && s[j] < s[i]) out.push_back({i, true});
      if (fall && s[j] > s[i]) out.push_back({i, false});
    }
    i = j;
  }
  return out;
}

TransitionAnalysis detect_transitions(std::span<const double> s, double t0, double dt, double y_b) {
  if (!(y_b > 0.0)) throw std::invalid_argument("detect_transitions: y_b must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("detect_transitions: dt must be > 0");
  for (double v : s) {
    if (!std::isfinite(v)) throw NonFiniteState();
  }

  std::vector<Extremum> armed;
  for (const auto& e : local_extrema(s)) {
    if ((e.is_max && s[e.index] > y_b) || (!e.is_max && s[e.index] < -y_b)) armed.push_back(e);
  }

  TransitionAnalysis res;
  std::vector<bool> into_left;
  for (std::size_t n = 1; n < armed.size(); ++n) {
    const auto& from = armed[n - 1];
    const auto& to = armed[n];
    if (from.is_max == to.is_max) continue;
    std::size_t k = from.index + 1;
    if (from.is_max) {
      while (!(s[k] < 0.0)) ++k;
    } else {
      while (!(s[k] > 0.0)) ++k;
    }
    const double before = s[k - 1];
    const double after = s[k];
    const double frac = before == after ? 0.0 : before / (before - after);
    res.transitions.push_back(t0 + dt * (static_cast<double>(k - 1) + frac));
    into_left.push_back(from.is_max);
  }
  for (std::size_t n = 1; n < res.transitions.size(); ++n) {
    const double enter = res.transitions[n - 1];
    const double exit = res.transitions[n];
    res.records.push_back({into_left[n - 1] ? Lobe::left : Lobe::right, enter, exit, exit - enter});
  }
  return res;
}

TransitionAnalysis detect_transitions(const Trajectory& traj, const LobeSpec& spec) {
  spec.validate();
  const auto series = traj.component(y_column(traj.n_components, spec.y_index));
  return detect_transitions(series, traj.t0, traj.dt, spec.y_b);
}

std::size_t Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

Histogram sojourn_histogram(std::span<const SojournRecord> records, double bin_width_days) {
  if (records.empty()) throw InsufficientData("sojourn_histogram: no records");
  if (!(bin_width_days > 0.0)) throw std::invalid_argument("sojourn_histogram: bin width must be > 0");
  const double longest = max_sojourn(records);
  const auto n_bins = static_cast<std::size_t>(std::floor(longest / bin_width_days)) + 1;
  Histogram h;
  h.bin_width = bin_width_days;
  h.counts.assign(n_bins, 0);
  for (std::size_t k = 0; k < n_bins; ++k) h.centers.push_back((static_cast<double>(k) + 0.5) * bin_width_days);
  for (const auto& r : records) {
    const auto k = std::min(n_bins - 1, static_cast<std::size_t>(std::floor(r.duration / bin_width_days)));
    ++h.counts[k];
  }
  return h;
}

ExpFit fit_exponential(const Histogram& hist, std::size_t min_count) {
  const std::size_t floor_count = std::max<std::size_t>(1, min_count);
  std::vector<double> t, y;
  for (std::size_t k = 0; k < hist.counts.size(); ++k) {
    if (hist.counts[k] >= floor_count) {
      t.push_back(hist.centers[k]);
      y.push_back(std::log(static_cast<double>(hist.counts[k])));
    }
  }
  if (t.size() < 3) throw InsufficientData("fit_exponential: need at least 3 populated bins");

  const double n = static_cast<double>(t.size());
  const double tm = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (y[i] - ym);
    syy += (y[i] - ym) * (y[i] - ym);
  }
  ExpFit fit;
  fit.b = sty / stt;
  fit.a = std::exp(ym - fit.b * tm);
  fit.t_min = t.front();
  fit.t_max = t.back();
  fit.bins_used = t.size();
  fit.r_squared = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;
  return fit;
}

double max_sojourn(std::span<const SojournRecord> records) {
  if (records.empty()) throw InsufficientData("max_sojourn: no records");
  double m = records.front().duration;
  for (const auto& r : records) m = std::max(m, r.duration);
  return m;
}

std::string records_csv(std::span<const SojournRecord> records) {
  std::ostringstream os;
  os.precision(17);
  os << "lobe,t_enter,t_exit,duration\n";
  for (const auto& r : records) {
    os << to_string(r.lobe) << ',' << r.t_enter << ',' << r.t_exit << ',' << r.duration << '\n';
  }
  return os.str();
}

std::string histogram_csv(const Histogram& hist) {
  std::ostringstream os;
  os.precision(17);
  os << "bin_center,count\n";
  for (std::size_t k = 0; k < hist.counts.size(); ++k) os << hist.centers[k] << ',' << hist.counts[k] << '\n';
  return os.str();
}

}  // namespace l80
