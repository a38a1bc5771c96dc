#include "rydcav/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rydcav/errors.hpp"

namespace rydcav {

namespace {

void check_series(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size()) throw InvalidInput("time and value series differ in length");
}

}  // namespace

std::vector<double> peak_times(const std::vector<double>& t, const std::vector<double>& y,
                               double t_begin, double t_end) {
  check_series(t, y);
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (t[i] < t_begin || t[i] > t_end) continue;
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
    const double curv = y[i - 1] - 2.0 * y[i] + y[i + 1];
    double shift = 0.0;
    if (curv < 0.0) shift = 0.5 * (y[i - 1] - y[i + 1]) / curv;
    const double h = shift >= 0.0 ? t[i + 1] - t[i] : t[i] - t[i - 1];
    out.push_back(t[i] + shift * h);
  }
  return out;
}

double oscillation_frequency(const std::vector<double>& t, const std::vector<double>& y,
                             double t_begin, double t_end) {
  const auto peaks = peak_times(t, y, t_begin, t_end);
  if (peaks.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double period = (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
  return 2.0 * std::numbers::pi / period;
}

std::vector<double> sliding_envelope(const std::vector<double>& y, std::size_t window) {
  std::vector<double> out(y.size(), 0.0);
  const std::size_t half = window / 2;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(y.size() - 1, i + half);
    const auto [mn, mx] = std::minmax_element(y.begin() + static_cast<std::ptrdiff_t>(lo),
                                              y.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    out[i] = 0.5 * (*mx - *mn);
  }
  return out;
}

RevivalAnalysis analyze_revival(const std::vector<double>& t, const std::vector<double>& y,
                                std::size_t window, double initial_window, double collapse_end) {
  check_series(t, y);
  if (y.empty()) throw InvalidInput("empty series");
  RevivalAnalysis r;
  double mn = std::numeric_limits<double>::infinity(), mx = -mn;
  for (std::size_t i = 0; i < y.size() && t[i] <= initial_window; ++i) {
    mn = std::min(mn, y[i]);
    mx = std::max(mx, y[i]);
  }
  r.initial_amplitude = 0.5 * (mx - mn);

  const auto env = sliding_envelope(y, window);
  std::size_t i_min = 0;
  r.collapse_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < env.size(); ++i) {
    if (t[i] < initial_window || t[i] > collapse_end) continue;
    if (env[i] < r.collapse_min) {
      r.collapse_min = env[i];
      i_min = i;
    }
  }
  r.collapse_time = t[i_min];

  std::size_t i_max = i_min;
  r.revival_max = 0.0;
  for (std::size_t i = i_min; i < env.size(); ++i) {
    if (env[i] > r.revival_max) {
      r.revival_max = env[i];
      i_max = i;
    }
  }
  // Centroid of the contiguous lobe above half the revival maximum.
  std::size_t lo = i_max, hi = i_max;
  const double level = 0.5 * r.revival_max;
  while (lo > i_min && env[lo - 1] > level) --lo;
  while (hi + 1 < env.size() && env[hi + 1] > level) ++hi;
  double w = 0.0, wt = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    w += env[i];
    wt += env[i] * t[i];
  }
  r.revival_time = w > 0.0 ? wt / w : t[i_max];
  return r;
}

}  // namespace rydcav
