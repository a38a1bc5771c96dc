#pragma once

#include <cstddef>
#include <vector>

namespace rydcav {

// Times of strict local maxima of y, refined by a three-point parabola.
// Only samples with t in [t_begin, t_end] are considered.
std::vector<double> peak_times(const std::vector<double>& t, const std::vector<double>& y,
                               double t_begin, double t_end);

// Angular frequency 2 pi / (mean peak spacing) over the window; NaN with
// fewer than two peaks.
double oscillation_frequency(const std::vector<double>& t, const std::vector<double>& y,
                             double t_begin, double t_end);

// Half the max - min spread of y inside a centered window of `window`
// samples (clipped at the ends).
std::vector<double> sliding_envelope(const std::vector<double>& y, std::size_t window);

struct RevivalAnalysis {
  double initial_amplitude = 0.0;
  double collapse_min = 0.0;   // smallest envelope after the initial one
  double collapse_time = 0.0;
  double revival_max = 0.0;    // largest envelope after the collapse
  double revival_time = 0.0;   // envelope-weighted center of the revival lobe
};

// Envelope-based collapse/revival summary. The initial amplitude is the
// half spread of y over [0, initial_window]; the collapse minimum is
// searched in [initial_window, collapse_end] and the revival maximum after
// the collapse.
RevivalAnalysis analyze_revival(const std::vector<double>& t, const std::vector<double>& y,
                                std::size_t window, double initial_window, double collapse_end);

}  // namespace rydcav
