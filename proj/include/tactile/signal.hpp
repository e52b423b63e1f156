#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "tactile/error.hpp"
#include "tactile/recording.hpp"

namespace tactile {

// Transposed direct form II second-order section, a0 normalised to 1.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;

  std::complex<double> response(double omega) const {
    const std::complex<double> z1 = std::polar(1.0, -omega);
    const std::complex<double> z2 = z1 * z1;
    return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
  }

  double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

struct HighpassDesign {
  int order = 4;
  double cutoff_hz = 1.0;
  double sample_rate = 200.0;
  std::vector<Biquad> sections;

  // Single-pass magnitude |H(f)|.
  double magnitude(double freq_hz) const {
    const double omega = 2.0 * std::numbers::pi * freq_hz / sample_rate;
    double mag = 1.0;
    for (const auto& s : sections) mag *= std::abs(s.response(omega));
    return mag;
  }

  // Forward-backward filtering squares the single-pass magnitude and cancels phase.
  double zero_phase_gain(double freq_hz) const {
    const double m = magnitude(freq_hz);
    return m * m;
  }
};

// Butterworth high-pass via the bilinear transform with frequency prewarping.
// Even orders only; each conjugate pole pair becomes one biquad.
inline HighpassDesign butterworth_highpass(int order, double cutoff_hz, double sample_rate) {
  if (order < 2 || order % 2 != 0)
    throw ParameterError("high-pass order must be a positive even number, got " + std::to_string(order));
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate / 2.0))
    throw ParameterError("high-pass cutoff must lie in (0, Nyquist), got " + std::to_string(cutoff_hz) + " Hz");

  HighpassDesign d{order, cutoff_hz, sample_rate, {}};
  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate);
  const double k2 = k * k;
  for (int p = 0; p < order / 2; ++p) {
    const double damping = 2.0 * std::sin(std::numbers::pi * (2.0 * p + 1.0) / (2.0 * order));
    const double a0 = 1.0 + damping * k + k2;
    d.sections.push_back({1.0 / a0, -2.0 / a0, 1.0 / a0, 2.0 * (k2 - 1.0) / a0, (1.0 - damping * k + k2) / a0});
  }
  return d;
}

namespace detail {

struct SectionState {
  double z1 = 0, z2 = 0;
};

// Per-section state that makes a unit step pass with no transient, chained through each
// section's DC gain.
inline std::vector<SectionState> step_initial_state(const std::vector<Biquad>& sections) {
  std::vector<SectionState> zi;
  double scale = 1.0;
  for (const auto& s : sections) {
    const double g = s.dc_gain();
    const double z2 = s.b2 - s.a2 * g;
    const double z1 = s.b1 - s.a1 * g + z2;
    zi.push_back({z1 * scale, z2 * scale});
    scale *= g;
  }
  return zi;
}

inline void sosfilt(const std::vector<Biquad>& sections, std::vector<SectionState> state, std::vector<double>& x) {
  for (double& v : x) {
    double in = v;
    for (std::size_t k = 0; k < sections.size(); ++k) {
      const auto& s = sections[k];
      auto& z = state[k];
      const double out = s.b0 * in + z.z1;
      z.z1 = s.b1 * in - s.a1 * out + z.z2;
      z.z2 = s.b2 * in - s.a2 * out;
      in = out;
    }
    v = in;
  }
}

// Zero-phase filtering with odd-reflection padding and steady-state initial conditions.
inline std::vector<double> sosfiltfilt(const HighpassDesign& d, const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const std::size_t pad = std::min<std::size_t>(n - 1, 3 * (2 * d.sections.size() + 1));

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x.back() - x[n - 1 - i]);

  const auto zi = step_initial_state(d.sections);
  auto scaled = [&](double x0) {
    auto z = zi;
    for (auto& s : z) {
      s.z1 *= x0;
      s.z2 *= x0;
    }
    return z;
  };

  sosfilt(d.sections, scaled(ext.front()), ext);
  std::reverse(ext.begin(), ext.end());
  sosfilt(d.sections, scaled(ext.front()), ext);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace detail

inline Recording highpass_filter(const Recording& rec, const HighpassDesign& design) {
  check_finite(rec);
  if (design.sample_rate != rec.sample_rate)
    throw ParameterError("filter designed for " + std::to_string(design.sample_rate) + " Hz applied to " +
                         std::to_string(rec.sample_rate) + " Hz recording");
  Recording out = rec;
  for (std::size_t a = 0; a < kAxes; ++a) {
    const auto filtered = detail::sosfiltfilt(design, rec.axis(a));
    for (std::size_t i = 0; i < filtered.size(); ++i) out.samples[i][a] = filtered[i];
  }
  return out;
}

inline Recording highpass_filter(const Recording& rec, double cutoff_hz, int order = 4) {
  check_finite(rec);
  return highpass_filter(rec, butterworth_highpass(order, cutoff_hz, rec.sample_rate));
}

inline std::size_t bin_length(double bin_duration_s, double sample_rate) {
  const auto len = static_cast<std::size_t>(std::llround(bin_duration_s * sample_rate));
  if (len == 0) throw ParameterError("bin duration shorter than one sample");
  return len;
}

struct BinnedSeries {
  double sample_rate = 200.0;
  double bin_duration_s = 0.15;
  std::size_t bin_len = 0;
  std::vector<std::vector<Sample>> bins;
  std::vector<double> bin_start_times_s;  // relative to trial start

  std::size_t size() const { return bins.size(); }

  std::vector<double> axis(std::size_t bin, std::size_t a) const {
    std::vector<double> out(bin_len);
    for (std::size_t i = 0; i < bin_len; ++i) out[i] = bins[bin][i][a];
    return out;
  }
};

// Contiguous non-overlapping bins anchored at the first sample; a trailing partial bin is dropped.
inline BinnedSeries segment_bins(const Recording& rec, double bin_duration_s) {
  const std::size_t len = bin_length(bin_duration_s, rec.sample_rate);
  if (rec.size() < len)
    throw EmptyResultError("recording of " + std::to_string(rec.size()) + " samples is shorter than one " +
                           std::to_string(len) + "-sample bin");
  BinnedSeries out{rec.sample_rate, bin_duration_s, len, {}, {}};
  const std::size_t count = rec.size() / len;
  out.bins.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto first = rec.samples.begin() + static_cast<std::ptrdiff_t>(k * len);
    out.bins.emplace_back(first, first + static_cast<std::ptrdiff_t>(len));
    out.bin_start_times_s.push_back(rec.t0_s + static_cast<double>(k * len) / rec.sample_rate);
  }
  return out;
}

// Restrict to [start_s, end_s) measured from the start of `rec`.
inline Recording slice_window(const Recording& rec, double start_s, double end_s) {
  if (!(start_s >= 0.0) || !(start_s < end_s))
    throw RangeError("window [" + std::to_string(start_s) + ", " + std::to_string(end_s) + ") is empty or negative");
  const auto first = static_cast<std::size_t>(std::llround(start_s * rec.sample_rate));
  const auto last = static_cast<std::size_t>(std::llround(end_s * rec.sample_rate));
  if (last > rec.size())
    throw RangeError("window end " + std::to_string(end_s) + " s exceeds recording duration " +
                     std::to_string(rec.duration_s()) + " s");
  Recording out;
  out.sample_rate = rec.sample_rate;
  out.meta = rec.meta;
  out.t0_s = rec.t0_s + static_cast<double>(first) / rec.sample_rate;
  out.samples.assign(rec.samples.begin() + static_cast<std::ptrdiff_t>(first),
                     rec.samples.begin() + static_cast<std::ptrdiff_t>(last));
  if (!rec.load_trace.empty())
    out.load_trace.assign(rec.load_trace.begin() + static_cast<std::ptrdiff_t>(first),
                          rec.load_trace.begin() + static_cast<std::ptrdiff_t>(last));
  return out;
}

}  // namespace tactile
