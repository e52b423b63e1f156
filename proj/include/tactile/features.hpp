#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tactile/error.hpp"
#include "tactile/fft.hpp"
#include "tactile/recording.hpp"
#include "tactile/signal.hpp"

namespace tactile {

inline constexpr std::size_t kBands = 10;
inline constexpr double kBandWidthHz = 10.0;
inline constexpr std::size_t kFeaturesPerAxis = kBands + 2;
inline constexpr std::size_t kFeatureDim = kAxes * kFeaturesPerAxis;
inline constexpr std::size_t kRmsSlot = kBands;
inline constexpr std::size_t kDiffSlot = kBands + 1;

struct FeatureConfig {
  double bin_duration_s = 0.15;
  // Hann-windowed bins are zero-padded to this transform length before band medians are taken.
  std::size_t fft_size = 256;

  bool operator==(const FeatureConfig&) const = default;
};

// Per-axis blocks in axis order; each block is ten band medians, rms, mean |first difference|.
struct FeatureVector {
  std::array<double, kFeatureDim> values{};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
  bool operator==(const FeatureVector&) const = default;
};

inline constexpr std::size_t feature_index(std::size_t axis, std::size_t slot) {
  return axis * kFeaturesPerAxis + slot;
}

inline std::vector<std::string> feature_names() {
  std::vector<std::string> names;
  names.reserve(kFeatureDim);
  for (auto axis : kAxisNames) {
    for (std::size_t b = 0; b < kBands; ++b) names.push_back(std::string(axis) + "_band" + std::to_string(b));
    names.push_back(std::string(axis) + "_rms");
    names.push_back(std::string(axis) + "_mafd");
  }
  return names;
}

// Periodic Hann window.
inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

namespace detail {

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace detail

// One-sided power spectral density of a Hann-windowed, zero-padded bin; element k sits at
// k * sample_rate / fft_size Hz.
inline std::vector<double> padded_periodogram(std::span<const double> bin, double sample_rate, std::size_t fft_size) {
  const auto w = hann_window(bin.size());
  std::vector<double> x(bin.size());
  double wsum2 = 0.0;
  for (std::size_t i = 0; i < bin.size(); ++i) {
    x[i] = bin[i] * w[i];
    wsum2 += w[i] * w[i];
  }
  const auto spec = rfft_padded(x, fft_size);
  const std::size_t half = fft_size / 2;
  std::vector<double> psd(half + 1);
  const double scale = 1.0 / (sample_rate * wsum2);
  for (std::size_t k = 0; k <= half; ++k) {
    psd[k] = std::norm(spec[k]) * scale;
    if (k != 0 && k != half) psd[k] *= 2.0;
  }
  return psd;
}

inline std::array<double, kBands> band_median_powers(std::span<const double> bin, double sample_rate,
                                                     const FeatureConfig& cfg = {}) {
  check_sample_rate(sample_rate);
  const std::size_t expected = bin_length(cfg.bin_duration_s, sample_rate);
  if (bin.size() != expected)
    throw ValidationError("bin has " + std::to_string(bin.size()) + " samples, expected " + std::to_string(expected));
  if (!is_power_of_two(cfg.fft_size) || cfg.fft_size < bin.size())
    throw ParameterError("fft_size must be a power of two no shorter than the bin");

  const auto psd = padded_periodogram(bin, sample_rate, cfg.fft_size);
  std::array<std::vector<double>, kBands> members;
  for (std::size_t k = 0; k < psd.size(); ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(cfg.fft_size);
    const auto band = static_cast<std::size_t>(std::floor(f / kBandWidthHz));
    if (band < kBands) members[band].push_back(psd[k]);
  }
  std::array<double, kBands> out{};
  for (std::size_t b = 0; b < kBands; ++b) out[b] = detail::median_of(std::move(members[b]));
  return out;
}

inline double rms(std::span<const double> x) {
  if (x.empty()) throw ValidationError("rms of an empty bin");
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

inline double mean_abs_first_diff(std::span<const double> x) {
  if (x.size() < 2) throw ValidationError("first difference needs at least two samples");
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += std::abs(x[i] - x[i - 1]);
  return s / static_cast<double>(x.size() - 1);
}

inline FeatureVector featurize_bin(std::span<const Sample> bin, double sample_rate, const FeatureConfig& cfg = {}) {
  FeatureVector fv;
  std::vector<double> axis(bin.size());
  for (std::size_t a = 0; a < kAxes; ++a) {
    for (std::size_t i = 0; i < bin.size(); ++i) axis[i] = bin[i][a];
    const auto bands = band_median_powers(axis, sample_rate, cfg);
    for (std::size_t b = 0; b < kBands; ++b) fv[feature_index(a, b)] = bands[b];
    fv[feature_index(a, kRmsSlot)] = rms(axis);
    fv[feature_index(a, kDiffSlot)] = mean_abs_first_diff(axis);
  }
  return fv;
}

inline std::vector<FeatureVector> featurize(const BinnedSeries& series, const FeatureConfig& cfg = {}) {
  std::vector<FeatureVector> out;
  out.reserve(series.size());
  for (const auto& bin : series.bins) out.push_back(featurize_bin(bin, series.sample_rate, cfg));
  return out;
}

// Per-dimension z-scoring statistics fitted on training rows only.
struct StandardizationStats {
  static constexpr double kMinStd = 1e-12;

  std::array<double, kFeatureDim> mean{};
  std::array<double, kFeatureDim> std{};

  bool operator==(const StandardizationStats&) const = default;
};

inline StandardizationStats fit_standardization(std::span<const FeatureVector> rows) {
  if (rows.empty()) throw ValidationError("cannot fit standardization on an empty set");
  StandardizationStats st;
  const auto n = static_cast<double>(rows.size());
  for (std::size_t j = 0; j < kFeatureDim; ++j) {
    double m = 0.0;
    bool constant = true;
    for (const auto& r : rows) {
      m += r[j];
      constant = constant && r[j] == rows.front()[j];
    }
    m /= n;
    double v = 0.0;
    for (const auto& r : rows) v += (r[j] - m) * (r[j] - m);
    st.mean[j] = constant ? rows.front()[j] : m;
    st.std[j] = constant ? StandardizationStats::kMinStd : std::max(std::sqrt(v / n), StandardizationStats::kMinStd);
  }
  return st;
}

// Dimensions whose training spread hit the clamp map to zero.
inline FeatureVector apply_standardization(const StandardizationStats& st, const FeatureVector& x) {
  FeatureVector out;
  for (std::size_t j = 0; j < kFeatureDim; ++j)
    out[j] = st.std[j] <= StandardizationStats::kMinStd ? 0.0 : (x[j] - st.mean[j]) / st.std[j];
  return out;
}

inline std::vector<FeatureVector> apply_standardization(const StandardizationStats& st,
                                                        std::span<const FeatureVector> rows) {
  std::vector<FeatureVector> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(apply_standardization(st, r));
  return out;
}

}  // namespace tactile
