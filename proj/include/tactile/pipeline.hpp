#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "tactile/features.hpp"
#include "tactile/recording.hpp"
#include "tactile/signal.hpp"

namespace tactile {

// Constants that define what a feature means. They travel with trained models and must match
// at evaluation time.
struct PipelineConfig {
  double cutoff_hz = 1.0;
  int filter_order = 4;
  FeatureConfig features;

  bool operator==(const PipelineConfig&) const = default;
};

struct Window {
  double start_s = 0.0;
  double end_s = 0.0;

  double length() const { return end_s - start_s; }
  bool overlaps(const Window& o) const { return start_s < o.end_s && o.start_s < end_s; }
  bool operator==(const Window&) const = default;
};

inline std::string to_string(const Window& w) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "[%g,%g)", w.start_s, w.end_s);
  return buf;
}

// Whole-trial validation and high-pass filtering. Windows are cut from the filtered trial.
inline Recording preprocess(const Recording& rec, const PipelineConfig& cfg) {
  validate(rec);
  return highpass_filter(rec, cfg.cutoff_hz, cfg.filter_order);
}

struct WindowFeatures {
  std::vector<FeatureVector> features;  // raw, one per bin
  std::vector<double> bin_start_s;      // relative to trial start
  double bin_duration_s = 0.0;
};

inline WindowFeatures window_features(const Recording& filtered, const Window& w, const PipelineConfig& cfg) {
  const auto series = segment_bins(slice_window(filtered, w.start_s, w.end_s), cfg.features.bin_duration_s);
  return {featurize(series, cfg.features), series.bin_start_times_s,
          static_cast<double>(series.bin_len) / series.sample_rate};
}

}  // namespace tactile
