#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tactile/error.hpp"

namespace tactile {

inline constexpr std::size_t kAxes = 6;
inline constexpr std::array<std::string_view, kAxes> kAxisNames = {"x", "y", "z", "roll", "pitch", "yaw"};

// Highest analysed frequency; sample rates must put it at or below Nyquist.
inline constexpr double kTopBandHz = 100.0;

using Sample = std::array<double, kAxes>;

enum class Effector { finger, pen };

inline std::string_view to_string(Effector e) { return e == Effector::finger ? "finger" : "pen"; }

inline Effector effector_from_string(std::string_view s) {
  if (s == "finger") return Effector::finger;
  if (s == "pen") return Effector::pen;
  throw ValidationError("unknown effector '" + std::string(s) + "'");
}

struct TrialMeta {
  std::string material;
  int speed_rpm = 60;
  double load_n = 0.49;
  Effector effector = Effector::finger;
  std::string participant;
  std::string trial_id;

  bool operator==(const TrialMeta&) const = default;
};

// One touch trial. Rows of `samples` are time steps in axis order x, y, z, roll, pitch, yaw.
struct Recording {
  double sample_rate = 200.0;
  std::vector<Sample> samples;
  std::vector<double> load_trace;  // empty, or one value per sample
  TrialMeta meta;
  double t0_s = 0.0;  // time of the first row relative to trial start

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate; }

  std::vector<double> axis(std::size_t a) const {
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i][a];
    return out;
  }
};

inline void check_sample_rate(double sample_rate) {
  if (!(std::isfinite(sample_rate) && sample_rate >= 2.0 * kTopBandHz))
    throw ParameterError("sample rate must be at least " + std::to_string(2.0 * kTopBandHz) +
                         " Hz, got " + std::to_string(sample_rate));
}

inline void check_finite(const Recording& rec) {
  for (std::size_t i = 0; i < rec.samples.size(); ++i)
    for (double v : rec.samples[i])
      if (!std::isfinite(v))
        throw ValidationError("non-finite acceleration sample at row " + std::to_string(i));
}

// Full ingest check: structure, finiteness and the one-second minimum length.
inline void validate(const Recording& rec) {
  check_sample_rate(rec.sample_rate);
  check_finite(rec);
  if (static_cast<double>(rec.samples.size()) < std::round(rec.sample_rate))
    throw ValidationError("recording '" + rec.meta.trial_id + "' is shorter than one second");
  if (!rec.load_trace.empty() && rec.load_trace.size() != rec.samples.size())
    throw ValidationError("load trace length " + std::to_string(rec.load_trace.size()) +
                          " does not match sample count " + std::to_string(rec.samples.size()));
}

}  // namespace tactile
