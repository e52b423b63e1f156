#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "tactile/error.hpp"
#include "tactile/features.hpp"
#include "tactile/fft.hpp"
#include "tactile/random.hpp"
#include "tactile/recording.hpp"

namespace tactile {

// Amplitudes are specified at this load; they scale as (load / kReferenceLoadN)^roughness_exponent.
inline constexpr double kReferenceLoadN = 0.98;
// Rotational axes carry the same vibration at this fraction of the linear-axis amplitude.
inline constexpr double kRotationalCoupling = 0.2;
inline constexpr double kLoadWander = 0.05;

struct SpatialComponent {
  double spatial_freq = 0.0;  // cycles per drum revolution
  double amplitude = 0.0;     // m/s^2
};

struct MaterialSpec {
  std::string label;
  std::vector<SpatialComponent> components;
  std::array<double, kBands> noise_profile{};  // variance contributed by each 10 Hz band, (m/s^2)^2
  double roughness_exponent = 0.5;
};

inline double temporal_freq(double spatial_freq, int speed_rpm) { return spatial_freq * speed_rpm / 60.0; }

inline double load_factor(const MaterialSpec& spec, double load_n) {
  return std::pow(load_n / kReferenceLoadN, spec.roughness_exponent);
}

// Model-level power per 10 Hz band on a linear axis: noise variance plus sinusoid power a^2/2.
inline std::array<double, kBands> expected_band_powers(const MaterialSpec& spec, int speed_rpm, double load_n) {
  const double lf2 = std::pow(load_factor(spec, load_n), 2);
  std::array<double, kBands> p{};
  for (std::size_t b = 0; b < kBands; ++b) p[b] = spec.noise_profile[b] * lf2;
  for (const auto& c : spec.components) {
    const auto band = static_cast<std::size_t>(temporal_freq(c.spatial_freq, speed_rpm) / kBandWidthHz);
    if (band < kBands) p[band] += 0.5 * c.amplitude * c.amplitude * lf2;
  }
  return p;
}

namespace detail {

inline MaterialSpec banded_material(std::string label, std::size_t signature, std::size_t secondary,
                                    std::vector<SpatialComponent> comps, double exponent, bool hard) {
  MaterialSpec s{std::move(label), std::move(comps), {}, exponent};
  const double floor = hard ? 0.05 : 0.02;
  s.noise_profile.fill(floor);
  s.noise_profile[signature] = hard ? 0.12 : 1.0;
  s.noise_profile[secondary] = hard ? 0.09 : 0.15;
  return s;
}

}  // namespace detail

// Seven materials, each with a dominant noise band and a weaker band that overlaps another
// material's dominant one. Hard mode narrows the contrast between them.
inline std::vector<MaterialSpec> default_material_bank(bool hard = false) {
  using detail::banded_material;
  return {
      banded_material("plastic", 1, 2, {{6.0, 0.25}}, 0.50, hard),
      banded_material("cork", 2, 3, {{14.0, 0.20}}, 0.55, hard),
      banded_material("wool", 3, 1, {{10.0, 0.15}}, 0.45, hard),
      banded_material("aluminum", 4, 5, {{40.0, 0.30}}, 0.50, hard),
      banded_material("paper", 5, 6, {{22.0, 0.20}}, 0.50, hard),
      banded_material("denim", 6, 4, {{30.0, 0.30}}, 0.55, hard),
      banded_material("cotton", 7, 8, {{18.0, 0.15}}, 0.45, hard),
  };
}

struct TrialParams {
  int speed_rpm = 60;
  double load_n = 0.98;
  double duration_s = 10.0;
  double sample_rate = 200.0;
  std::uint64_t seed = 0;
  Sample axis_gain = {1, 1, 1, 1, 1, 1};  // per-participant sensor gain
};

namespace detail {

// Stationary Gaussian noise whose variance in band b equals power[b].
inline std::vector<double> band_shaped_noise(const std::array<double, kBands>& power, std::size_t n,
                                             double sample_rate, Rng& rng) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  std::array<std::size_t, kBands> count{};
  auto band_of = [&](std::size_t k) {
    return static_cast<std::size_t>(static_cast<double>(k) * sample_rate / static_cast<double>(m) / kBandWidthHz);
  };
  for (std::size_t k = 1; k < m / 2; ++k)
    if (band_of(k) < kBands) ++count[band_of(k)];

  std::vector<std::complex<double>> w(m);
  for (auto& v : w) v = rng.normal();
  fft_inplace(w);
  w[0] = 0.0;
  w[m / 2] = 0.0;
  for (std::size_t k = 1; k < m / 2; ++k) {
    const std::size_t b = band_of(k);
    const double g = b < kBands && count[b] > 0 ? std::sqrt(power[b] * static_cast<double>(m) / (2.0 * count[b])) : 0.0;
    w[k] *= g;
    w[m - k] *= g;
  }
  fft_inplace(w, true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = w[i].real();
  return out;
}

}  // namespace detail

inline Recording generate_trial(const MaterialSpec& spec, const TrialParams& p) {
  if (!(p.duration_s > 0) || !(p.load_n > 0) || p.speed_rpm <= 0 || !(p.sample_rate > 0))
    throw ParameterError("trial parameters must be positive");
  for (const auto& c : spec.components) {
    if (c.amplitude < 0) throw ParameterError("component amplitude must be non-negative");
    if (c.amplitude > 0 && temporal_freq(c.spatial_freq, p.speed_rpm) >= p.sample_rate / 2.0)
      throw ParameterError("component at " + std::to_string(c.spatial_freq) + " cycles/rev excites " +
                           std::to_string(temporal_freq(c.spatial_freq, p.speed_rpm)) + " Hz, at or above Nyquist");
  }

  const auto n = static_cast<std::size_t>(std::llround(p.duration_s * p.sample_rate));
  Recording rec;
  rec.sample_rate = p.sample_rate;
  rec.samples.assign(n, Sample{});
  rec.meta.material = spec.label;
  rec.meta.speed_rpm = p.speed_rpm;
  rec.meta.load_n = p.load_n;

  Rng rng(p.seed);
  const double lf = load_factor(spec, p.load_n);
  std::array<double, kBands> noise_power{};
  bool has_noise = false;
  for (std::size_t b = 0; b < kBands; ++b) {
    noise_power[b] = spec.noise_profile[b] * lf * lf;
    has_noise = has_noise || noise_power[b] > 0;
  }

  for (std::size_t a = 0; a < kAxes; ++a) {
    const double scale = (a < 3 ? 1.0 : kRotationalCoupling) * p.axis_gain[a];
    for (const auto& c : spec.components) {
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double omega = 2.0 * std::numbers::pi * temporal_freq(c.spatial_freq, p.speed_rpm);
      const double amp = c.amplitude * lf * scale;
      if (amp == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i)
        rec.samples[i][a] += amp * std::sin(omega * static_cast<double>(i) / p.sample_rate + phase);
    }
    if (has_noise) {
      const auto noise = detail::band_shaped_noise(noise_power, n, p.sample_rate, rng);
      for (std::size_t i = 0; i < n; ++i) rec.samples[i][a] += scale * noise[i];
    }
  }

  // Slow wander of the held force, bounded by the weights summing to one.
  constexpr std::array<double, 3> weights = {0.5, 0.3, 0.2};
  std::array<double, 3> freq{}, phase{};
  for (std::size_t q = 0; q < 3; ++q) {
    freq[q] = rng.uniform(0.05, 0.5);
    phase[q] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  rec.load_trace.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / p.sample_rate;
    double wander = 0.0;
    for (std::size_t q = 0; q < 3; ++q) wander += weights[q] * std::sin(2.0 * std::numbers::pi * freq[q] * t + phase[q]);
    rec.load_trace[i] = p.load_n * (1.0 + kLoadWander * wander);
  }
  return rec;
}

inline Recording generate_trial(const MaterialSpec& spec, int speed_rpm, double load_n, double duration_s,
                                double sample_rate, std::uint64_t seed) {
  return generate_trial(spec, TrialParams{speed_rpm, load_n, duration_s, sample_rate, seed, {1, 1, 1, 1, 1, 1}});
}

struct CorpusPlan {
  std::size_t participants = 6;
  std::size_t pen_sessions = 0;  // extra sessions tagged with the pen effector
  std::vector<MaterialSpec> materials = default_material_bank();
  std::vector<int> speeds_rpm = {30, 60, 120};
  std::vector<double> loads_n = {0.49, 1.96};
  double duration_s = 10.0;
  double sample_rate = 200.0;
  std::uint64_t seed = 42;
  double gain_jitter = 0.1;  // per-participant, per-axis gain drawn from [1 - j, 1 + j]
};

struct CorpusEntry {
  Recording recording;
  std::uint64_t seed = 0;
};

inline std::string format_trial_id(const std::string& participant, const std::string& material, int speed_rpm,
                                   double load_n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%drpm-%.2fN", speed_rpm, load_n);
  return participant + "-" + material + "-" + buf;
}

inline std::vector<CorpusEntry> generate_corpus(const CorpusPlan& plan) {
  if (plan.materials.empty() || plan.speeds_rpm.empty() || plan.loads_n.empty())
    throw ParameterError("corpus plan needs materials, speeds and loads");
  if (plan.participants + plan.pen_sessions == 0) throw ParameterError("corpus plan has no sessions");
  if (plan.gain_jitter < 0 || plan.gain_jitter >= 1) throw ParameterError("gain jitter must lie in [0, 1)");

  std::vector<CorpusEntry> out;
  const std::size_t sessions = plan.participants + plan.pen_sessions;
  for (std::size_t s = 0; s < sessions; ++s) {
    const bool pen = s >= plan.participants;
    char name[16];
    std::snprintf(name, sizeof name, pen ? "pen%02zu" : "P%02zu", (pen ? s - plan.participants : s) + 1);

    Rng gain_rng(derive_seed(plan.seed, s, 0xA11CE));
    Sample gain{};
    for (auto& g : gain) g = gain_rng.uniform(1.0 - plan.gain_jitter, 1.0 + plan.gain_jitter);

    std::uint64_t trial_index = 0;
    for (int speed : plan.speeds_rpm) {
      for (double load : plan.loads_n) {
        for (const auto& spec : plan.materials) {
          const std::uint64_t seed = derive_seed(plan.seed, s + 1, ++trial_index);
          Recording rec = generate_trial(spec, {speed, load, plan.duration_s, plan.sample_rate, seed, gain});
          rec.meta.effector = pen ? Effector::pen : Effector::finger;
          rec.meta.participant = name;
          rec.meta.trial_id = format_trial_id(name, spec.label, speed, load);
          out.push_back({std::move(rec), seed});
        }
      }
    }
  }
  return out;
}

inline std::vector<Recording> recordings_of(const std::vector<CorpusEntry>& corpus) {
  std::vector<Recording> out;
  out.reserve(corpus.size());
  for (const auto& e : corpus) out.push_back(e.recording);
  return out;
}

}  // namespace tactile
