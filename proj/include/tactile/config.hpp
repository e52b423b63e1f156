#pragma once

#include <cstdint>
#include <string>

#include "tactile/decoder.hpp"
#include "tactile/eval.hpp"
#include "tactile/pipeline.hpp"
#include "tactile/synth.hpp"

namespace tactile {

struct RunPaths {
  std::string corpus_dir = "corpus";
  std::string model_file = "model.json";
  std::string report_file = "report.json";

  bool operator==(const RunPaths&) const = default;
};

struct SynthSettings {
  std::size_t participants = 6;
  std::size_t pen_sessions = 0;
  bool hard = false;
  double duration_s = 10.0;
  double sample_rate = 200.0;

  bool operator==(const SynthSettings&) const = default;
};

// Everything a command needs; embedded in model and report files for provenance.
struct RunConfig {
  RunPaths paths;
  PipelineConfig pipeline;
  DecoderConfig decoder;
  ProtocolConfig protocol;
  SynthSettings synth;
  std::uint64_t seed = 42;

  bool operator==(const RunConfig&) const = default;
};

inline void validate(const RunConfig& cfg) {
  if (!(cfg.pipeline.cutoff_hz > 0)) throw ValidationError("cutoff_hz must be positive");
  if (cfg.pipeline.filter_order <= 0) throw ValidationError("filter_order must be positive");
  if (!(cfg.pipeline.features.bin_duration_s > 0)) throw ValidationError("bin_duration_s must be positive");
  if (!is_power_of_two(cfg.pipeline.features.fft_size)) throw ValidationError("fft_pad must be a power of two");
  if (cfg.decoder.lambda_grid.empty()) throw ValidationError("lambda grid is empty");
  for (double l : cfg.decoder.lambda_grid)
    if (!(l > 0)) throw ValidationError("lambda grid values must be positive");
  if (cfg.decoder.cv_folds < 2) throw ValidationError("cv_folds must be at least 2");
  if (!(cfg.decoder.solver.tol > 0) || cfg.decoder.solver.max_iter <= 0)
    throw ValidationError("solver tolerance and iteration cap must be positive");
  validate_protocol(cfg.protocol);
}

inline CorpusPlan corpus_plan(const RunConfig& cfg) {
  CorpusPlan plan;
  plan.participants = cfg.synth.participants;
  plan.pen_sessions = cfg.synth.pen_sessions;
  plan.materials = default_material_bank(cfg.synth.hard);
  plan.speeds_rpm = cfg.protocol.speeds_rpm;
  plan.loads_n = cfg.protocol.loads_n;
  plan.duration_s = cfg.synth.duration_s;
  plan.sample_rate = cfg.synth.sample_rate;
  plan.seed = cfg.seed;
  return plan;
}

}  // namespace tactile
