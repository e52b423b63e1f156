#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tactile/decoder.hpp"
#include "tactile/error.hpp"
#include "tactile/pipeline.hpp"

namespace tactile {

inline double chance_level(std::size_t n_materials) {
  if (n_materials == 0) throw ValidationError("chance level needs at least one material");
  return 1.0 / static_cast<double>(n_materials);
}

// Rows are true materials, columns predicted.
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> counts;

  explicit ConfusionMatrix(std::vector<std::string> l = {})
      : labels(std::move(l)), counts(labels.size(), std::vector<std::size_t>(labels.size(), 0)) {}

  std::size_t index_of(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw ValidationError("label '" + label + "' is not in the confusion matrix");
    return static_cast<std::size_t>(it - labels.begin());
  }

  void add(const std::string& truth, const std::string& predicted) { ++counts[index_of(truth)][index_of(predicted)]; }

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& r : counts)
      for (auto c : r) t += c;
    return t;
  }

  std::size_t trace() const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
  }

  std::size_t row_total(std::size_t i) const {
    std::size_t t = 0;
    for (auto c : counts[i]) t += c;
    return t;
  }

  double accuracy() const { return total() == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(total()); }

  // Drops one material's row and column, e.g. to report accuracy over the remaining classes.
  ConfusionMatrix without(const std::string& label) const {
    const std::size_t skip = index_of(label);
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (i != skip) kept.push_back(labels[i]);
    ConfusionMatrix out(kept);
    for (std::size_t i = 0, oi = 0; i < labels.size(); ++i) {
      if (i == skip) continue;
      for (std::size_t j = 0, oj = 0; j < labels.size(); ++j) {
        if (j == skip) continue;
        out.counts[oi][oj++] = counts[i][j];
      }
      ++oi;
    }
    return out;
  }

  bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix confusion_matrix(std::span<const TrialPrediction> preds, std::span<const std::string> truths,
                                        std::span<const std::string> labels) {
  if (preds.size() != truths.size()) throw ValidationError("predictions and truths differ in length");
  ConfusionMatrix cm({labels.begin(), labels.end()});
  for (std::size_t i = 0; i < preds.size(); ++i) cm.add(truths[i], preds[i].predicted_material);
  return cm;
}

struct ProtocolConfig {
  Window train = {7.0, 10.0};
  std::vector<Window> test = {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 6}, {1, 7}};
  bool per_participant = true;
  bool strict = true;  // require the full material x speed x load grid per participant
  std::vector<std::string> materials = default_materials();
  std::vector<int> speeds_rpm = {30, 60, 120};
  std::vector<double> loads_n = {0.49, 1.96};
  std::optional<int> holdout_speed_rpm;  // train on the other speeds, test on this one

  bool operator==(const ProtocolConfig&) const = default;
};

inline void validate_protocol(const ProtocolConfig& cfg) {
  auto check = [](const Window& w) {
    if (!(w.start_s >= 0.0) || !(w.end_s > w.start_s))
      throw ValidationError("window " + to_string(w) + " is empty or negative");
  };
  check(cfg.train);
  if (cfg.test.empty()) throw ValidationError("no test windows configured");
  for (const auto& w : cfg.test) {
    check(w);
    if (w.overlaps(cfg.train))
      throw ValidationError("test window " + to_string(w) + " overlaps training window " + to_string(cfg.train));
  }
}

struct TrialOutcome {
  std::string participant;
  Effector effector = Effector::finger;
  int speed_rpm = 0;
  double load_n = 0.0;
  std::string truth;
  TrialPrediction prediction;

  bool correct() const { return truth == prediction.predicted_material; }
};

struct WindowResult {
  Window window;
  std::size_t bins_per_trial_min = 0;
  std::size_t bins_per_trial_max = 0;
  double overall_accuracy = 0.0;
  std::vector<double> per_material_accuracy;  // aligned with report materials
  std::vector<std::size_t> trials_per_material;
  ConfusionMatrix confusion;
  std::map<std::string, ConfusionMatrix> confusion_by_effector;
  std::vector<TrialOutcome> outcomes;
};

struct GroupModel {
  std::string group;  // participant id, or "all" when pooled
  DecoderEnsemble ensemble;
  std::size_t training_vectors = 0;
};

// Extremes of bin coverage, recorded so the train/test separation can be audited.
struct TemporalAudit {
  double train_min_start_s = 0.0;
  double train_max_end_s = 0.0;
  double test_min_start_s = 0.0;
  double test_max_end_s = 0.0;
};

struct EvaluationReport {
  std::vector<std::string> materials;
  double chance_level = 0.0;
  std::vector<WindowResult> windows;
  std::vector<GroupModel> models;
  TemporalAudit audit;

  // The longest test window, whose confusion matrix is the headline result.
  const WindowResult& final_window() const { return windows.back(); }
};

namespace detail {

inline std::string group_of(const Recording& r, const ProtocolConfig& cfg) {
  return cfg.per_participant ? r.meta.participant : std::string("all");
}

inline std::vector<std::string> resolve_materials(std::span<const Recording> corpus, const ProtocolConfig& cfg) {
  std::set<std::string> present;
  for (const auto& r : corpus) present.insert(r.meta.material);
  if (cfg.strict) {
    for (const auto& m : present)
      if (std::find(cfg.materials.begin(), cfg.materials.end(), m) == cfg.materials.end())
        throw ValidationError("corpus material '" + m + "' is not in the configured material set");
    return cfg.materials;
  }
  std::vector<std::string> out;
  for (const auto& m : cfg.materials)
    if (present.count(m)) out.push_back(m);
  for (const auto& m : present)
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  return out;
}

inline void validate_corpus(std::span<const Recording> corpus, const ProtocolConfig& cfg,
                            std::span<const std::string> materials) {
  if (corpus.empty()) throw ValidationError("corpus is empty");
  std::map<std::string, std::vector<const Recording*>> groups;
  for (const auto& r : corpus) groups[cfg.strict ? r.meta.participant : group_of(r, cfg)].push_back(&r);
  for (const auto& [group, recs] : groups) {
    std::set<std::string> mats;
    for (const auto* r : recs) mats.insert(r->meta.material);
    for (const auto& m : materials)
      if (!mats.count(m)) throw ValidationError("group '" + group + "' is missing material '" + m + "'");
    if (!cfg.strict) continue;
    std::map<std::tuple<std::string, int, long long>, int> cells;
    for (const auto* r : recs) {
      const bool speed_ok =
          std::find(cfg.speeds_rpm.begin(), cfg.speeds_rpm.end(), r->meta.speed_rpm) != cfg.speeds_rpm.end();
      const bool load_ok = std::any_of(cfg.loads_n.begin(), cfg.loads_n.end(),
                                       [&](double l) { return std::abs(l - r->meta.load_n) < 1e-9; });
      if (!speed_ok || !load_ok)
        throw ValidationError("trial '" + r->meta.trial_id + "' has a speed or load outside the protocol grid");
      ++cells[{r->meta.material, r->meta.speed_rpm, std::llround(r->meta.load_n * 1e6)}];
    }
    const std::size_t expected = materials.size() * cfg.speeds_rpm.size() * cfg.loads_n.size();
    if (cells.size() != expected || recs.size() != expected)
      throw ValidationError("participant '" + group + "' has " + std::to_string(recs.size()) + " trials covering " +
                            std::to_string(cells.size()) + " cells; strict mode requires exactly " +
                            std::to_string(expected));
  }
}

inline bool in_training_split(const Recording& r, const ProtocolConfig& cfg) {
  return !cfg.holdout_speed_rpm || r.meta.speed_rpm != *cfg.holdout_speed_rpm;
}

inline bool in_test_split(const Recording& r, const ProtocolConfig& cfg) {
  return !cfg.holdout_speed_rpm || r.meta.speed_rpm == *cfg.holdout_speed_rpm;
}

}  // namespace detail

struct ProtocolInput {
  std::vector<Recording> filtered;  // preprocessed trials, corpus order
  std::vector<std::string> materials;
};

// Validates the corpus against the protocol and filters every trial once.
inline ProtocolInput prepare_corpus(std::span<const Recording> corpus, const ProtocolConfig& cfg,
                                    const PipelineConfig& pipeline) {
  validate_protocol(cfg);
  ProtocolInput in;
  in.materials = detail::resolve_materials(corpus, cfg);
  detail::validate_corpus(corpus, cfg, in.materials);
  in.filtered.reserve(corpus.size());
  for (const auto& r : corpus) in.filtered.push_back(preprocess(r, pipeline));
  return in;
}

inline std::vector<GroupModel> train_models(const ProtocolInput& in, const ProtocolConfig& cfg,
                                            const PipelineConfig& pipeline, const DecoderConfig& dcfg,
                                            TemporalAudit* audit = nullptr) {
  std::map<std::string, std::pair<std::vector<FeatureVector>, std::vector<std::string>>> sets;
  double min_start = 1e300, max_end = -1e300;
  for (const auto& r : in.filtered) {
    if (!detail::in_training_split(r, cfg)) continue;
    const auto wf = window_features(r, cfg.train, pipeline);
    auto& [x, y] = sets[detail::group_of(r, cfg)];
    for (std::size_t b = 0; b < wf.features.size(); ++b) {
      x.push_back(wf.features[b]);
      y.push_back(r.meta.material);
      min_start = std::min(min_start, wf.bin_start_s[b]);
      max_end = std::max(max_end, wf.bin_start_s[b] + wf.bin_duration_s);
    }
  }
  constexpr double kSlack = 1e-9;
  if (min_start < cfg.train.start_s - kSlack || max_end > cfg.train.end_s + kSlack)
    throw ValidationError("training bins escaped the training window");
  if (audit) {
    audit->train_min_start_s = min_start;
    audit->train_max_end_s = max_end;
  }

  std::vector<GroupModel> models;
  for (const auto& [group, xy] : sets) {
    GroupModel gm{group, train_ensemble(xy.first, xy.second, in.materials, dcfg), xy.first.size()};
    models.push_back(std::move(gm));
  }
  return models;
}

inline EvaluationReport evaluate_models(const ProtocolInput& in, std::vector<GroupModel> models,
                                        const ProtocolConfig& cfg, const PipelineConfig& pipeline,
                                        TemporalAudit audit = {}) {
  EvaluationReport rep;
  rep.materials = in.materials;
  rep.chance_level = chance_level(in.materials.size());

  std::map<std::string, const GroupModel*> by_group;
  for (const auto& m : models) {
    if (m.ensemble.materials != in.materials)
      throw ValidationError("model for '" + m.group + "' was trained on a different material set");
    by_group[m.group] = &m;
  }

  constexpr double kSlack = 1e-9;
  double min_start = 1e300, max_end = -1e300;
  for (const auto& w : cfg.test) {
    WindowResult wr;
    wr.window = w;
    wr.confusion = ConfusionMatrix(in.materials);
    wr.bins_per_trial_min = static_cast<std::size_t>(-1);
    for (const auto& r : in.filtered) {
      if (!detail::in_test_split(r, cfg)) continue;
      const auto it = by_group.find(detail::group_of(r, cfg));
      if (it == by_group.end()) throw ValidationError("no trained model for group '" + detail::group_of(r, cfg) + "'");
      const auto& ens = it->second->ensemble;

      const auto wf = window_features(r, w, pipeline);
      for (double s : wf.bin_start_s) {
        if (Window{s, s + wf.bin_duration_s}.overlaps({cfg.train.start_s + kSlack, cfg.train.end_s - kSlack}))
          throw ValidationError("test bin of '" + r.meta.trial_id + "' overlaps the training window");
        min_start = std::min(min_start, s);
        max_end = std::max(max_end, s + wf.bin_duration_s);
      }
      std::vector<FeatureVector> std_bins;
      std_bins.reserve(wf.features.size());
      for (const auto& f : wf.features) std_bins.push_back(ens.standardize(f));

      TrialOutcome o{r.meta.participant, r.meta.effector, r.meta.speed_rpm, r.meta.load_n, r.meta.material,
                     classify_trial(ens, std_bins, r.meta.trial_id)};
      wr.bins_per_trial_min = std::min(wr.bins_per_trial_min, std_bins.size());
      wr.bins_per_trial_max = std::max(wr.bins_per_trial_max, std_bins.size());
      wr.confusion.add(o.truth, o.prediction.predicted_material);
      auto [eff, inserted] = wr.confusion_by_effector.try_emplace(std::string(to_string(o.effector)), in.materials);
      eff->second.add(o.truth, o.prediction.predicted_material);
      wr.outcomes.push_back(std::move(o));
    }
    if (wr.outcomes.empty()) throw ValidationError("no test trials for window " + to_string(w));

    wr.overall_accuracy = wr.confusion.accuracy();
    for (std::size_t m = 0; m < in.materials.size(); ++m) {
      const std::size_t n = wr.confusion.row_total(m);
      wr.trials_per_material.push_back(n);
      wr.per_material_accuracy.push_back(n == 0 ? 0.0 : static_cast<double>(wr.confusion.counts[m][m]) / n);
    }
    rep.windows.push_back(std::move(wr));
  }

  audit.test_min_start_s = min_start;
  audit.test_max_end_s = max_end;
  rep.audit = audit;
  rep.models = std::move(models);
  return rep;
}

// Train per participant (or pooled) on the training window, then classify every test window.
inline EvaluationReport run_protocol(std::span<const Recording> corpus, const ProtocolConfig& cfg,
                                     const DecoderConfig& dcfg, const PipelineConfig& pipeline = {}) {
  const auto in = prepare_corpus(corpus, cfg, pipeline);
  TemporalAudit audit;
  auto models = train_models(in, cfg, pipeline, dcfg, &audit);
  return evaluate_models(in, std::move(models), cfg, pipeline, audit);
}

}  // namespace tactile
