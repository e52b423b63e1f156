#pragma once

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "tactile/config.hpp"
#include "tactile/eval.hpp"
#include "tactile/io.hpp"
#include "tactile/stats.hpp"
#include "tactile/synth.hpp"

namespace tactile {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitConvergence = 2, kExitIo = 3 };

// Maps the exception currently being handled onto the documented exit codes.
inline int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

inline Json cmd_synth(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  const auto plan = corpus_plan(cfg);
  const auto corpus = generate_corpus(plan);
  const auto manifest = write_corpus(corpus, plan, cfg.synth.hard, cfg.paths.corpus_dir);
  out << "wrote " << corpus.size() << " trials to " << cfg.paths.corpus_dir << "\n";
  return manifest;
}

// Dumps per-bin raw features for `window` (whole trial when unset) of every corpus trial.
inline std::size_t cmd_featurize(const RunConfig& cfg, const std::string& out_csv, std::optional<Window> window,
                                 std::ostream& out) {
  validate(cfg);
  const auto corpus = read_corpus(cfg.paths.corpus_dir);
  std::string csv = features_csv_header();
  std::size_t rows = 0;
  for (const auto& rec : corpus) {
    const auto filtered = preprocess(rec, cfg.pipeline);
    const Window w = window.value_or(Window{0.0, filtered.duration_s()});
    const auto wf = window_features(filtered, w, cfg.pipeline);
    append_feature_rows(csv, rec, wf.features);
    rows += wf.features.size();
  }
  write_file_atomic(out_csv, csv);
  out << "wrote " << rows << " feature rows (" << kFeatureDim << " features) from " << corpus.size()
      << " trials to " << out_csv << "\n";
  return rows;
}

inline std::vector<GroupModel> cmd_train(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  const auto corpus = read_corpus(cfg.paths.corpus_dir);
  const auto in = prepare_corpus(corpus, cfg.protocol, cfg.pipeline);
  auto models = train_models(in, cfg.protocol, cfg.pipeline, cfg.decoder);
  for (const auto& g : models) {
    out << g.group << ": " << g.training_vectors << " training vectors\n";
    for (const auto& d : g.ensemble.decoders) {
      char line[128];
      std::snprintf(line, sizeof line, "  %-10s lambda=%-8g nonzero=%zu/%zu\n", d.material.c_str(), d.lambda,
                    d.n_nonzero, kFeatureDim);
      out << line;
    }
  }
  save_model(cfg.paths.model_file, models, cfg);
  out << "saved " << models.size() << " ensemble(s) to " << cfg.paths.model_file << "\n";
  return models;
}

inline std::string text_report_path(const std::string& json_path) {
  return std::filesystem::path(json_path).replace_extension(".txt").string();
}

inline Json cmd_eval(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  auto model = load_model(cfg.paths.model_file);
  check_provenance(model, cfg.pipeline);
  const auto corpus = read_corpus(cfg.paths.corpus_dir);
  const auto in = prepare_corpus(corpus, cfg.protocol, cfg.pipeline);
  const auto rep = evaluate_models(in, std::move(model.models), cfg.protocol, cfg.pipeline);
  const Json j = report_json(rep, cfg);
  const std::string text = report_text(j);
  write_file_atomic(cfg.paths.report_file, j.dump(2) + "\n");
  write_file_atomic(text_report_path(cfg.paths.report_file), text);
  out << text;
  return j;
}

inline std::string cmd_report(const std::string& report_path, std::ostream& out) {
  const Json j = parse_json(read_file(report_path), report_path);
  if (j.value("format", std::string()) != kReportFormat)
    throw ValidationError(report_path + ": not a report file");
  const auto text = report_text(j);
  out << text;
  return text;
}

// CSV rows of factor_a,factor_b,value; a non-numeric first row is taken as a header.
inline std::vector<Observation> parse_anova_csv(std::string_view text, const std::string& source) {
  std::vector<Observation> obs;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 3)
      throw ValidationError(source + " line " + std::to_string(line_no) + ": expected 3 fields, got " +
                            std::to_string(f.size()));
    if (obs.empty() && line_no == 1) {
      double probe;
      const auto r = std::from_chars(f[2].data(), f[2].data() + f[2].size(), probe);
      if (r.ec != std::errc{} || r.ptr != f[2].data() + f[2].size()) continue;
    }
    if (f[0].empty() || f[1].empty())
      throw ValidationError(source + " line " + std::to_string(line_no) + ": empty factor level");
    obs.push_back({std::string(f[0]), std::string(f[1]), parse_double(f[2], line_no, "value")});
  }
  if (obs.empty()) throw ValidationError(source + ": no observations");
  return obs;
}

inline AnovaResult cmd_anova(const std::string& csv_path, std::ostream& out) {
  const auto obs = parse_anova_csv(read_file(csv_path), csv_path);
  const auto design = tabulate(obs);
  const auto res = two_way_anova(design.table);
  out << "two-way ANOVA: " << design.levels_a.size() << " x " << design.levels_b.size() << " levels, "
      << design.table[0][0].size() << " replicates per cell\n";
  out << anova_text(res, "factor_a", "factor_b");
  return res;
}

}  // namespace tactile
