// Command-line front end: synth, featurize, train, eval, anova, report.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tactile/cli.hpp"

namespace {

// Flag values; only flags actually given on the command line override the config file.
struct Overrides {
  std::string config_file;
  std::optional<std::string> corpus, model, report;
  std::optional<std::uint64_t> seed;
  std::optional<double> cutoff_hz, bin_duration_s;
  std::optional<std::size_t> fft_pad, folds, participants, pen_sessions;
  std::optional<int> filter_order, max_iter, holdout_speed;
  std::optional<double> tol, duration_s, sample_rate;
  std::vector<double> lambda_grid;
  bool pooled = false, relaxed = false, hard = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_file, "JSON run configuration; flags override it")->check(CLI::ExistingFile);
  cmd->add_option("--corpus", o.corpus, "corpus directory");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--cutoff-hz", o.cutoff_hz, "high-pass cutoff");
  cmd->add_option("--filter-order", o.filter_order, "Butterworth order (even)");
  cmd->add_option("--bin-duration", o.bin_duration_s, "bin length in seconds");
  cmd->add_option("--fft-pad", o.fft_pad, "zero-padded transform length for band medians");
}

void add_protocol(CLI::App* cmd, Overrides& o) {
  cmd->add_flag("--pooled", o.pooled, "train one ensemble on all participants");
  cmd->add_flag("--relaxed", o.relaxed, "allow partial corpora (missing grid cells)");
  cmd->add_option("--holdout-speed", o.holdout_speed, "train without this speed and test only on it");
}

tactile::RunConfig resolve(const Overrides& o) {
  tactile::RunConfig cfg;
  if (!o.config_file.empty()) {
    tactile::merge_config(cfg, tactile::parse_json(tactile::read_file(o.config_file), o.config_file), o.config_file);
  }
  if (o.corpus) cfg.paths.corpus_dir = *o.corpus;
  if (o.model) cfg.paths.model_file = *o.model;
  if (o.report) cfg.paths.report_file = *o.report;
  if (o.seed) cfg.seed = *o.seed;
  cfg.decoder.seed = cfg.seed;
  if (o.cutoff_hz) cfg.pipeline.cutoff_hz = *o.cutoff_hz;
  if (o.filter_order) cfg.pipeline.filter_order = *o.filter_order;
  if (o.bin_duration_s) cfg.pipeline.features.bin_duration_s = *o.bin_duration_s;
  if (o.fft_pad) cfg.pipeline.features.fft_size = *o.fft_pad;
  if (o.folds) cfg.decoder.cv_folds = *o.folds;
  if (o.tol) cfg.decoder.solver.tol = *o.tol;
  if (o.max_iter) cfg.decoder.solver.max_iter = *o.max_iter;
  if (!o.lambda_grid.empty()) cfg.decoder.lambda_grid = o.lambda_grid;
  if (o.pooled) cfg.protocol.per_participant = false;
  if (o.relaxed) cfg.protocol.strict = false;
  if (o.holdout_speed) cfg.protocol.holdout_speed_rpm = *o.holdout_speed;
  if (o.participants) cfg.synth.participants = *o.participants;
  if (o.pen_sessions) cfg.synth.pen_sessions = *o.pen_sessions;
  if (o.hard) cfg.synth.hard = true;
  if (o.duration_s) cfg.synth.duration_s = *o.duration_s;
  if (o.sample_rate) cfg.synth.sample_rate = *o.sample_rate;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decode touched materials from finger-mounted accelerometer trials"};
  app.require_subcommand(1);
  Overrides o;

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  add_common(synth, o);
  synth->add_option("--participants", o.participants, "finger participants (42 trials each)");
  synth->add_option("--pen-sessions", o.pen_sessions, "additional sessions tagged as pen touches");
  synth->add_flag("--hard", o.hard, "narrow the spectral contrast between materials");
  synth->add_option("--duration", o.duration_s, "trial length in seconds");
  synth->add_option("--sample-rate", o.sample_rate, "sample rate in Hz");

  auto* featurize = app.add_subcommand("featurize", "dump per-bin features as CSV");
  add_common(featurize, o);
  std::string features_out = "features.csv";
  std::vector<double> window;
  featurize->add_option("--out", features_out, "output CSV");
  featurize->add_option("--window", window, "start and end seconds (default: whole trial)")->expected(2);

  auto* train = app.add_subcommand("train", "train one-vs-rest decoders on the training window");
  add_common(train, o);
  add_protocol(train, o);
  train->add_option("--model", o.model, "output model file");
  train->add_option("--folds", o.folds, "cross-validation folds");
  train->add_option("--lambda-grid", o.lambda_grid, "candidate L1 strengths");
  train->add_option("--tol", o.tol, "KKT tolerance");
  train->add_option("--max-iter", o.max_iter, "solver iteration cap");

  auto* eval = app.add_subcommand("eval", "classify test windows and write the report");
  add_common(eval, o);
  add_protocol(eval, o);
  eval->add_option("--model", o.model, "trained model file");
  eval->add_option("--report", o.report, "output report (JSON; a .txt table is written beside it)");

  auto* anova = app.add_subcommand("anova", "two-way ANOVA on a factor_a,factor_b,value CSV");
  std::string anova_csv;
  anova->add_option("csv", anova_csv, "input CSV")->required();

  auto* report = app.add_subcommand("report", "print the text table for a JSON report");
  std::string report_json;
  report->add_option("report", report_json, "report JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*anova) {
      tactile::cmd_anova(anova_csv, std::cout);
      return tactile::kExitOk;
    }
    if (*report) {
      tactile::cmd_report(report_json, std::cout);
      return tactile::kExitOk;
    }
    const auto cfg = resolve(o);
    if (*synth) tactile::cmd_synth(cfg, std::cout);
    if (*featurize) {
      std::optional<tactile::Window> w;
      if (!window.empty()) w = tactile::Window{window[0], window[1]};
      tactile::cmd_featurize(cfg, features_out, w, std::cout);
    }
    if (*train) tactile::cmd_train(cfg, std::cout);
    if (*eval) tactile::cmd_eval(cfg, std::cout);
  } catch (...) {
    return tactile::exit_code_for_current_exception(std::cerr);
  }
  return tactile::kExitOk;
}
