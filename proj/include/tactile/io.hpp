#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "tactile/config.hpp"
#include "tactile/decoder.hpp"
#include "tactile/eval.hpp"
#include "tactile/recording.hpp"
#include "tactile/stats.hpp"
#include "tactile/synth.hpp"

namespace tactile {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

inline constexpr std::string_view kRecordingHeader = "t,ax,ay,az,aroll,apitch,ayaw,load";
inline constexpr std::string_view kModelFormat = "tactile-model/1";
inline constexpr std::string_view kReportFormat = "tactile-report/1";

// ---------------------------------------------------------------------------------------------
// low-level helpers

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

inline double parse_double(std::string_view s, std::size_t line, std::string_view what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ValidationError("line " + std::to_string(line) + ": cannot parse " + std::string(what) + " '" +
                          std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-temp-then-rename so readers never observe a partial file.
inline void write_file_atomic(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

inline Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed JSON in '" + source + "': " + e.what());
  }
}

template <typename T>
T json_get(const Json& j, const char* key, const std::string& source) {
  if (!j.contains(key)) throw ValidationError("'" + source + "' is missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("'" + source + "' has a bad value for '" + key + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------------------------
// recordings

inline Json sidecar_json(const Recording& rec) {
  return Json{{"material", rec.meta.material},     {"speed_rpm", rec.meta.speed_rpm},
              {"load_n", rec.meta.load_n},         {"effector", std::string(to_string(rec.meta.effector))},
              {"participant", rec.meta.participant}, {"trial", rec.meta.trial_id},
              {"sample_rate_hz", rec.sample_rate}};
}

inline std::string recording_csv(const Recording& rec) {
  std::string out(kRecordingHeader);
  out += '\n';
  for (std::size_t i = 0; i < rec.size(); ++i) {
    out += format_double(rec.t0_s + static_cast<double>(i) / rec.sample_rate);
    for (double v : rec.samples[i]) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    if (!rec.load_trace.empty()) out += format_double(rec.load_trace[i]);
    out += '\n';
  }
  return out;
}

inline void write_recording(const Recording& rec, const fs::path& csv_path) {
  write_file_atomic(csv_path, recording_csv(rec));
  write_file_atomic(fs::path(csv_path).replace_extension(".json"), sidecar_json(rec).dump(2) + "\n");
}

inline TrialMeta meta_from_json(const Json& j, const std::string& source) {
  TrialMeta m;
  m.material = json_get<std::string>(j, "material", source);
  m.speed_rpm = json_get<int>(j, "speed_rpm", source);
  m.load_n = json_get<double>(j, "load_n", source);
  m.effector = effector_from_string(json_get<std::string>(j, "effector", source));
  m.participant = json_get<std::string>(j, "participant", source);
  m.trial_id = json_get<std::string>(j, "trial", source);
  return m;
}

inline Recording parse_recording_csv(std::string_view text, const std::string& source) {
  Recording rec;
  std::vector<double> times;
  std::size_t line_no = 0, pos = 0;
  bool any_load = false, any_missing_load = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kRecordingHeader)
        throw ValidationError(source + ": expected header '" + std::string(kRecordingHeader) + "'");
      continue;
    }
    const auto fields = split_csv(line);
    if (fields.size() != 8)
      throw ValidationError(source + " line " + std::to_string(line_no) + ": expected 8 fields, got " +
                            std::to_string(fields.size()));
    times.push_back(parse_double(fields[0], line_no, "time"));
    Sample s{};
    for (std::size_t a = 0; a < kAxes; ++a) s[a] = parse_double(fields[a + 1], line_no, "acceleration");
    rec.samples.push_back(s);
    if (fields[7].empty()) {
      any_missing_load = true;
      rec.load_trace.push_back(0.0);
    } else {
      any_load = true;
      rec.load_trace.push_back(parse_double(fields[7], line_no, "load"));
    }
  }
  if (line_no == 0) throw ValidationError(source + ": empty file");
  if (any_load && any_missing_load) throw ValidationError(source + ": load column is only partially filled");
  if (!any_load) rec.load_trace.clear();
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw ValidationError(source + ": time column is not strictly increasing");
  // The first row is the trial origin, so t0_s stays 0 whatever the file's first timestamp is.
  if (times.size() >= 2) {
    const double fs_est = static_cast<double>(times.size() - 1) / (times.back() - times.front());
    rec.sample_rate = std::round(fs_est * 1e6) / 1e6;
  }
  return rec;
}

inline Recording read_recording(const fs::path& csv_path) {
  Recording rec = parse_recording_csv(read_file(csv_path), csv_path.string());
  const fs::path side = fs::path(csv_path).replace_extension(".json");
  const Json j = parse_json(read_file(side), side.string());
  rec.meta = meta_from_json(j, side.string());
  if (j.contains("sample_rate_hz")) rec.sample_rate = json_get<double>(j, "sample_rate_hz", side.string());
  return rec;
}

// ---------------------------------------------------------------------------------------------
// corpus

inline Json plan_json(const CorpusPlan& plan, bool hard) {
  return Json{{"participants", plan.participants}, {"pen_sessions", plan.pen_sessions},
              {"materials", [&] {
                 Json m = Json::array();
                 for (const auto& s : plan.materials) m.push_back(s.label);
                 return m;
               }()},
              {"hard", hard},
              {"speeds_rpm", plan.speeds_rpm},        {"loads_n", plan.loads_n},
              {"duration_s", plan.duration_s},        {"sample_rate_hz", plan.sample_rate},
              {"seed", plan.seed},                    {"gain_jitter", plan.gain_jitter}};
}

inline std::string corpus_file_stem(const Recording& rec) { return rec.meta.trial_id; }

inline Json write_corpus(const std::vector<CorpusEntry>& corpus, const CorpusPlan& plan, bool hard,
                         const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create corpus directory '" + dir.string() + "': " + ec.message());
  Json trials = Json::array();
  for (const auto& e : corpus) {
    const std::string stem = corpus_file_stem(e.recording);
    write_recording(e.recording, dir / (stem + ".csv"));
    Json t = sidecar_json(e.recording);
    t["seed"] = e.seed;
    t["csv"] = stem + ".csv";
    t["sidecar"] = stem + ".json";
    trials.push_back(std::move(t));
  }
  Json manifest{{"plan", plan_json(plan, hard)}, {"trial_count", corpus.size()}, {"trials", std::move(trials)}};
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

// Reads trials listed in manifest.json, or every CSV with a sidecar (sorted by name) if none.
inline std::vector<Recording> read_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("corpus directory '" + dir.string() + "' does not exist");
  std::vector<fs::path> files;
  const fs::path manifest = dir / "manifest.json";
  if (fs::exists(manifest)) {
    const Json m = parse_json(read_file(manifest), manifest.string());
    for (const auto& t : json_get<Json>(m, "trials", manifest.string()))
      files.push_back(dir / json_get<std::string>(t, "csv", manifest.string()));
  } else {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".csv") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  }
  std::vector<Recording> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_recording(f));
  return out;
}

// ---------------------------------------------------------------------------------------------
// configuration

inline Json to_json(const PipelineConfig& p) {
  return Json{{"cutoff_hz", p.cutoff_hz},
              {"filter", "butterworth-highpass-zero-phase"},
              {"filter_order", p.filter_order},
              {"bin_duration_s", p.features.bin_duration_s},
              {"fft_pad", p.features.fft_size},
              {"window", "hann"},
              {"bands", kBands},
              {"band_width_hz", kBandWidthHz},
              {"amplitude_features", "rms,mean_abs_first_diff"}};
}

inline Json to_json(const RunConfig& c) {
  Json windows = Json::array();
  for (const auto& w : c.protocol.test) windows.push_back({w.start_s, w.end_s});
  Json protocol{{"train_window_s", {c.protocol.train.start_s, c.protocol.train.end_s}},
                {"test_windows_s", windows},
                {"per_participant", c.protocol.per_participant},
                {"strict", c.protocol.strict},
                {"materials", c.protocol.materials},
                {"speeds_rpm", c.protocol.speeds_rpm},
                {"loads_n", c.protocol.loads_n},
                {"holdout_speed_rpm", c.protocol.holdout_speed_rpm ? Json(*c.protocol.holdout_speed_rpm) : Json()}};
  return Json{{"paths", {{"corpus", c.paths.corpus_dir}, {"model", c.paths.model_file}, {"report", c.paths.report_file}}},
              {"pipeline", to_json(c.pipeline)},
              {"decoder",
               {{"lambda_grid", c.decoder.lambda_grid},
                {"cv_folds", c.decoder.cv_folds},
                {"tol", c.decoder.solver.tol},
                {"max_iter", c.decoder.solver.max_iter}}},
              {"protocol", protocol},
              {"synth",
               {{"participants", c.synth.participants},
                {"pen_sessions", c.synth.pen_sessions},
                {"hard", c.synth.hard},
                {"duration_s", c.synth.duration_s},
                {"sample_rate_hz", c.synth.sample_rate}}},
              {"seed", c.seed}};
}

// Overlays any keys present in `j` onto `c`; absent keys keep their current values.
inline void merge_config(RunConfig& c, const Json& j, const std::string& source) {
  try {
    if (j.contains("paths")) {
      const auto& p = j["paths"];
      if (p.contains("corpus")) c.paths.corpus_dir = p["corpus"].get<std::string>();
      if (p.contains("model")) c.paths.model_file = p["model"].get<std::string>();
      if (p.contains("report")) c.paths.report_file = p["report"].get<std::string>();
    }
    if (j.contains("pipeline")) {
      const auto& p = j["pipeline"];
      if (p.contains("cutoff_hz")) c.pipeline.cutoff_hz = p["cutoff_hz"].get<double>();
      if (p.contains("filter_order")) c.pipeline.filter_order = p["filter_order"].get<int>();
      if (p.contains("bin_duration_s")) c.pipeline.features.bin_duration_s = p["bin_duration_s"].get<double>();
      if (p.contains("fft_pad")) c.pipeline.features.fft_size = p["fft_pad"].get<std::size_t>();
    }
    if (j.contains("decoder")) {
      const auto& d = j["decoder"];
      if (d.contains("lambda_grid")) c.decoder.lambda_grid = d["lambda_grid"].get<std::vector<double>>();
      if (d.contains("cv_folds")) c.decoder.cv_folds = d["cv_folds"].get<std::size_t>();
      if (d.contains("tol")) c.decoder.solver.tol = d["tol"].get<double>();
      if (d.contains("max_iter")) c.decoder.solver.max_iter = d["max_iter"].get<int>();
    }
    if (j.contains("protocol")) {
      const auto& p = j["protocol"];
      if (p.contains("train_window_s")) {
        const auto w = p["train_window_s"].get<std::vector<double>>();
        if (w.size() != 2) throw ValidationError(source + ": train_window_s needs two values");
        c.protocol.train = {w[0], w[1]};
      }
      if (p.contains("test_windows_s")) {
        c.protocol.test.clear();
        for (const auto& w : p["test_windows_s"]) {
          const auto v = w.get<std::vector<double>>();
          if (v.size() != 2) throw ValidationError(source + ": each test window needs two values");
          c.protocol.test.push_back({v[0], v[1]});
        }
      }
      if (p.contains("per_participant")) c.protocol.per_participant = p["per_participant"].get<bool>();
      if (p.contains("strict")) c.protocol.strict = p["strict"].get<bool>();
      if (p.contains("materials")) c.protocol.materials = p["materials"].get<std::vector<std::string>>();
      if (p.contains("speeds_rpm")) c.protocol.speeds_rpm = p["speeds_rpm"].get<std::vector<int>>();
      if (p.contains("loads_n")) c.protocol.loads_n = p["loads_n"].get<std::vector<double>>();
      if (p.contains("holdout_speed_rpm")) {
        if (p["holdout_speed_rpm"].is_null()) c.protocol.holdout_speed_rpm.reset();
        else c.protocol.holdout_speed_rpm = p["holdout_speed_rpm"].get<int>();
      }
    }
    if (j.contains("synth")) {
      const auto& s = j["synth"];
      if (s.contains("participants")) c.synth.participants = s["participants"].get<std::size_t>();
      if (s.contains("pen_sessions")) c.synth.pen_sessions = s["pen_sessions"].get<std::size_t>();
      if (s.contains("hard")) c.synth.hard = s["hard"].get<bool>();
      if (s.contains("duration_s")) c.synth.duration_s = s["duration_s"].get<double>();
      if (s.contains("sample_rate_hz")) c.synth.sample_rate = s["sample_rate_hz"].get<double>();
    }
    if (j.contains("seed")) {
      c.seed = j["seed"].get<std::uint64_t>();
      c.decoder.seed = c.seed;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad configuration in '" + source + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------------------------
// models

inline Json to_json(const DecoderEnsemble& e) {
  Json decoders = Json::array();
  for (const auto& d : e.decoders)
    decoders.push_back({{"material", d.material},
                        {"lambda", d.lambda},
                        {"n_nonzero", d.n_nonzero},
                        {"kkt_residual", d.kkt_residual},
                        {"bias", d.bias},
                        {"weights", d.weights}});
  return Json{{"materials", e.materials},
              {"standardization", {{"mean", e.stats.mean}, {"std", e.stats.std}}},
              {"max_cv_kkt_residual", e.max_cv_kkt_residual},
              {"decoders", std::move(decoders)}};
}

inline DecoderEnsemble ensemble_from_json(const Json& j, const std::string& source) {
  DecoderEnsemble e;
  try {
    e.materials = j.at("materials").get<std::vector<std::string>>();
    const auto mean = j.at("standardization").at("mean").get<std::vector<double>>();
    const auto sd = j.at("standardization").at("std").get<std::vector<double>>();
    if (mean.size() != kFeatureDim || sd.size() != kFeatureDim)
      throw ValidationError(source + ": standardization must have " + std::to_string(kFeatureDim) + " entries");
    std::copy(mean.begin(), mean.end(), e.stats.mean.begin());
    std::copy(sd.begin(), sd.end(), e.stats.std.begin());
    e.max_cv_kkt_residual = j.value("max_cv_kkt_residual", 0.0);
    for (const auto& dj : j.at("decoders")) {
      MaterialDecoder d;
      d.material = dj.at("material").get<std::string>();
      d.lambda = dj.at("lambda").get<double>();
      d.bias = dj.at("bias").get<double>();
      d.kkt_residual = dj.value("kkt_residual", 0.0);
      const auto w = dj.at("weights").get<std::vector<double>>();
      if (w.size() != kFeatureDim)
        throw ValidationError(source + ": decoder '" + d.material + "' has " + std::to_string(w.size()) + " weights");
      std::copy(w.begin(), w.end(), d.weights.begin());
      d.n_nonzero = count_nonzero(d.weights);
      if (dj.contains("n_nonzero") && dj["n_nonzero"].get<std::size_t>() != d.n_nonzero)
        throw ValidationError(source + ": decoder '" + d.material + "' n_nonzero disagrees with its weights");
      e.decoders.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(source + ": malformed ensemble: " + ex.what());
  }
  if (e.decoders.size() != e.materials.size())
    throw ValidationError(source + ": ensemble needs exactly one decoder per material");
  for (std::size_t i = 0; i < e.materials.size(); ++i)
    if (e.decoders[i].material != e.materials[i])
      throw ValidationError(source + ": decoder order does not match the material order");
  return e;
}

inline Json model_json(const std::vector<GroupModel>& models, const RunConfig& cfg) {
  Json groups = Json::array();
  for (const auto& g : models)
    groups.push_back({{"group", g.group}, {"training_vectors", g.training_vectors}, {"ensemble", to_json(g.ensemble)}});
  return Json{{"format", kModelFormat}, {"pipeline", to_json(cfg.pipeline)}, {"run_config", to_json(cfg)},
              {"models", std::move(groups)}};
}

struct LoadedModel {
  std::vector<GroupModel> models;
  Json pipeline;
  Json run_config;
};

inline LoadedModel parse_model(const std::string& text, const std::string& source) {
  const Json j = parse_json(text, source);
  if (json_get<std::string>(j, "format", source) != kModelFormat)
    throw ValidationError(source + ": unsupported model format");
  LoadedModel m;
  m.pipeline = json_get<Json>(j, "pipeline", source);
  m.run_config = j.value("run_config", Json::object());
  for (const auto& g : json_get<Json>(j, "models", source)) {
    GroupModel gm;
    gm.group = json_get<std::string>(g, "group", source);
    gm.training_vectors = json_get<std::size_t>(g, "training_vectors", source);
    gm.ensemble = ensemble_from_json(json_get<Json>(g, "ensemble", source), source);
    m.models.push_back(std::move(gm));
  }
  return m;
}

inline void save_model(const fs::path& path, const std::vector<GroupModel>& models, const RunConfig& cfg) {
  write_file_atomic(path, model_json(models, cfg).dump(2) + "\n");
}

inline LoadedModel load_model(const fs::path& path) { return parse_model(read_file(path), path.string()); }

// Feature definitions are part of the model: any differing pipeline constant is an error.
inline void check_provenance(const LoadedModel& model, const PipelineConfig& pipeline) {
  const Json expected = to_json(pipeline);
  for (const auto& [key, value] : expected.items()) {
    if (!model.pipeline.contains(key))
      throw ProvenanceError("model file lacks pipeline constant '" + key + "'");
    if (model.pipeline[key] != value)
      throw ProvenanceError("pipeline constant '" + key + "' differs: model has " + model.pipeline[key].dump() +
                            ", configuration has " + value.dump());
  }
}

// ---------------------------------------------------------------------------------------------
// feature export

inline std::string features_csv_header() {
  std::string h;
  for (const auto& n : feature_names()) h += n + ",";
  h += "trial_id,bin_index,material,speed_rpm,load_n,effector\n";
  return h;
}

inline void append_feature_rows(std::string& out, const Recording& rec, const std::vector<FeatureVector>& rows) {
  for (std::size_t b = 0; b < rows.size(); ++b) {
    for (double v : rows[b].values) {
      out += format_double(v);
      out += ',';
    }
    out += rec.meta.trial_id + "," + std::to_string(b) + "," + rec.meta.material + "," +
           std::to_string(rec.meta.speed_rpm) + "," + format_double(rec.meta.load_n) + "," +
           std::string(to_string(rec.meta.effector)) + "\n";
  }
}

// ---------------------------------------------------------------------------------------------
// reports

inline Json to_json(const ConfusionMatrix& cm) {
  return Json{{"labels", cm.labels}, {"counts", cm.counts}, {"accuracy", cm.accuracy()}};
}

inline Json report_json(const EvaluationReport& rep, const RunConfig& cfg) {
  Json windows = Json::array();
  for (const auto& w : rep.windows) {
    Json per_material = Json::object();
    for (std::size_t m = 0; m < rep.materials.size(); ++m)
      per_material[rep.materials[m]] = {{"accuracy", w.per_material_accuracy[m]}, {"trials", w.trials_per_material[m]}};
    Json by_effector = Json::object();
    for (const auto& [eff, cm] : w.confusion_by_effector) by_effector[eff] = to_json(cm);
    Json preds = Json::array();
    for (const auto& o : w.outcomes)
      preds.push_back({{"trial", o.prediction.trial_id},
                       {"participant", o.participant},
                       {"effector", std::string(to_string(o.effector))},
                       {"speed_rpm", o.speed_rpm},
                       {"load_n", o.load_n},
                       {"truth", o.truth},
                       {"predicted", o.prediction.predicted_material},
                       {"votes", o.prediction.votes},
                       {"tie_broken", o.prediction.tie_broken}});
    windows.push_back({{"window_s", {w.window.start_s, w.window.end_s}},
                       {"bins_per_trial", {w.bins_per_trial_min, w.bins_per_trial_max}},
                       {"overall_accuracy", w.overall_accuracy},
                       {"per_material", std::move(per_material)},
                       {"confusion", to_json(w.confusion)},
                       {"confusion_by_effector", std::move(by_effector)},
                       {"predictions", std::move(preds)}});
  }
  Json models = Json::array();
  for (const auto& g : rep.models) {
    Json decs = Json::array();
    for (const auto& d : g.ensemble.decoders)
      decs.push_back({{"material", d.material},
                      {"lambda", d.lambda},
                      {"n_nonzero", d.n_nonzero},
                      {"kkt_residual", d.kkt_residual}});
    models.push_back({{"group", g.group},
                      {"training_vectors", g.training_vectors},
                      {"max_cv_kkt_residual", g.ensemble.max_cv_kkt_residual},
                      {"decoders", std::move(decs)}});
  }
  return Json{{"format", kReportFormat},
              {"materials", rep.materials},
              {"chance_level", rep.chance_level},
              {"windows", std::move(windows)},
              {"models", std::move(models)},
              {"temporal_audit",
               {{"train_min_start_s", rep.audit.train_min_start_s},
                {"train_max_end_s", rep.audit.train_max_end_s},
                {"test_min_start_s", rep.audit.test_min_start_s},
                {"test_max_end_s", rep.audit.test_max_end_s}}},
              {"run_config", to_json(cfg)}};
}

namespace detail {

inline std::string fixed(double v, int prec) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s + " ";
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

}  // namespace detail

// Fixed column order so reports diff cleanly.
inline std::string report_text(const Json& r) {
  using detail::fixed;
  using detail::pad;
  const auto materials = r.at("materials").get<std::vector<std::string>>();
  std::string out = "material decoding report\n";
  out += "chance level: " + fixed(100.0 * r.at("chance_level").get<double>(), 1) + "%\n\n";

  out += pad("window", 10, true) + pad("bins", 6) + pad("overall", 9);
  for (const auto& m : materials) out += pad(m, 10);
  out += "\n";
  for (const auto& w : r.at("windows")) {
    const auto ws = w.at("window_s").get<std::vector<double>>();
    const auto bins = w.at("bins_per_trial").get<std::vector<std::size_t>>();
    char label[32];
    std::snprintf(label, sizeof label, "[%g,%g)s", ws[0], ws[1]);
    out += pad(label, 10, true);
    out += pad(bins[0] == bins[1] ? std::to_string(bins[0]) : std::to_string(bins[0]) + "-" + std::to_string(bins[1]), 6);
    out += pad(fixed(w.at("overall_accuracy").get<double>(), 3), 9);
    for (const auto& m : materials) out += pad(fixed(w.at("per_material").at(m).at("accuracy").get<double>(), 3), 10);
    out += "\n";
  }

  const auto& last = r.at("windows").back();
  const auto ws = last.at("window_s").get<std::vector<double>>();
  auto print_matrix = [&](const Json& cm, const std::string& title) {
    char head[96];
    std::snprintf(head, sizeof head, "\nconfusion %s, window [%g,%g)s (rows true, columns predicted)\n", title.c_str(),
                  ws[0], ws[1]);
    out += head;
    out += pad("", 10, true);
    for (const auto& m : materials) out += pad(m, 10);
    out += "\n";
    const auto counts = cm.at("counts").get<std::vector<std::vector<std::size_t>>>();
    for (std::size_t i = 0; i < materials.size(); ++i) {
      out += pad(materials[i], 10, true);
      for (auto c : counts[i]) out += pad(std::to_string(c), 10);
      out += "\n";
    }
    out += "accuracy: " + fixed(cm.at("accuracy").get<double>(), 3) + "\n";
  };
  print_matrix(last.at("confusion"), "all effectors");
  for (const auto& [eff, cm] : last.at("confusion_by_effector").items()) print_matrix(cm, eff);

  out += "\nsparsity (selected lambda / nonzero weights of " + std::to_string(kFeatureDim) + ")\n";
  out += pad("group", 10, true);
  for (const auto& m : materials) out += pad(m, 14);
  out += "\n";
  for (const auto& g : r.at("models")) {
    out += pad(g.at("group").get<std::string>(), 10, true);
    for (const auto& d : g.at("decoders")) {
      char cell[32];
      std::snprintf(cell, sizeof cell, "%.0e/%zu", d.at("lambda").get<double>(), d.at("n_nonzero").get<std::size_t>());
      out += pad(cell, 14);
    }
    out += "\n";
  }
  return out;
}

inline std::string anova_text(const AnovaResult& r, const std::string& name_a, const std::string& name_b) {
  using detail::fixed;
  using detail::pad;
  std::string out = pad("effect", 14, true) + pad("SS", 14) + pad("df", 6) + pad("F", 12) + pad("p", 10) + "\n";
  auto row = [&](const std::string& name, const EffectTest& t) {
    char ss[32], f[32], p[32];
    std::snprintf(ss, sizeof ss, "%.6g", t.ss);
    std::snprintf(f, sizeof f, "%.4f", t.F);
    std::snprintf(p, sizeof p, "%.4f", t.p);
    out += pad(name, 14, true) + pad(ss, 14) + pad(std::to_string(t.df_num), 6) + pad(f, 12) + pad(p, 10) + "\n";
  };
  row(name_a, r.factor_a);
  row(name_b, r.factor_b);
  row(name_a + "x" + name_b, r.interaction);
  char ss[32];
  std::snprintf(ss, sizeof ss, "%.6g", r.ss_error);
  out += pad("error", 14, true) + pad(ss, 14) + pad(std::to_string(r.df_error), 6) + "\n";
  out += "F(df_effect, " + std::to_string(r.df_error) + ")\n";
  return out;
}

}  // namespace tactile
