#include <gtest/gtest.h>

#include <numeric>

#include "helpers.hpp"
#include "oracles.hpp"
#include "tactile/eval.hpp"

using namespace tactile;

namespace {

TrialPrediction predicted(const std::string& label) {
  TrialPrediction p;
  p.predicted_material = label;
  return p;
}

// One distinct tone per material at 60 rpm (5, 15, ..., 65 Hz), nothing else.
std::vector<Recording> pure_tone_corpus() {
  CorpusPlan plan;
  plan.participants = 1;
  plan.speeds_rpm = {60};
  plan.seed = 99;
  plan.materials.clear();
  const auto& names = default_materials();
  for (std::size_t m = 0; m < names.size(); ++m) {
    MaterialSpec s;
    s.label = names[m];
    s.components = {{5.0 + 10.0 * static_cast<double>(m), 0.5}};
    plan.materials.push_back(s);
  }
  return recordings_of(generate_corpus(plan));
}

class FullGridProtocol : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    corpus_ = new std::vector<Recording>(testutil::small_corpus(1));
    report_ = new EvaluationReport(run_protocol(*corpus_, ProtocolConfig{}, DecoderConfig{}));
  }
  static void TearDownTestSuite() {
    delete report_;
    delete corpus_;
  }
  static std::vector<Recording>* corpus_;
  static EvaluationReport* report_;
};

std::vector<Recording>* FullGridProtocol::corpus_ = nullptr;
EvaluationReport* FullGridProtocol::report_ = nullptr;

}  // namespace

TEST(ChanceLevel, Examples) {
  EXPECT_NEAR(chance_level(7), 0.142857142857, 1e-12);
  EXPECT_NEAR(100.0 * chance_level(7), 14.3, 0.05);
  EXPECT_EQ(chance_level(1), 1.0);
  EXPECT_EQ(chance_level(2), 0.5);
  EXPECT_THROW(chance_level(0), ValidationError);
}

TEST(Confusion, DiagonalWhenAllCorrect) {
  const auto& mats = default_materials();
  std::vector<TrialPrediction> preds;
  std::vector<std::string> truths;
  for (int rep = 0; rep < 3; ++rep)
    for (const auto& m : mats) {
      preds.push_back(predicted(m));
      truths.push_back(m);
    }
  const auto cm = confusion_matrix(preds, truths, mats);
  EXPECT_EQ(cm.trace(), 21u);
  EXPECT_EQ(cm.total(), 21u);
  EXPECT_EQ(cm.accuracy(), 1.0);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) EXPECT_EQ(cm.counts[i][j], i == j ? 3u : 0u);
}

TEST(Confusion, TraceOverTotalIsAccuracy) {
  const auto& mats = default_materials();
  ConfusionMatrix cm(mats);
  // 1000 trials, 881 on the diagonal.
  for (int i = 0; i < 1000; ++i) {
    const auto& truth = mats[static_cast<std::size_t>(i) % 7];
    const auto& pred = i < 881 ? truth : mats[(static_cast<std::size_t>(i) + 1) % 7];
    cm.add(truth, pred);
  }
  EXPECT_NEAR(cm.accuracy(), 0.881, 1e-15);
}

TEST(Confusion, WithoutOneMaterial) {
  const std::vector<std::string> mats = {"a", "b", "c"};
  ConfusionMatrix cm(mats);
  cm.add("a", "a");
  cm.add("a", "a");
  cm.add("b", "b");
  cm.add("b", "c");
  cm.add("c", "a");
  cm.add("c", "c");
  EXPECT_NEAR(cm.accuracy(), 4.0 / 6.0, 1e-15);
  const auto sub = cm.without("c");
  EXPECT_EQ(sub.labels, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(sub.total(), 3u);
  EXPECT_NEAR(sub.accuracy(), 1.0, 1e-15);
  EXPECT_THROW(cm.add("z", "a"), ValidationError);
  EXPECT_THROW(cm.without("z"), ValidationError);
  const std::vector<TrialPrediction> preds = {predicted("a")};
  EXPECT_THROW(confusion_matrix(preds, std::vector<std::string>{}, mats), ValidationError);
}

TEST(ProtocolConfigCheck, OverlapRejected) {
  ProtocolConfig cfg;
  EXPECT_NO_THROW(validate_protocol(cfg));
  cfg.test.push_back({6.0, 8.0});
  EXPECT_THROW(validate_protocol(cfg), ValidationError);
  cfg = {};
  cfg.test = {};
  EXPECT_THROW(validate_protocol(cfg), ValidationError);
  cfg = {};
  cfg.train = {7.0, 7.0};
  EXPECT_THROW(validate_protocol(cfg), ValidationError);
}

TEST_F(FullGridProtocol, TrainingSetShape) {
  ASSERT_EQ(report_->models.size(), 1u);
  EXPECT_EQ(report_->models[0].group, "P01");
  EXPECT_EQ(report_->models[0].training_vectors, 840u);
  EXPECT_EQ(report_->models[0].ensemble.decoders.size(), 7u);

  const PipelineConfig pipe;
  std::map<std::string, std::size_t> positives;
  std::size_t total = 0;
  for (const auto& r : *corpus_) {
    const auto n = window_features(preprocess(r, pipe), {7.0, 10.0}, pipe).features.size();
    positives[r.meta.material] += n;
    total += n;
  }
  EXPECT_EQ(total, 840u);
  for (const auto& [m, n] : positives) {
    EXPECT_EQ(n, 120u) << m;
    EXPECT_EQ(total - n, 720u) << m;
  }
}

TEST_F(FullGridProtocol, WindowBinCounts) {
  const std::size_t expected[] = {6, 13, 20, 26, 33, 40};
  ASSERT_EQ(report_->windows.size(), 6u);
  for (std::size_t w = 0; w < 6; ++w) {
    EXPECT_EQ(report_->windows[w].bins_per_trial_min, expected[w]);
    EXPECT_EQ(report_->windows[w].bins_per_trial_max, expected[w]);
    for (const auto& o : report_->windows[w].outcomes) EXPECT_EQ(o.prediction.bins(), expected[w]);
  }
}

TEST_F(FullGridProtocol, TemporalHygiene) {
  const auto& a = report_->audit;
  EXPECT_GE(a.train_min_start_s, 7.0 - 1e-12);
  EXPECT_LE(a.train_max_end_s, 10.0 + 1e-12);
  EXPECT_GE(a.test_min_start_s, 1.0 - 1e-12);
  EXPECT_LE(a.test_max_end_s, 7.0 + 1e-12);
  EXPECT_LE(a.test_max_end_s, a.train_min_start_s);
}

TEST_F(FullGridProtocol, AccuracyIdentities) {
  EXPECT_NEAR(report_->chance_level, 1.0 / 7.0, 1e-15);
  for (const auto& w : report_->windows) {
    const double mean_correct =
        static_cast<double>(std::count_if(w.outcomes.begin(), w.outcomes.end(), [](const auto& o) { return o.correct(); })) /
        static_cast<double>(w.outcomes.size());
    EXPECT_EQ(w.overall_accuracy, mean_correct);
    EXPECT_EQ(w.overall_accuracy, w.confusion.accuracy());
    double weighted = 0.0;
    std::size_t n = 0;
    for (std::size_t m = 0; m < w.per_material_accuracy.size(); ++m) {
      EXPECT_GE(w.per_material_accuracy[m], 0.0);
      EXPECT_LE(w.per_material_accuracy[m], 1.0);
      EXPECT_EQ(w.trials_per_material[m], 6u);
      EXPECT_EQ(w.confusion.row_total(m), 6u);
      weighted += w.per_material_accuracy[m] * static_cast<double>(w.trials_per_material[m]);
      n += w.trials_per_material[m];
    }
    EXPECT_NEAR(weighted / static_cast<double>(n), w.overall_accuracy, 1e-12);
    EXPECT_EQ(w.confusion_by_effector.at("finger"), w.confusion);
  }
  EXPECT_GE(report_->final_window().overall_accuracy, report_->windows.front().overall_accuracy);
}

TEST_F(FullGridProtocol, ModelsConverged) {
  for (const auto& g : report_->models) {
    EXPECT_LT(g.ensemble.max_cv_kkt_residual, 1e-6);
    for (const auto& d : g.ensemble.decoders) EXPECT_LT(d.kkt_residual, 1e-6);
  }
}

TEST(Protocol, PureToneCorpusDecodesPerfectly) {
  const auto corpus = pure_tone_corpus();
  ASSERT_EQ(corpus.size(), 14u);
  ProtocolConfig cfg;
  cfg.strict = false;
  const PipelineConfig pipe;

  // Oracle: the loudest band of the x axis names the material.
  const auto& mats = default_materials();
  for (const auto& r : corpus) {
    const auto filtered = preprocess(r, pipe);
    for (const auto& w : cfg.test) {
      const auto s = segment_bins(slice_window(filtered, w.start_s, w.end_s), 0.15);
      for (std::size_t b = 0; b < s.size(); ++b) {
        const auto p = oracle::dft_band_medians(s.axis(b, 0), 200.0);
        const auto band = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
        ASSERT_EQ(mats[band], r.meta.material);
      }
    }
  }

  const auto rep = run_protocol(corpus, cfg, DecoderConfig{});
  for (const auto& w : rep.windows) EXPECT_EQ(w.overall_accuracy, 1.0) << to_string(w.window);
}

TEST(Protocol, StrictModeRejectsIncompleteCorpus) {
  auto corpus = testutil::small_corpus(1);
  auto missing = corpus;
  missing.erase(std::remove_if(missing.begin(), missing.end(), [](const auto& r) { return r.meta.material == "cotton"; }),
                missing.end());
  EXPECT_THROW(prepare_corpus(missing, ProtocolConfig{}, PipelineConfig{}), ValidationError);

  auto dropped = corpus;
  dropped.pop_back();
  EXPECT_THROW(prepare_corpus(dropped, ProtocolConfig{}, PipelineConfig{}), ValidationError);

  auto duplicated = corpus;
  duplicated.push_back(corpus.front());
  EXPECT_THROW(prepare_corpus(duplicated, ProtocolConfig{}, PipelineConfig{}), ValidationError);

  auto off_grid = corpus;
  off_grid[0].meta.speed_rpm = 45;
  EXPECT_THROW(prepare_corpus(off_grid, ProtocolConfig{}, PipelineConfig{}), ValidationError);

  ProtocolConfig relaxed;
  relaxed.strict = false;
  EXPECT_NO_THROW(prepare_corpus(dropped, relaxed, PipelineConfig{}));
  const auto in = prepare_corpus(missing, relaxed, PipelineConfig{});
  EXPECT_EQ(in.materials.size(), 6u);
  EXPECT_THROW(prepare_corpus(std::vector<Recording>{}, relaxed, PipelineConfig{}), ValidationError);
}

TEST(Protocol, RelaxedTwoMaterialCorpus) {
  CorpusPlan plan;
  plan.participants = 1;
  plan.materials = {default_material_bank()[1], default_material_bank()[3]};
  const auto corpus = recordings_of(generate_corpus(plan));
  ASSERT_EQ(corpus.size(), 12u);
  ProtocolConfig cfg;
  cfg.strict = false;
  const auto rep = run_protocol(corpus, cfg, DecoderConfig{});
  EXPECT_EQ(rep.materials, (std::vector<std::string>{"cork", "aluminum"}));
  EXPECT_EQ(rep.chance_level, 0.5);
  EXPECT_EQ(rep.models[0].training_vectors, 240u);
  EXPECT_EQ(rep.final_window().overall_accuracy, 1.0);
}

TEST(Protocol, PooledAndHoldoutSpeed) {
  const auto corpus = testutil::small_corpus(2, false, 31);
  ProtocolConfig cfg;
  cfg.per_participant = false;
  cfg.holdout_speed_rpm = 60;
  cfg.test = {{1.0, 2.0}, {1.0, 7.0}};
  const auto rep = run_protocol(corpus, cfg, DecoderConfig{});
  ASSERT_EQ(rep.models.size(), 1u);
  EXPECT_EQ(rep.models[0].group, "all");
  EXPECT_EQ(rep.models[0].training_vectors, 2u * 28u * 20u);
  for (const auto& w : rep.windows) {
    EXPECT_EQ(w.outcomes.size(), 28u);
    for (const auto& o : w.outcomes) EXPECT_EQ(o.speed_rpm, 60);
  }
  EXPECT_GE(rep.final_window().overall_accuracy, 2.0 * rep.chance_level);
}

TEST(Protocol, MismatchedModelRejected) {
  const auto corpus = testutil::small_corpus(1);
  ProtocolConfig cfg;
  const auto in = prepare_corpus(corpus, cfg, PipelineConfig{});
  auto models = train_models(in, cfg, PipelineConfig{}, DecoderConfig{});
  auto renamed = models;
  renamed[0].group = "P02";
  EXPECT_THROW(evaluate_models(in, renamed, cfg, PipelineConfig{}), ValidationError);
  auto reordered = models;
  std::swap(reordered[0].ensemble.materials[0], reordered[0].ensemble.materials[1]);
  EXPECT_THROW(evaluate_models(in, reordered, cfg, PipelineConfig{}), ValidationError);
  const auto a = evaluate_models(in, models, cfg, PipelineConfig{});
  const auto b = evaluate_models(in, models, cfg, PipelineConfig{});
  for (std::size_t w = 0; w < a.windows.size(); ++w) EXPECT_EQ(a.windows[w].confusion, b.windows[w].confusion);
}
