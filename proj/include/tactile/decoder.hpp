#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tactile/error.hpp"
#include "tactile/features.hpp"
#include "tactile/random.hpp"

namespace tactile {

inline const std::vector<std::string>& default_materials() {
  static const std::vector<std::string> m = {"plastic", "cork", "wool", "aluminum", "paper", "denim", "cotton"};
  return m;
}

using Weights = std::array<double, kFeatureDim>;

inline constexpr double kNonzeroThreshold = 1e-10;

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline double dot(const Weights& w, const FeatureVector& x) {
  double s = 0.0;
  for (std::size_t j = 0; j < kFeatureDim; ++j) s += w[j] * x[j];
  return s;
}

inline std::size_t count_nonzero(const Weights& w) {
  return static_cast<std::size_t>(
      std::count_if(w.begin(), w.end(), [](double v) { return std::abs(v) > kNonzeroThreshold; }));
}

struct SolverOptions {
  double tol = 1e-6;  // on the KKT residual
  int max_iter = 10000;
  bool record_objective = false;
};

// Solution of  min (1/N) sum log(1 + exp(-y (w.x + b))) + lambda * |w|_1  with b unpenalised.
struct L1LogisticFit {
  Weights weights{};
  double bias = 0.0;
  double lambda = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  std::vector<double> objective_trace;  // objective after each accepted step, when recorded
};

namespace detail {

inline void check_binary_problem(std::span<const FeatureVector> X, std::span<const int> y, double lambda) {
  if (X.size() != y.size())
    throw ValidationError("feature rows (" + std::to_string(X.size()) + ") and labels (" + std::to_string(y.size()) +
                          ") differ in length");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be finite and non-negative");
  std::size_t pos = 0, neg = 0;
  for (int v : y) {
    if (v == 1) ++pos;
    else if (v == -1) ++neg;
    else throw ValidationError("labels must be +1 or -1");
  }
  if (pos == 0 || neg == 0) throw TrainingError("binary training needs both classes present");
  for (const auto& r : X)
    for (double v : r.values)
      if (!std::isfinite(v)) throw ValidationError("non-finite feature value in training set");
}

// Shared evaluation state for one binary problem.
class LogisticProblem {
 public:
  static constexpr std::size_t kP = kFeatureDim;
  static constexpr std::size_t kQ = kFeatureDim + 1;  // coefficients plus bias

  LogisticProblem(std::span<const FeatureVector> X, std::span<const int> y, double lambda)
      : x_(X), y_(y), lambda_(lambda), inv_n_(1.0 / static_cast<double>(X.size())) {}

  std::size_t rows() const { return x_.size(); }
  double lambda() const { return lambda_; }

  void margins(const Weights& w, double b, std::vector<double>& m) const {
    m.resize(rows());
    for (std::size_t i = 0; i < rows(); ++i) m[i] = dot(w, x_[i]) + b;
  }

  double loss(const std::vector<double>& m) const {
    double s = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) s += softplus(-y_[i] * m[i]);
    return s * inv_n_;
  }

  double penalty(const Weights& w) const {
    double s = 0.0;
    for (double v : w) s += std::abs(v);
    return lambda_ * s;
  }

  // Gradient of the mean loss; index kP is the bias.
  std::array<double, kQ> gradient(const std::vector<double>& m) const {
    std::array<double, kQ> g{};
    for (std::size_t i = 0; i < rows(); ++i) {
      const double r = -y_[i] * sigmoid(-y_[i] * m[i]);
      for (std::size_t j = 0; j < kP; ++j) g[j] += r * x_[i][j];
      g[kP] += r;
    }
    for (double& v : g) v *= inv_n_;
    return g;
  }

  // Hessian of the mean loss, row-major kQ x kQ.
  std::vector<double> hessian(const std::vector<double>& m) const {
    std::vector<double> h(kQ * kQ, 0.0);
    std::array<double, kQ> xt{};
    xt[kP] = 1.0;
    for (std::size_t i = 0; i < rows(); ++i) {
      const double p = sigmoid(m[i]);
      const double wi = p * (1.0 - p);
      if (wi == 0.0) continue;
      for (std::size_t j = 0; j < kP; ++j) xt[j] = x_[i][j];
      for (std::size_t a = 0; a < kQ; ++a) {
        const double s = wi * xt[a];
        if (s == 0.0) continue;
        double* row = &h[a * kQ];
        for (std::size_t b = a; b < kQ; ++b) row[b] += s * xt[b];
      }
    }
    for (std::size_t a = 0; a < kQ; ++a)
      for (std::size_t b = a; b < kQ; ++b) {
        h[a * kQ + b] *= inv_n_;
        h[b * kQ + a] = h[a * kQ + b];
      }
    return h;
  }

  double kkt_residual(const Weights& w, const std::array<double, kQ>& g) const {
    double r = std::abs(g[kP]);
    for (std::size_t j = 0; j < kP; ++j) {
      const double v = w[j] != 0.0 ? std::abs(g[j] + lambda_ * (w[j] > 0 ? 1.0 : -1.0))
                                   : std::max(0.0, std::abs(g[j]) - lambda_);
      r = std::max(r, v);
    }
    return r;
  }

  const FeatureVector& row(std::size_t i) const { return x_[i]; }

 private:
  std::span<const FeatureVector> x_;
  std::span<const int> y_;
  double lambda_;
  double inv_n_;
};

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Coordinate descent on the penalised quadratic model around (w, b). Returns the step.
inline std::array<double, LogisticProblem::kQ> newton_direction(const std::vector<double>& hess,
                                                                const std::array<double, LogisticProblem::kQ>& grad,
                                                                const Weights& w, double lambda) {
  constexpr std::size_t kP = LogisticProblem::kP;
  constexpr std::size_t kQ = LogisticProblem::kQ;
  constexpr double kDamping = 1e-10;
  constexpr int kMaxSweeps = 2000;

  std::array<double, kQ> d{};
  std::array<double, kQ> hd{};
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double max_step = 0.0, max_d = 0.0;
    for (std::size_t j = 0; j < kQ; ++j) {
      const double a = hess[j * kQ + j] + kDamping;
      const double gq = grad[j] + hd[j];
      double delta;
      if (j == kP) {
        delta = -gq / a;
      } else {
        const double current = w[j] + d[j];
        delta = soft_threshold(current - gq / a, lambda / a) - current;
      }
      if (delta == 0.0) continue;
      d[j] += delta;
      const double* col = &hess[j * kQ];  // symmetric, so row j is column j
      for (std::size_t k = 0; k < kQ; ++k) hd[k] += delta * col[k];
      hd[j] += delta * kDamping;
      max_step = std::max(max_step, std::abs(delta));
      max_d = std::max(max_d, std::abs(d[j]));
    }
    if (max_step <= 1e-6 * max_d || max_step < 1e-15) break;
  }
  return d;
}

}  // namespace detail

// Proximal Newton: each outer iteration solves a penalised quadratic model by coordinate descent,
// then backtracks along that direction until the true objective drops by an Armijo margin, so the
// objective never increases between iterations.
inline L1LogisticFit fit_l1_logistic(std::span<const FeatureVector> X, std::span<const int> y, double lambda,
                                     const SolverOptions& opts = {}, const L1LogisticFit* warm = nullptr) {
  detail::check_binary_problem(X, y, lambda);
  constexpr std::size_t kP = detail::LogisticProblem::kP;
  const detail::LogisticProblem prob(X, y, lambda);

  L1LogisticFit fit;
  fit.lambda = lambda;
  if (warm) {
    fit.weights = warm->weights;
    fit.bias = warm->bias;
  } else {
    // Optimal intercept of the all-zero model.
    const auto pos = std::count(y.begin(), y.end(), 1);
    const double prior = static_cast<double>(pos) / static_cast<double>(y.size());
    fit.bias = std::log(prior / (1.0 - prior));
  }

  std::vector<double> m, trial_m;
  prob.margins(fit.weights, fit.bias, m);
  double objective = prob.loss(m) + prob.penalty(fit.weights);
  if (opts.record_objective) fit.objective_trace.push_back(objective);

  std::vector<double> xd(prob.rows());
  for (int iter = 0;; ++iter) {
    const auto g = prob.gradient(m);
    fit.kkt_residual = prob.kkt_residual(fit.weights, g);
    fit.iterations = iter;
    if (fit.kkt_residual < opts.tol) return fit;
    if (iter >= opts.max_iter)
      throw ConvergenceError("L1 logistic solver did not converge in " + std::to_string(opts.max_iter) +
                             " iterations (KKT residual " + std::to_string(fit.kkt_residual) + ", lambda " +
                             std::to_string(lambda) + ")");

    const auto hess = prob.hessian(m);
    const auto d = detail::newton_direction(hess, g, fit.weights, lambda);

    double l1_now = 0.0, l1_full = 0.0, descent = d[kP] * g[kP];
    Weights wd{};
    for (std::size_t j = 0; j < kP; ++j) {
      wd[j] = d[j];
      descent += g[j] * d[j];
      l1_now += std::abs(fit.weights[j]);
      l1_full += std::abs(fit.weights[j] + d[j]);
    }
    descent += lambda * (l1_full - l1_now);
    for (std::size_t i = 0; i < prob.rows(); ++i) xd[i] = dot(wd, prob.row(i)) + d[kP];

    constexpr double kArmijo = 0.01;
    double step = 1.0;
    bool accepted = false;
    Weights w_new{};
    double b_new = fit.bias;
    double obj_new = objective;
    for (int ls = 0; ls < 60 && descent < 0.0; ++ls, step *= 0.5) {
      for (std::size_t j = 0; j < kP; ++j) w_new[j] = fit.weights[j] + step * d[j];
      b_new = fit.bias + step * d[kP];
      trial_m.resize(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) trial_m[i] = m[i] + step * xd[i];
      obj_new = prob.loss(trial_m) + prob.penalty(w_new);
      if (obj_new <= objective + kArmijo * step * descent) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No representable decrease left while still above the tolerance.
      throw ConvergenceError("L1 logistic line search stalled at KKT residual " + std::to_string(fit.kkt_residual) +
                             " (lambda " + std::to_string(lambda) + ")");
    }
    fit.weights = w_new;
    fit.bias = b_new;
    // Recompute margins from scratch so accumulated rounding never drifts from the weights.
    prob.margins(fit.weights, fit.bias, m);
    objective = prob.loss(m) + prob.penalty(fit.weights);
    if (opts.record_objective) fit.objective_trace.push_back(objective);
  }
}

inline double l1_logistic_objective(std::span<const FeatureVector> X, std::span<const int> y, const Weights& w,
                                    double b, double lambda) {
  const detail::LogisticProblem prob(X, y, lambda);
  std::vector<double> m;
  prob.margins(w, b, m);
  return prob.loss(m) + prob.penalty(w);
}

inline double l1_logistic_kkt_residual(std::span<const FeatureVector> X, std::span<const int> y, const Weights& w,
                                       double b, double lambda) {
  const detail::LogisticProblem prob(X, y, lambda);
  std::vector<double> m;
  prob.margins(w, b, m);
  return prob.kkt_residual(w, prob.gradient(m));
}

// One-vs-rest binary decoder operating on standardized features.
struct MaterialDecoder {
  std::string material;
  Weights weights{};
  double bias = 0.0;
  double lambda = 0.0;
  std::size_t n_nonzero = 0;
  double kkt_residual = 0.0;

  double margin(const FeatureVector& x) const { return dot(weights, x) + bias; }
  bool operator==(const MaterialDecoder&) const = default;
};

inline MaterialDecoder train_binary(std::span<const FeatureVector> X, std::span<const int> y, double lambda,
                                    const SolverOptions& opts = {}) {
  const auto fit = fit_l1_logistic(X, y, lambda, opts);
  return {"", fit.weights, fit.bias, lambda, count_nonzero(fit.weights), fit.kkt_residual};
}

inline double predict_prob(const MaterialDecoder& d, const FeatureVector& x) { return sigmoid(d.margin(x)); }

inline double predict_prob(const MaterialDecoder& d, std::span<const double> x) {
  if (x.size() != kFeatureDim)
    throw ValidationError("feature vector has " + std::to_string(x.size()) + " values, decoder expects " +
                          std::to_string(kFeatureDim));
  FeatureVector fv;
  std::copy(x.begin(), x.end(), fv.values.begin());
  return predict_prob(d, fv);
}

struct LambdaSelection {
  double lambda = 0.0;
  std::vector<double> grid;
  std::vector<double> cv_accuracy;  // aligned with grid
  double max_kkt_residual = 0.0;   // over every fold fit
};

// Stratified k-fold assignment: each class is shuffled with `seed` and dealt round-robin.
inline std::vector<std::size_t> stratified_folds(std::span<const int> y, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ParameterError("cross-validation needs at least two folds");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(i);
  if (pos.size() < k || neg.size() < k)
    throw TrainingError("stratification impossible: " + std::to_string(pos.size()) + " positives and " +
                        std::to_string(neg.size()) + " negatives for " + std::to_string(k) + " folds");
  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<std::size_t> fold(y.size());
  for (std::size_t i = 0; i < pos.size(); ++i) fold[pos[i]] = i % k;
  for (std::size_t i = 0; i < neg.size(); ++i) fold[neg[i]] = i % k;
  return fold;
}

// Largest mean validation accuracy wins; ties go to the larger (sparser) lambda.
inline LambdaSelection select_lambda_cv(std::span<const FeatureVector> X, std::span<const int> y,
                                        std::span<const double> grid, std::size_t k, std::uint64_t seed,
                                        const SolverOptions& opts = {}) {
  if (grid.empty()) throw ParameterError("lambda grid is empty");
  detail::check_binary_problem(X, y, 0.0);
  for (double l : grid)
    if (!(l >= 0.0) || !std::isfinite(l)) throw ParameterError("lambda grid values must be finite and non-negative");

  LambdaSelection sel;
  sel.grid.assign(grid.begin(), grid.end());
  sel.cv_accuracy.assign(grid.size(), 0.0);
  if (grid.size() == 1) {
    sel.lambda = grid[0];
    return sel;
  }

  const auto fold = stratified_folds(y, k, seed);
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return grid[a] > grid[b]; });

  std::vector<FeatureVector> train_x, val_x;
  std::vector<int> train_y, val_y;
  for (std::size_t f = 0; f < k; ++f) {
    train_x.clear();
    val_x.clear();
    train_y.clear();
    val_y.clear();
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (fold[i] == f) {
        val_x.push_back(X[i]);
        val_y.push_back(y[i]);
      } else {
        train_x.push_back(X[i]);
        train_y.push_back(y[i]);
      }
    }
    std::optional<L1LogisticFit> warm;
    for (std::size_t idx : order) {
      warm = fit_l1_logistic(train_x, train_y, grid[idx], opts, warm ? &*warm : nullptr);
      sel.max_kkt_residual = std::max(sel.max_kkt_residual, warm->kkt_residual);
      std::size_t correct = 0;
      for (std::size_t i = 0; i < val_x.size(); ++i) {
        const int pred = dot(warm->weights, val_x[i]) + warm->bias >= 0.0 ? 1 : -1;
        if (pred == val_y[i]) ++correct;
      }
      sel.cv_accuracy[idx] += static_cast<double>(correct) / static_cast<double>(val_x.size());
    }
  }
  for (double& a : sel.cv_accuracy) a /= static_cast<double>(k);

  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (sel.cv_accuracy[i] > sel.cv_accuracy[best] ||
        (sel.cv_accuracy[i] == sel.cv_accuracy[best] && grid[i] > grid[best]))
      best = i;
  }
  sel.lambda = grid[best];
  return sel;
}

inline double select_lambda(std::span<const FeatureVector> X, std::span<const int> y, std::span<const double> grid,
                            std::size_t k, std::uint64_t seed = 0, const SolverOptions& opts = {}) {
  return select_lambda_cv(X, y, grid, k, seed, opts).lambda;
}

struct DecoderConfig {
  std::vector<double> lambda_grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
  std::size_t cv_folds = 5;
  std::uint64_t seed = 20190101;
  SolverOptions solver;

  bool operator==(const DecoderConfig& o) const {
    return lambda_grid == o.lambda_grid && cv_folds == o.cv_folds && seed == o.seed && solver.tol == o.solver.tol &&
           solver.max_iter == o.solver.max_iter;
  }
};

struct DecoderEnsemble {
  std::vector<std::string> materials;
  std::vector<MaterialDecoder> decoders;  // aligned with materials
  StandardizationStats stats;
  double max_cv_kkt_residual = 0.0;

  std::size_t size() const { return materials.size(); }

  std::size_t index_of(std::string_view material) const {
    const auto it = std::find(materials.begin(), materials.end(), material);
    if (it == materials.end()) throw ValidationError("unknown material label '" + std::string(material) + "'");
    return static_cast<std::size_t>(it - materials.begin());
  }

  FeatureVector standardize(const FeatureVector& raw) const { return apply_standardization(stats, raw); }

  std::vector<double> probabilities(const FeatureVector& x) const {
    std::vector<double> p(decoders.size());
    for (std::size_t i = 0; i < decoders.size(); ++i) p[i] = predict_prob(decoders[i], x);
    return p;
  }

  bool operator==(const DecoderEnsemble&) const = default;
};

// `features` are raw (unstandardized); the shared standardization is fitted here on all of them.
inline DecoderEnsemble train_ensemble(std::span<const FeatureVector> features, std::span<const std::string> labels,
                                      std::span<const std::string> materials, const DecoderConfig& cfg = {}) {
  if (features.size() != labels.size()) throw ValidationError("features and labels differ in length");
  if (materials.size() < 2) throw TrainingError("an ensemble needs at least two materials");
  std::vector<std::size_t> counts(materials.size(), 0);
  for (const auto& l : labels) {
    const auto it = std::find(materials.begin(), materials.end(), l);
    if (it == materials.end()) throw TrainingError("training label '" + l + "' is not in the material set");
    ++counts[static_cast<std::size_t>(it - materials.begin())];
  }
  for (std::size_t m = 0; m < materials.size(); ++m)
    if (counts[m] == 0) throw TrainingError("material '" + materials[m] + "' missing from the training set");

  DecoderEnsemble e;
  e.materials.assign(materials.begin(), materials.end());
  e.stats = fit_standardization(features);
  const auto X = apply_standardization(e.stats, features);

  std::vector<int> y(labels.size());
  for (std::size_t m = 0; m < materials.size(); ++m) {
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == materials[m] ? 1 : -1;
    const auto sel = select_lambda_cv(X, y, cfg.lambda_grid, cfg.cv_folds, derive_seed(cfg.seed, m), cfg.solver);
    e.max_cv_kkt_residual = std::max(e.max_cv_kkt_residual, sel.max_kkt_residual);
    auto d = train_binary(X, y, sel.lambda, cfg.solver);
    d.material = materials[m];
    e.decoders.push_back(std::move(d));
  }
  return e;
}

inline DecoderEnsemble train_ensemble(std::span<const FeatureVector> features, std::span<const std::string> labels,
                                      const DecoderConfig& cfg = {}) {
  return train_ensemble(features, labels, default_materials(), cfg);
}

// Index of the largest probability; the earliest index wins ties.
inline std::size_t argmax_material(std::span<const double> probs) {
  if (probs.empty()) throw ValidationError("no decoder outputs to compare");
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i)
    if (probs[i] > probs[best]) best = i;
  return best;
}

// `x` must already be standardized with the ensemble's statistics.
inline const std::string& classify_bin(const DecoderEnsemble& e, const FeatureVector& x) {
  return e.materials[argmax_material(e.probabilities(x))];
}

struct TrialPrediction {
  std::string trial_id;
  std::string predicted_material;
  std::vector<std::size_t> votes;     // per material, ensemble order
  std::vector<double> summed_prob;    // per material, over all bins
  bool tie_broken = false;

  std::size_t bins() const { return std::accumulate(votes.begin(), votes.end(), std::size_t{0}); }
};

// Winner-take-all over per-bin decoder outputs. Each row holds one bin's probabilities in
// material order; a bin votes for its argmax. Vote ties go to the larger summed probability,
// then to the earlier material.
inline TrialPrediction winner_take_all(std::span<const std::vector<double>> bin_probs,
                                       std::span<const std::string> materials, std::string trial_id = {}) {
  if (bin_probs.empty()) throw EmptyResultError("cannot classify a trial with no bins");
  TrialPrediction p;
  p.trial_id = std::move(trial_id);
  p.votes.assign(materials.size(), 0);
  p.summed_prob.assign(materials.size(), 0.0);
  for (const auto& probs : bin_probs) {
    if (probs.size() != materials.size()) throw ValidationError("bin probability row has the wrong width");
    ++p.votes[argmax_material(probs)];
    for (std::size_t m = 0; m < probs.size(); ++m) p.summed_prob[m] += probs[m];
  }
  const std::size_t top = *std::max_element(p.votes.begin(), p.votes.end());
  std::optional<std::size_t> winner;
  std::size_t tied = 0;
  for (std::size_t m = 0; m < materials.size(); ++m) {
    if (p.votes[m] != top) continue;
    ++tied;
    if (!winner || p.summed_prob[m] > p.summed_prob[*winner]) winner = m;
  }
  p.tie_broken = tied > 1;
  p.predicted_material = materials[*winner];
  return p;
}

// `bins` must already be standardized.
inline TrialPrediction classify_trial(const DecoderEnsemble& e, std::span<const FeatureVector> bins,
                                      std::string trial_id = {}) {
  if (bins.empty()) throw EmptyResultError("cannot classify a trial with no bins");
  std::vector<std::vector<double>> probs;
  probs.reserve(bins.size());
  for (const auto& b : bins) probs.push_back(e.probabilities(b));
  return winner_take_all(probs, e.materials, std::move(trial_id));
}

}  // namespace tactile
