#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "tactile/error.hpp"

namespace tactile {

class DegenerateVarianceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Upper tail P(F > f) of the F distribution, via the regularized incomplete beta function.
inline double f_survival(double f, double df_num, double df_den) {
  if (!(df_num > 0) || !(df_den > 0)) throw ParameterError("F distribution needs positive degrees of freedom");
  if (!(f > 0)) return 1.0;
  if (std::isinf(f)) return 0.0;
  return boost::math::ibeta(df_den / 2.0, df_num / 2.0, df_den / (df_den + df_num * f));
}

struct EffectTest {
  double ss = 0.0;
  int df_num = 0;
  int df_den = 0;
  double F = 0.0;
  double p = 1.0;
};

struct AnovaResult {
  EffectTest factor_a;
  EffectTest factor_b;
  EffectTest interaction;
  double ss_error = 0.0;
  int df_error = 0;
  double ss_total = 0.0;
  double grand_mean = 0.0;
};

// observations[a][b] holds the replicates of cell (a, b).
using BalancedTable = std::vector<std::vector<std::vector<double>>>;

// Fixed-effects two-way ANOVA with interaction on a balanced design.
inline AnovaResult two_way_anova(const BalancedTable& table) {
  const std::size_t na = table.size();
  if (na < 2) throw ValidationError("two-way ANOVA needs at least two levels of factor A");
  const std::size_t nb = table[0].size();
  if (nb < 2) throw ValidationError("two-way ANOVA needs at least two levels of factor B");
  const std::size_t reps = table[0][0].size();
  for (const auto& row : table) {
    if (row.size() != nb) throw ValidationError("unbalanced design: factor B levels differ between rows");
    for (const auto& cell : row)
      if (cell.size() != reps) throw ValidationError("unbalanced design: cells have different replicate counts");
  }
  if (reps < 2) throw ValidationError("two-way ANOVA needs at least two replicates per cell");

  std::vector<std::vector<double>> cell_mean(na, std::vector<double>(nb));
  std::vector<double> a_mean(na, 0.0), b_mean(nb, 0.0);
  double grand = 0.0;
  bool constant = true;
  const double first = table[0][0][0];
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      double s = 0.0;
      for (double v : table[i][j]) {
        if (!std::isfinite(v)) throw ValidationError("non-finite observation");
        s += v;
        constant = constant && v == first;
      }
      cell_mean[i][j] = s / static_cast<double>(reps);
    }
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) a_mean[i] += cell_mean[i][j];
    a_mean[i] /= static_cast<double>(nb);
  }
  for (std::size_t j = 0; j < nb; ++j) {
    for (std::size_t i = 0; i < na; ++i) b_mean[j] += cell_mean[i][j];
    b_mean[j] /= static_cast<double>(na);
  }
  for (double m : a_mean) grand += m;
  grand /= static_cast<double>(na);

  AnovaResult r;
  r.grand_mean = grand;
  double ss_a = 0, ss_b = 0, ss_ab = 0, ss_e = 0, ss_t = 0;
  for (std::size_t i = 0; i < na; ++i) ss_a += (a_mean[i] - grand) * (a_mean[i] - grand);
  ss_a *= static_cast<double>(nb * reps);
  for (std::size_t j = 0; j < nb; ++j) ss_b += (b_mean[j] - grand) * (b_mean[j] - grand);
  ss_b *= static_cast<double>(na * reps);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      const double inter = cell_mean[i][j] - a_mean[i] - b_mean[j] + grand;
      ss_ab += inter * inter;
      for (double v : table[i][j]) {
        ss_e += (v - cell_mean[i][j]) * (v - cell_mean[i][j]);
        ss_t += (v - grand) * (v - grand);
      }
    }
  ss_ab *= static_cast<double>(reps);

  const int df_a = static_cast<int>(na) - 1;
  const int df_b = static_cast<int>(nb) - 1;
  const int df_ab = df_a * df_b;
  const int df_e = static_cast<int>(na * nb * (reps - 1));
  r.ss_error = ss_e;
  r.df_error = df_e;
  r.ss_total = ss_t;
  r.factor_a = {ss_a, df_a, df_e, 0.0, 1.0};
  r.factor_b = {ss_b, df_b, df_e, 0.0, 1.0};
  r.interaction = {ss_ab, df_ab, df_e, 0.0, 1.0};
  if (constant) {
    r.factor_a.ss = r.factor_b.ss = r.interaction.ss = r.ss_error = r.ss_total = 0.0;
    return r;
  }
  if (ss_e <= 1e-13 * ss_t)
    throw DegenerateVarianceError("within-cell variance is zero; F statistics are undefined");

  const double ms_e = ss_e / df_e;
  for (EffectTest* t : {&r.factor_a, &r.factor_b, &r.interaction}) {
    t->F = (t->ss / t->df_num) / ms_e;
    t->p = f_survival(t->F, t->df_num, t->df_den);
  }
  return r;
}

struct Observation {
  std::string level_a;
  std::string level_b;
  double value = 0.0;
};

struct TabulatedDesign {
  std::vector<std::string> levels_a;  // first-appearance order
  std::vector<std::string> levels_b;
  BalancedTable table;
};

inline TabulatedDesign tabulate(std::span<const Observation> obs) {
  TabulatedDesign d;
  auto index = [](std::vector<std::string>& levels, const std::string& l) {
    const auto it = std::find(levels.begin(), levels.end(), l);
    if (it != levels.end()) return static_cast<std::size_t>(it - levels.begin());
    levels.push_back(l);
    return levels.size() - 1;
  };
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (const auto& o : obs) cells.emplace_back(index(d.levels_a, o.level_a), index(d.levels_b, o.level_b));
  d.table.assign(d.levels_a.size(), std::vector<std::vector<double>>(d.levels_b.size()));
  for (std::size_t k = 0; k < obs.size(); ++k) d.table[cells[k].first][cells[k].second].push_back(obs[k].value);
  return d;
}

}  // namespace tactile
