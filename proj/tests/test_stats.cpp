#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tactile/stats.hpp"

using namespace tactile;

namespace {

const BalancedTable kFixture2x2 = {{{10, 12}, {20, 22}}, {{30, 32}, {40, 42}}};

BalancedTable random_design(std::mt19937_64& gen) {
  std::uniform_int_distribution<std::size_t> levels(2, 6), reps(2, 5);
  std::normal_distribution<double> nd(0.0, 1.0);
  const std::size_t na = levels(gen), nb = levels(gen), r = reps(gen);
  std::vector<double> ea(na), eb(nb);
  for (auto& v : ea) v = 2.0 * nd(gen);
  for (auto& v : eb) v = 2.0 * nd(gen);
  BalancedTable t(na, std::vector<std::vector<double>>(nb));
  const double mu = 50.0 * nd(gen);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b) {
      const double ab = nd(gen);
      for (std::size_t k = 0; k < r; ++k) t[a][b].push_back(mu + ea[a] + eb[b] + ab + nd(gen));
    }
  return t;
}

BalancedTable transformed(const BalancedTable& t, double scale, double shift) {
  auto out = t;
  for (auto& row : out)
    for (auto& cell : row)
      for (auto& v : cell) v = scale * v + shift;
  return out;
}

}  // namespace

TEST(Anova, OracleReproducesFixtureSums) {
  const auto s = oracle::projection_anova(kFixture2x2);
  EXPECT_NEAR(s.ss_a, 800.0, 1e-9);
  EXPECT_NEAR(s.ss_b, 200.0, 1e-9);
  EXPECT_NEAR(s.ss_ab, 0.0, 1e-9);
  EXPECT_NEAR(s.ss_error, 8.0, 1e-9);
  EXPECT_NEAR(s.ss_total, 1008.0, 1e-9);
}

TEST(Anova, FixtureMatchesProjectionOracle) {
  const auto r = two_way_anova(kFixture2x2);
  const auto s = oracle::projection_anova(kFixture2x2);
  EXPECT_NEAR(r.factor_a.ss, s.ss_a, 1e-9);
  EXPECT_NEAR(r.factor_b.ss, s.ss_b, 1e-9);
  EXPECT_NEAR(r.interaction.ss, s.ss_ab, 1e-9);
  EXPECT_NEAR(r.ss_error, s.ss_error, 1e-9);
  EXPECT_NEAR(r.ss_total, s.ss_total, 1e-9);
  EXPECT_DOUBLE_EQ(r.grand_mean, 26.0);
  EXPECT_EQ(r.factor_a.df_num, 1);
  EXPECT_EQ(r.factor_b.df_num, 1);
  EXPECT_EQ(r.interaction.df_num, 1);
  EXPECT_EQ(r.df_error, 4);
  EXPECT_DOUBLE_EQ(r.factor_a.F, 400.0);
  EXPECT_DOUBLE_EQ(r.factor_b.F, 100.0);
  EXPECT_EQ(r.interaction.F, 0.0);
  EXPECT_EQ(r.interaction.p, 1.0);
}

TEST(Anova, RandomDesignsMatchOracleAndAddUp) {
  std::mt19937_64 gen(2024);
  for (int rep = 0; rep < 100; ++rep) {
    const auto t = random_design(gen);
    const auto r = two_way_anova(t);
    const double parts = r.factor_a.ss + r.factor_b.ss + r.interaction.ss + r.ss_error;
    EXPECT_NEAR(parts, r.ss_total, 1e-9 * r.ss_total);
    const auto s = oracle::projection_anova(t);
    EXPECT_NEAR(r.factor_a.ss, s.ss_a, 1e-8 * s.ss_total);
    EXPECT_NEAR(r.factor_b.ss, s.ss_b, 1e-8 * s.ss_total);
    EXPECT_NEAR(r.interaction.ss, s.ss_ab, 1e-8 * s.ss_total);
    EXPECT_NEAR(r.ss_error, s.ss_error, 1e-8 * s.ss_total);
    const int na = static_cast<int>(t.size()), nb = static_cast<int>(t[0].size()), k = static_cast<int>(t[0][0].size());
    EXPECT_EQ(r.factor_a.df_num, na - 1);
    EXPECT_EQ(r.factor_b.df_num, nb - 1);
    EXPECT_EQ(r.interaction.df_num, (na - 1) * (nb - 1));
    EXPECT_EQ(r.df_error, na * nb * (k - 1));
    for (const auto* e : {&r.factor_a, &r.factor_b, &r.interaction}) {
      EXPECT_GE(e->F, 0.0);
      EXPECT_GE(e->p, 0.0);
      EXPECT_LE(e->p, 1.0);
      EXPECT_EQ(e->df_den, r.df_error);
    }
  }
}

TEST(Anova, LocationAndScaleInvariance) {
  std::mt19937_64 gen(77);
  for (int rep = 0; rep < 20; ++rep) {
    const auto t = random_design(gen);
    const auto base = two_way_anova(t);
    for (auto [scale, shift] : {std::pair{1.0, 1000.0}, std::pair{3.5, 0.0}, std::pair{0.01, -42.0}}) {
      const auto r = two_way_anova(transformed(t, scale, shift));
      EXPECT_NEAR(r.factor_a.F, base.factor_a.F, 1e-7 * std::max(1.0, base.factor_a.F));
      EXPECT_NEAR(r.factor_b.F, base.factor_b.F, 1e-7 * std::max(1.0, base.factor_b.F));
      EXPECT_NEAR(r.interaction.F, base.interaction.F, 1e-7 * std::max(1.0, base.interaction.F));
    }
  }
}

TEST(Anova, ConstantDataGivesZeroF) {
  const BalancedTable t(3, std::vector<std::vector<double>>(2, std::vector<double>(4, 0.98)));
  const auto r = two_way_anova(t);
  for (const auto* e : {&r.factor_a, &r.factor_b, &r.interaction}) {
    EXPECT_EQ(e->F, 0.0);
    EXPECT_EQ(e->p, 1.0);
  }
  EXPECT_EQ(r.ss_total, 0.0);
}

TEST(Anova, Errors) {
  EXPECT_THROW(two_way_anova({{{1, 2}, {3, 4}}}), ValidationError);
  EXPECT_THROW(two_way_anova({{{1, 2}}, {{3, 4}}}), ValidationError);
  EXPECT_THROW(two_way_anova({{{1, 2}, {3, 4}}, {{5, 6}, {7}}}), ValidationError);
  EXPECT_THROW(two_way_anova({{{1, 2}, {3, 4}}, {{5, 6}}}), ValidationError);
  EXPECT_THROW(two_way_anova({{{1}, {3}}, {{5}, {7}}}), ValidationError);
  // Cell means differ but replicates agree exactly: no error variance to test against.
  EXPECT_THROW(two_way_anova({{{1, 1}, {3, 3}}, {{5, 5}, {7, 7}}}), DegenerateVarianceError);
}

TEST(Anova, PValueMatchesQuadrature) {
  const std::vector<std::tuple<double, double, double>> cases = {
      {2.5, 3, 20}, {1.71, 6, 60}, {0.4, 2, 12}, {5.0, 1, 8}, {1.0, 4, 30}, {3.2, 12, 40}, {8.0, 2, 6}};
  for (const auto& [f, d1, d2] : cases) {
    const double q = oracle::f_tail_by_quadrature(f, d1, d2);
    EXPECT_NEAR(f_survival(f, d1, d2), q, 1e-6) << f << " " << d1 << " " << d2;
  }
  EXPECT_NEAR(f_survival(2.5, 3, 20), 0.0888437519377, 1e-9);
  EXPECT_EQ(f_survival(0.0, 3, 20), 1.0);
  EXPECT_THROW(f_survival(1.0, 0, 20), ParameterError);
}

TEST(Anova, TabulateFromObservations) {
  std::vector<Observation> obs;
  const double v[2][2][2] = {{{10, 12}, {20, 22}}, {{30, 32}, {40, 42}}};
  for (int k = 0; k < 2; ++k)
    for (int b = 1; b >= 0; --b)
      for (int a = 0; a < 2; ++a)
        obs.push_back({a ? "felt" : "silk", b ? "fast" : "slow", v[a][b][k]});
  const auto d = tabulate(obs);
  EXPECT_EQ(d.levels_a, (std::vector<std::string>{"silk", "felt"}));
  EXPECT_EQ(d.levels_b, (std::vector<std::string>{"fast", "slow"}));
  const auto r = two_way_anova(d.table);
  EXPECT_NEAR(r.factor_a.ss, 800.0, 1e-9);
  EXPECT_NEAR(r.factor_b.ss, 200.0, 1e-9);
}
