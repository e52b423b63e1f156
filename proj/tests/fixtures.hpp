#pragma once

#include <array>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tactile/decoder.hpp"

namespace fixtures {

// Ten band medians of a unit 25 Hz sine over one 30-sample bin at 200 Hz, from the brute-force
// DFT oracle.
inline constexpr std::array<double, 10> kTone25 = {
    3.3463925678879812e-06, 0.0012443088463817197, 0.042577339155051817, 0.0012443082689091408,
    3.3539627885967399e-06, 2.8586818217434731e-07, 6.179567560783507e-08, 7.6021587790155977e-09,
    4.8155247848910215e-09, 1.5458522072903833e-09,
};

// Small L1 logistic problems and their minimisers from oracle::brute_force_l1_logistic, frozen
// as (w_1..w_p, b).
struct OptimizerFixture {
  std::string name;
  oracle::LogisticData data;
  std::vector<double> expected;
};

inline std::vector<OptimizerFixture> optimizer_fixtures() {
  return {
      {"separable-1d", {{{-1.0}, {1.0}}, {-1, 1}, 0.1}, {2.197224577336, 0.0}},
      {"overlapping-1d",
       {{{-2.0}, {-1.0}, {-0.5}, {0.0}, {0.5}, {1.0}, {1.5}, {2.0}, {3.0}}, {-1, -1, 1, -1, -1, 1, 1, -1, 1}, 0.05},
       {0.598388756023, -0.562289689795}},
      {"sparse-2d",
       {{{0.5, 1.2}, {-1.0, 0.3}, {1.5, -0.7}, {-0.3, -1.1}, {2.0, 0.4}, {-1.7, 0.9}, {0.8, -0.2}, {-0.6, 1.6},
         {1.1, 0.1}, {-2.2, -0.5}},
        {1, -1, 1, -1, 1, -1, -1, -1, 1, 1},
        0.06},
       {0.554053635364, 0.0, -0.010759009885}},
  };
}

// Embeds the fixture columns in the leading coordinates of 72-wide feature vectors.
inline std::vector<tactile::FeatureVector> embed(const oracle::LogisticData& d) {
  std::vector<tactile::FeatureVector> out(d.x.size());
  for (std::size_t i = 0; i < d.x.size(); ++i)
    for (std::size_t j = 0; j < d.x[i].size(); ++j) out[i][j] = d.x[i][j];
  return out;
}

}  // namespace fixtures
