#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "chernoff/scene.hpp"

namespace chernoff::testing {

inline ObjectModel random_object(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (rng() % 4) {
    case 0: {
      PointSet ps;
      const int n = 1 + static_cast<int>(rng() % 4);
      for (int i = 0; i < n; ++i) ps.points.push_back({{2 * u(rng) - 1, 2 * u(rng) - 1}, 0.1 + u(rng)});
      return recenter(ObjectModel::build(ps));
    }
    case 1:
      return ObjectModel::build(FilledEllipse{0.2 + u(rng), 0.2 + u(rng)});
    case 2: {
      const double outer = 0.3 + u(rng);
      return ObjectModel::build(Annulus{outer * 0.8 * u(rng), outer});
    }
    default:
      return ObjectModel::build(UniformDisc{0.2 + u(rng)});
  }
}

struct ScenePair {
  ObjectModel o1, o2;
  double gamma;
};

// Fixed-seed batch of object pairs with gamma log-uniform in [0.05, 0.6].
inline std::vector<ScenePair> random_pairs(int count, std::uint64_t seed = 20240611) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lg(std::log(0.05), std::log(0.6));
  std::vector<ScenePair> out;
  for (int i = 0; i < count; ++i) {
    ObjectModel a = random_object(rng);
    ObjectModel b = random_object(rng);
    out.push_back({a, b, std::exp(lg(rng))});
  }
  return out;
}

}  // namespace chernoff::testing
