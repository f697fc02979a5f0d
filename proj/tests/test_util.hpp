#ifndef HMK_TEST_UTIL_HPP
#define HMK_TEST_UTIL_HPP

#include <cmath>
#include <vector>

#include "hmk/core.hpp"

namespace hmk::test {

inline GroupPoint random_point(Rng& rng, int n, double z_range = 2.0,
                               double t_range = 2.0) {
  GroupPoint g = identity(n);
  for (double& c : g.z) c = rng.uniform(-z_range, z_range);
  g.t = rng.uniform(-t_range, t_range);
  return g;
}

inline double point_dist(const GroupPoint& a, const GroupPoint& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.z.size(); ++i) {
    const double d = a.z[i] - b.z[i];
    s += d * d;
  }
  const double dt = a.t - b.t;
  return std::sqrt(s + dt * dt);
}

inline std::vector<double> unit_dir2(double theta) {
  return {std::cos(theta), std::sin(theta)};
}

}  // namespace hmk::test

#endif
