#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hmk/euclid.hpp"
#include "test_util.hpp"

using namespace hmk;
using hmk::test::unit_dir2;

namespace {
constexpr double kPi = std::numbers::pi;

GridPtr axes_grid() {
  std::vector<std::vector<double>> dirs{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return make_grid(1, dirs);
}
}  // namespace

TEST_CASE("square polygon from four halfplanes") {
  auto poly = polygon_from_support(
      make_support(axes_grid(), std::vector<double>(4, 1.0)));
  CHECK(poly.area == doctest::Approx(4.0).epsilon(1e-12));
  for (int i = 0; i < 4; ++i)
    CHECK(poly.edge_length_by_dir[i] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(polygon_support(poly, unit_dir2(0.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(polygon_support(poly, unit_dir2(kPi / 4)) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("redundant halfplanes are pruned") {
  // the square's own support sampled on a fine grid: only the four axis
  // constraints carry edges, the rest touch at corners
  auto grid = uniform_circle_grid(64);
  std::vector<double> f(64);
  for (int i = 0; i < 64; ++i) {
    const auto& u = grid->dirs[i];
    f[i] = std::abs(u[0]) + std::abs(u[1]);
  }
  auto poly = polygon_from_support(make_support(grid, f));
  CHECK(poly.area == doctest::Approx(4.0).epsilon(1e-9));
  double edge_sum = 0.0;
  for (double e : poly.edge_length_by_dir) edge_sum += e;
  CHECK(edge_sum == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(poly.edge_length_by_dir[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(poly.edge_length_by_dir[16] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("triangle from three halfplanes") {
  std::vector<std::vector<double>> dirs{unit_dir2(kPi / 2),
                                        unit_dir2(kPi / 2 + 2 * kPi / 3),
                                        unit_dir2(kPi / 2 + 4 * kPi / 3)};
  const double c = 0.5;
  auto poly =
      polygon_from_support(make_support(make_grid(1, dirs), {c, c, c}));
  // equilateral triangle with inradius c: side 2 sqrt(3) c, area 3 sqrt(3) c^2
  for (int i = 0; i < 3; ++i)
    CHECK(poly.edge_length_by_dir[i] ==
          doctest::Approx(2.0 * std::sqrt(3.0) * c).epsilon(1e-12));
  CHECK(poly.area ==
        doctest::Approx(3.0 * std::sqrt(3.0) * c * c).epsilon(1e-12));
}

TEST_CASE("edge chaining reconstruction") {
  DiscreteSphereMeasure square =
      make_measure(axes_grid(), {2.0, 2.0, 2.0, 2.0});
  auto poly = polygon_from_measure(square);
  CHECK(poly.area == doctest::Approx(4.0).epsilon(1e-12));
  for (int i = 0; i < 4; ++i)
    CHECK(polygon_support(poly, square.grid->dirs[i]) ==
          doctest::Approx(1.0).epsilon(1e-12));

  // unbalanced atoms do not close
  DiscreteSphereMeasure bad = make_measure(axes_grid(), {3.0, 2.0, 2.0, 2.0});
  CHECK_THROWS_AS(polygon_from_measure(bad), std::runtime_error);
}

TEST_CASE("support -> measure -> reconstruction round trip") {
  auto grid = uniform_circle_grid(40);
  Rng rng(3);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> f(40);
    for (int i = 0; i < 40; ++i) f[i] = rng.uniform(0.8, 1.6);
    auto sv = make_support(grid, f);
    auto poly = polygon_from_support(sv);
    DiscreteSphereMeasure mu =
        make_measure(grid, poly.edge_length_by_dir);
    auto back = polygon_from_measure(mu);
    CHECK(back.area == doctest::Approx(poly.area).epsilon(1e-9));
    // compare supports after removing the translation gauge
    std::vector<double> h(40);
    for (int i = 0; i < 40; ++i) h[i] = polygon_support(back, grid->dirs[i]);
    std::vector<double> ref(40);
    for (int i = 0; i < 40; ++i) ref[i] = polygon_support(poly, grid->dirs[i]);
    auto c = align_translation(make_support(grid, h), ref);
    for (int i = 0; i < 40; ++i) {
      const double aligned = h[i] + c[0] * grid->dirs[i][0] +
                             c[1] * grid->dirs[i][1];
      CHECK(aligned == doctest::Approx(ref[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("flat sampled volume matches the exact area") {
  auto grid = uniform_circle_grid(24);
  std::vector<double> f(24);
  Rng rng(5);
  for (auto& v : f) v = rng.uniform(0.7, 1.4);
  auto sv = make_support(grid, f);
  const double exact = polygon_from_support(sv).area;
  Rng rng2(7);
  auto est = flat_volume_mc(sv, 200000, rng2, 2);
  CHECK(std::abs(est.value - exact) <= 3.0 * est.stderr_);
}

TEST_CASE("flat sampled surface measure matches edge lengths within 2%") {
  auto grid = uniform_circle_grid(24);
  std::vector<double> f(24);
  Rng rng(11);
  for (auto& v : f) v = rng.uniform(0.9, 1.3);
  auto sv = make_support(grid, f);
  auto poly = polygon_from_support(sv);
  Rng rng2(13);
  auto res = flat_surface_measure(sv, 100000, rng2, 2);
  for (int i = 0; i < 24; ++i) {
    if (poly.edge_length_by_dir[i] < 0.05) continue;  // tiny edges are noisy
    CHECK(std::abs(res.measure.weights[i] - poly.edge_length_by_dir[i]) <=
          0.02 * poly.edge_length_by_dir[i] + 3e-3);
  }
  double perim = 0.0;
  for (double e : poly.edge_length_by_dir) perim += e;
  CHECK(std::abs(res.mass - perim) / perim <= 0.01);
}

TEST_CASE("flat d=3 cube: faces and support") {
  std::vector<std::vector<double>> dirs{{1, 0, 0},  {0, 1, 0},  {0, 0, 1},
                                        {-1, 0, 0}, {0, -1, 0}, {0, 0, -1}};
  auto grid = make_flat_grid(3, dirs);
  auto f = make_support(grid, std::vector<double>(6, 1.0));
  Rng rng(17);
  auto vol = flat_volume_mc(f, 200000, rng, 2);
  CHECK(std::abs(vol.value - 8.0) <= 3.0 * vol.stderr_);
  Rng rng2(19);
  auto res = flat_surface_measure(f, 150000, rng2, 2);
  for (int i = 0; i < 6; ++i)
    CHECK(std::abs(res.measure.weights[i] - 4.0) <= 0.08);
  Rng rng3(23);
  auto prof = flat_support_profile(f, rng3, 6000, 60);
  for (int i = 0; i < 6; ++i)
    CHECK(prof[i] == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("euclidean volume identity of the square is one half") {
  // kappa = area / sum(h * edge) = 4 / 8 exactly; the sampled estimators
  // reproduce it within a percent
  auto grid = axes_grid();
  auto sv = make_support(grid, std::vector<double>(4, 1.0));
  auto poly = polygon_from_support(sv);
  double s = 0.0;
  for (int i = 0; i < 4; ++i)
    s += polygon_support(poly, grid->dirs[i]) * poly.edge_length_by_dir[i];
  CHECK(poly.area / s == doctest::Approx(0.5).epsilon(1e-12));

  Rng rng(29);
  auto vol = flat_volume_mc(sv, 150000, rng, 2);
  Rng rng2(31);
  auto meas = flat_surface_measure(sv, 150000, rng2, 2);
  double s2 = 0.0;
  for (int i = 0; i < 4; ++i)
    s2 += 1.0 * meas.measure.weights[i];
  CHECK(vol.value / s2 == doctest::Approx(0.5).epsilon(0.01));
}
