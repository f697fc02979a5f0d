#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hmk/bodies.hpp"
#include "test_util.hpp"

using namespace hmk;
using hmk::test::random_point;
using hmk::test::unit_dir2;

namespace {
constexpr double kPi = std::numbers::pi;

// independent quadrature of the CC unit ball volume over the profile sweep
// (r, phi) -> (r * rho(phi), r^2 * tau(phi)); cross-checked against a
// separate Monte-Carlo during development: 0.8258757622 +- 3e-10
double cc_ball_volume_oracle() {
  auto p = [](double phi) { return 2.0 * std::sin(0.5 * phi) / phi; };
  auto pp = [](double phi) {
    return (phi * std::cos(0.5 * phi) - 2.0 * std::sin(0.5 * phi)) /
           (phi * phi);
  };
  auto q = [](double phi) { return (phi - std::sin(phi)) / (2.0 * phi * phi); };
  auto qp = [](double phi) {
    return ((1.0 - std::cos(phi)) * phi - 2.0 * (phi - std::sin(phi))) /
           (2.0 * phi * phi * phi);
  };
  auto integrand = [&](double phi) {
    if (phi < 1e-8) return 1.0 / 12.0;
    return p(phi) * (p(phi) * qp(phi) - 2.0 * pp(phi) * q(phi));
  };
  const int m = 20000;
  const double h = 2.0 * kPi / m;
  double acc = integrand(0.0) + integrand(2.0 * kPi);
  for (int i = 1; i < m; ++i)
    acc += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i * h);
  return kPi * acc * h / 3.0;
}

}  // namespace

TEST_CASE("grid construction and spanning check") {
  auto g = uniform_circle_grid(64);
  CHECK(g->size() == 64);
  CHECK(g->spanning_margin == doctest::Approx(std::cos(kPi / 64)).epsilon(1e-12));

  // half-plane grid rejected
  std::vector<std::vector<double>> half;
  for (int i = 0; i <= 16; ++i) {
    const double th = -0.45 * kPi + 0.9 * kPi * i / 16.0;
    half.push_back(unit_dir2(th));
  }
  CHECK_THROWS_AS(make_grid(1, half), std::invalid_argument);

  CHECK_THROWS_AS(uniform_circle_grid(2), std::invalid_argument);
}

TEST_CASE("support pairing pinned values") {
  auto e1 = unit_dir2(0.0);
  CHECK(support_pairing(identity(1), e1) == 0.0);

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    GroupPoint flat({rng.uniform(-2, 2), rng.uniform(-2, 2)}, 0.0);
    const auto u = unit_dir2(rng.uniform(0, 2 * kPi));
    CHECK(support_pairing(flat, u) ==
          doctest::Approx(flat.z[0] * u[0] + flat.z[1] * u[1]).epsilon(1e-9));
  }
  GroupPoint pole({0.0, 0.0}, 1.0);
  for (double th : {0.0, 1.0, 2.5}) {
    CHECK(support_pairing(pole, unit_dir2(th)) ==
          doctest::Approx(2.0 * std::sqrt(kPi)).epsilon(1e-12));
  }
}

TEST_CASE("wulff construction guards") {
  auto grid = uniform_circle_grid(16);
  CHECK_THROWS_AS(make_support(grid, std::vector<double>(16, 0.0)),
                  std::invalid_argument);
  std::vector<double> f(16, 1.0);
  f[3] = -0.5;
  CHECK_THROWS_AS(make_support(grid, f), std::invalid_argument);
}

TEST_CASE("wulff shape of constant support is the CC ball") {
  auto grid = uniform_circle_grid(96);
  WulffBody ball = wulff_shape(make_support(grid, std::vector<double>(96, 1.0)));
  GroupPoint e = identity(1);
  Rng rng(11);

  // points of the Eq-style sphere parameterization lie inside, near the
  // boundary (within the grid discretization gap)
  for (int i = 0; i < 400; ++i) {
    const double phi = rng.uniform(-2 * kPi, 2 * kPi);
    const double th = rng.uniform(0, 2 * kPi);
    GeodesicParams p = make_geodesic_params({std::cos(th)}, {std::sin(th)},
                                            phi, 1.0);
    GroupPoint s = geodesic_point(p, 1.0);
    CHECK(ball.margin(s) <= 1e-10);
    const double lam = ball.orbit_boundary_scale(hlog_view(s));
    CHECK(lam >= 1.0 - 1e-10);
    CHECK(lam <= 1.0 / grid->spanning_margin + 1e-9);
  }

  // boundary samples have CC radius 1 up to the discretization gap
  for (int i = 0; i < 200; ++i) {
    GroupPoint b = random_boundary_point(ball, rng);
    const double r = cc_distance(e, b);
    CHECK(r >= 1.0 - 1e-9);
    CHECK(r <= 1.0 / grid->spanning_margin + 1e-9);
  }
}

TEST_CASE("wulff idempotence and h <= f on the grid") {
  auto grid = uniform_circle_grid(48);
  std::vector<double> f(48);
  for (int i = 0; i < 48; ++i) {
    const double th = 2.0 * kPi * i / 48;
    f[i] = 1.0 + 0.2 * std::cos(th) + 0.1 * std::sin(2 * th);
  }
  WulffBody body = wulff_shape(make_support(grid, f));
  Rng rng(13);
  std::vector<double> h = support_profile(body, rng, 6000, 60);
  for (int i = 0; i < 48; ++i) CHECK(h[i] <= f[i] + 1e-6);

  // reconstructed body agrees along every sampled orbit within twice the
  // support-estimation tolerance
  WulffBody body2 = wulff_shape(make_support(grid, h));
  Rng rng2(17);
  for (int i = 0; i < 500; ++i) {
    GroupPoint g = hmk::test::random_point(rng2, 1, 1.0, 0.2);
    if (g.znorm2() == 0.0) continue;
    const HLogView v = hlog_view(g);
    const double la = body.orbit_boundary_scale(v);
    const double lb = body2.orbit_boundary_scale(v);
    CHECK(std::abs(lb / la - 1.0) <= 1e-2);
  }
  // Koranyi-gap diagnostic; the quartic root near the poles amplifies the
  // small scale mismatch, so the bound is loose
  Rng rng3(19);
  CHECK(hausdorff_distance(body, body2, 400, rng3) <= 0.15);

  // and the projected support is stable under one more projection
  Rng rng4(23);
  std::vector<double> h2 = support_profile(body2, rng4, 6000, 60);
  for (int i = 0; i < 48; ++i)
    CHECK(std::abs(h2[i] - h[i]) <= 5e-3 * std::max(1.0, h[i]));
}

TEST_CASE("monotonicity and dilation homogeneity of h_support") {
  auto grid = uniform_circle_grid(32);
  std::vector<double> f(32, 1.0), fbig(32, 1.3);
  WulffBody small = wulff_shape(make_support(grid, f));
  WulffBody big = wulff_shape(make_support(grid, fbig));
  Rng rng(23);
  for (int i = 0; i < 500; ++i) {
    GroupPoint g = random_boundary_point(small, rng);
    CHECK(big.contains(g));
  }
  // dilation homogeneity via the pairing itself
  Rng rng2(29);
  for (int i = 0; i < 200; ++i) {
    GroupPoint g = random_point(rng2, 1);
    if (std::sqrt(g.znorm2()) < 1e-6) continue;
    const auto u = unit_dir2(rng2.uniform(0, 2 * kPi));
    const double lam = rng2.uniform(0.3, 2.5);
    CHECK(std::abs(support_pairing(dilate(lam, g), u) -
                   lam * support_pairing(g, u)) <=
          1e-6 * (1.0 + std::abs(lam * support_pairing(g, u))));
  }
  // h_support of a dilated Wulff body
  std::vector<double> fa(32);
  for (int i = 0; i < 32; ++i)
    fa[i] = 1.0 + 0.15 * std::cos(2.0 * kPi * i / 32);
  WulffBody a = wulff_shape(make_support(grid, fa));
  std::vector<double> f2(fa);
  for (double& v : f2) v *= 1.7;
  WulffBody a2 = wulff_shape(make_support(grid, f2));
  Rng r1(31), r2(31);
  const auto u0 = unit_dir2(0.7);
  const double h1 = h_support(a, u0, r1, 1200, 60);
  const double h2 = h_support(a2, u0, r2, 1200, 60);
  CHECK(h2 == doctest::Approx(1.7 * h1).epsilon(5e-3));
}

TEST_CASE("point cloud support and Euclidean reduction") {
  Rng rng(37);
  PointCloudBody cloud;
  for (int i = 0; i < 60; ++i)
    cloud.points.push_back(GroupPoint({rng.uniform(-1, 1), rng.uniform(-1, 1)},
                                      0.0));
  for (int k = 0; k < 32; ++k) {
    const auto u = unit_dir2(2.0 * kPi * k / 32);
    double classical = -1e300;
    for (const auto& g : cloud.points)
      classical = std::max(classical, g.z[0] * u[0] + g.z[1] * u[1]);
    CHECK(h_support(cloud, u) == doctest::Approx(classical).epsilon(1e-10));
  }
  PointCloudBody single;
  single.points.push_back(GroupPoint({0.4, -0.2}, 0.3));
  const auto u = unit_dir2(1.1);
  CHECK(h_support(single, u) ==
        doctest::Approx(support_pairing(single.points[0], u)).epsilon(1e-12));
  CHECK_THROWS_AS(h_support(PointCloudBody{}, u), std::invalid_argument);
}

TEST_CASE("bounding box and axis crossings") {
  auto grid = uniform_circle_grid(64);
  WulffBody ball = wulff_shape(make_support(grid, std::vector<double>(64, 1.0)));
  const BoundingBox& box = ball.bounding_box();
  // t extent: R^2/(2pi) with R = 1/spanning_margin
  const double R = 1.0 / grid->spanning_margin;
  CHECK(box.t_half == doctest::Approx(R * R / (2 * kPi)).epsilon(1e-6));
  CHECK(box.z_half == doctest::Approx(R).epsilon(1e-6));

  Rng rng(41);
  double max_t_seen = 0.0;
  for (int i = 0; i < 10000; ++i) {
    GroupPoint b = random_boundary_point(ball, rng);
    CHECK(std::abs(b.x(0)) <= box.z_half);
    CHECK(std::abs(b.y(0)) <= box.z_half);
    CHECK(std::abs(b.t) <= box.t_half);
    max_t_seen = std::max(max_t_seen, std::abs(b.t));
  }
  // the ball really does reach |t| = 1/(2pi) off-axis, so the cap is tight
  CHECK(max_t_seen >= 0.95 / (2 * kPi));

  auto crossings = axis_crossings(ball);
  for (int k = 0; k < 4; ++k)
    CHECK(crossings[k] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(crossings[4] == doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-9));

  // shrinking f shrinks the box
  WulffBody small = wulff_shape(make_support(grid, std::vector<double>(64, 0.5)));
  CHECK(small.bounding_box().z_half < box.z_half);
  CHECK(small.bounding_box().t_half < box.t_half);
}

TEST_CASE("MC volume: box, dilation scaling, CC ball oracle") {
  // box-shaped membership inside a slightly larger sampling box
  const double a = 1.2, b = 0.8, c = 0.3;
  auto member = [&](const GroupPoint& g) {
    return std::abs(g.x(0)) <= a / 2 && std::abs(g.y(0)) <= b / 2 &&
           std::abs(g.t) <= c / 2;
  };
  BoundingBox box;
  box.n = 1;
  box.z_half = 0.7;
  box.t_half = 0.2;
  Rng rng(43);
  auto est = volume_mc_membership(member, 1, box, 200000, rng);
  CHECK(std::abs(est.value - a * b * c) <= 3.0 * est.stderr_);

  // CC unit ball against the independent profile quadrature
  auto grid = uniform_circle_grid(256);
  WulffBody ball = wulff_shape(make_support(grid, std::vector<double>(256, 1.0)));
  Rng rng2(47);
  auto vb = volume_mc(ball, 300000, rng2);
  const double oracle = cc_ball_volume_oracle();
  // the 256-gon circumscribes the ball; allow the discretization excess
  CHECK(std::abs(vb.value - oracle) <=
        3.0 * vb.stderr_ + 4.0 * (1.0 / grid->spanning_margin - 1.0) * oracle);
  MESSAGE("cc ball volume mc=", vb.value, " oracle=", oracle,
          " stderr=", vb.stderr_);

  // dilation scaling exponent 2n+2 = 4
  Rng rng3(53);
  WulffBody ball2 = wulff_shape(
      make_support(grid, std::vector<double>(256, 1.5)));
  auto v2 = volume_mc(ball2, 300000, rng3);
  const double expo = std::log(v2.value / vb.value) / std::log(1.5);
  CHECK(expo == doctest::Approx(4.0).epsilon(0.02));

  CHECK_THROWS_AS(volume_mc(ball, 100, rng3), std::invalid_argument);
}

TEST_CASE("volume determinism for fixed seed and workers") {
  auto grid = uniform_circle_grid(32);
  WulffBody ball = wulff_shape(make_support(grid, std::vector<double>(32, 1.0)));
  Rng a(99), b(99);
  auto va = volume_mc(ball, 20000, a, 2);
  auto vb = volume_mc(ball, 20000, b, 2);
  CHECK(va.value == vb.value);
  CHECK(va.stderr_ == vb.stderr_);
}

TEST_CASE("hausdorff distance basics") {
  auto grid = uniform_circle_grid(48);
  WulffBody b1 = wulff_shape(make_support(grid, std::vector<double>(48, 1.0)));
  WulffBody b2 = wulff_shape(make_support(grid, std::vector<double>(48, 2.0)));
  Rng rng(61);
  CHECK(hausdorff_distance(b1, b1, 300, rng) == 0.0);
  Rng rng2(67);
  const double d12 = hausdorff_distance(b1, b2, 300, rng2);
  CHECK(d12 > 0.5);
  Rng rng3(71), rng4(71);
  CHECK(hausdorff_distance(b1, b2, 200, rng3) ==
        hausdorff_distance(b2, b1, 200, rng4));
}

TEST_CASE("sampled H-convexity probe on twisted bodies reports honestly") {
  // The CC ball dips to |t| = r^2/(4 pi) on the axis but bulges to
  // r^2/(2 pi) off it, so horizontal chords across the axis crater leave
  // the body: the probe is expected to find genuine counterexamples for
  // pairing-built Wulff bodies. The gauge ball, by contrast, passes.
  auto grid = uniform_circle_grid(24);
  std::vector<double> f(24);
  for (int i = 0; i < 24; ++i)
    f[i] = 1.0 + 0.2 * std::cos(2.0 * kPi * i / 24);
  WulffBody body = wulff_shape(make_support(grid, f));
  Rng rng(73);
  auto member = [&body](const GroupPoint& g) { return body.contains(g); };
  auto rep = is_h_convex_set(
      member,
      box_sampler(1, body.bounding_box().z_half, body.bounding_box().t_half),
      4000, rng);
  MESSAGE("wulff body sampled H-convexity verdict: ", rep.convex);
  if (!rep.convex) {
    // the reported counterexample must be a genuine violation
    REQUIRE(rep.counterexample.has_value());
    const auto& [g, gt] = *rep.counterexample;
    CHECK(member(g));
    CHECK(member(gt));
    CHECK(std::abs(horizontality_defect(g, gt)) <= 1e-9);
    CHECK_FALSE(member(twisted_combination(g, gt, rep.lambda)));
  }

  Rng rng2(79);
  auto gauge_rep = is_h_convex_set(
      [](const GroupPoint& g) { return koranyi_gauge(g) <= 1.0; },
      box_sampler(1, 1.1, 0.3), 10000, rng2);
  CHECK(gauge_rep.convex);
}
