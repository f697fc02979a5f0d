#include "hmk/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hmk {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double sinc(double u) {
  if (u == 0.0) return 1.0;
  return std::sin(u) / u;
}

double sin_minus(double u) {
  if (std::abs(u) < 0.5) {
    // u - sin u = u^3/6 (1 - u^2/20 + u^4/840 - u^6/60480 + u^8/6652800)
    const double u2 = u * u;
    return (u * u2 / 6.0) *
           (1.0 +
            u2 * (-1.0 / 20.0 +
                  u2 * (1.0 / 840.0 +
                        u2 * (-1.0 / 60480.0 + u2 / 6652800.0))));
  }
  return u - std::sin(u);
}

double versinc(double u) {
  if (u == 0.0) return 0.0;
  const double s = std::sin(0.5 * u);
  return 2.0 * s * s / u;
}

double tfun(double u) {
  if (u == 0.0) return 0.0;
  return sin_minus(u) / (2.0 * u * u);
}

double geodesic_ratio(double phi) {
  if (phi == 0.0) return 0.0;
  const double s = std::sin(0.5 * phi);
  return sin_minus(phi) / (8.0 * s * s);
}

double geodesic_ratio_deriv(double phi) {
  if (std::abs(phi) < 1e-7) return 1.0 / 12.0 + phi * phi / 120.0;
  const double sh = std::sin(0.5 * phi);
  const double omc = 2.0 * sh * sh;  // 1 - cos(phi)
  return (omc * omc - sin_minus(phi) * std::sin(phi)) / (4.0 * omc * omc);
}

GeodesicParams make_geodesic_params(std::vector<double> A,
                                    std::vector<double> B, double phi,
                                    double r) {
  if (A.size() != B.size() || A.empty())
    throw std::invalid_argument("geodesic params: A/B size mismatch");
  double s2 = 0.0;
  for (std::size_t l = 0; l < A.size(); ++l) s2 += A[l] * A[l] + B[l] * B[l];
  if (std::abs(s2 - 1.0) > 1e-12)
    throw std::invalid_argument("geodesic params: sum(A^2+B^2) != 1");
  if (std::abs(phi) > kTwoPi + 1e-12)
    throw std::invalid_argument("geodesic params: |phi| > 2pi");
  if (!(r > 0.0)) throw std::invalid_argument("geodesic params: r <= 0");
  GeodesicParams p;
  p.A = std::move(A);
  p.B = std::move(B);
  p.phi = phi;
  p.r = r;
  return p;
}

namespace {

// Raw unit curve, valid for any s (no domain clamp); used by quadrature.
GroupPoint eval_unit_curve(const GeodesicParams& p, double s) {
  const int n = p.n();
  GroupPoint g = identity(n);
  const double u = p.phi * s;
  const double vs = versinc(u);
  const double sc = sinc(u);
  for (int l = 0; l < n; ++l) {
    g.z[l] = s * (p.A[l] * vs + p.B[l] * sc);
    g.z[n + l] = s * (-p.B[l] * vs + p.A[l] * sc);
  }
  g.t = s * s * tfun(u);
  return g;
}

}  // namespace

GroupPoint geodesic_point(const GeodesicParams& p, double s) {
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("geodesic_point: s outside [0,1]");
  GroupPoint g = eval_unit_curve(p, s);
  if (p.r != 1.0) g = dilate(p.r, g);
  return g;
}

double arc_length(const GeodesicParams& p, int steps) {
  if (steps < 16) throw std::invalid_argument("arc_length: steps < 16");
  if (steps % 2 != 0) ++steps;
  const double h = 1e-5;
  auto speed = [&](double s) {
    const GroupPoint a = eval_unit_curve(p, s + h);
    const GroupPoint b = eval_unit_curve(p, s - h);
    double v2 = 0.0;
    for (std::size_t k = 0; k < a.z.size(); ++k) {
      const double d = (a.z[k] - b.z[k]) / (2.0 * h);
      v2 += d * d;
    }
    return p.r * std::sqrt(v2);
  };
  // composite Simpson
  const double dx = 1.0 / steps;
  KahanSum acc;
  acc.add(speed(0.0));
  acc.add(speed(1.0));
  for (int i = 1; i < steps; ++i)
    acc.add((i % 2 == 1 ? 4.0 : 2.0) * speed(i * dx));
  return acc.value() * dx / 3.0;
}

HorizontalVector initial_tangent(const GeodesicParams& p) {
  std::vector<double> v(2 * static_cast<std::size_t>(p.n()));
  for (int l = 0; l < p.n(); ++l) {
    v[l] = p.B[l];
    v[p.n() + l] = p.A[l];
  }
  return HorizontalVector(std::move(v));
}

namespace {

// Bracketed Newton on the monotone ratio; rr >= 0, returns phi in [0, 2pi).
double solve_phi_nonneg(double rr, double tol, int max_iter = 200) {
  if (rr == 0.0) return 0.0;
  double lo = 0.0;
  double hi = kTwoPi - 1e-12;
  double phi = rr < 0.6 ? std::min(12.0 * rr, 0.5 * hi)
                        : std::clamp(kTwoPi - std::sqrt(kPi / rr), 1.0,
                                     hi - 1e-13);
  for (int it = 0; it < max_iter; ++it) {
    const double f = geodesic_ratio(phi) - rr;
    if (std::abs(f) <= tol * (1.0 + rr)) return phi;
    if (f > 0.0)
      hi = phi;
    else
      lo = phi;
    if (hi - lo <= 4e-16 * (1.0 + phi)) return 0.5 * (lo + hi);
    const double d = geodesic_ratio_deriv(phi);
    double next = phi - f / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    phi = next;
  }
  std::ostringstream msg;
  msg << "solve_geodesic: ratio root-finder did not converge; bracket ["
      << lo << ", " << hi << "], target " << rr;
  throw std::runtime_error(msg.str());
}

}  // namespace

GeodesicSolveResult solve_geodesic(const GroupPoint& g, double tol) {
  const int n = g.n();
  const double zn2 = g.znorm2();
  if (zn2 == 0.0 && g.t == 0.0)
    throw std::invalid_argument("solve_geodesic: endpoint is the identity");

  GeodesicSolveResult res;
  if (zn2 == 0.0) {
    // center axis: one-parameter family, pick the x_1 tangent by default
    res.unique = false;
    res.tangent_family = true;
    std::vector<double> A(n, 0.0), B(n, 0.0);
    B[0] = 1.0;
    res.params = make_geodesic_params(std::move(A), std::move(B),
                                      g.t > 0.0 ? kTwoPi : -kTwoPi,
                                      std::sqrt(4.0 * kPi * std::abs(g.t)));
    return res;
  }

  const double zn = std::sqrt(zn2);
  const double ratio = g.t / zn2;
  const double phi = (ratio >= 0.0 ? 1.0 : -1.0) *
                     solve_phi_nonneg(std::abs(ratio), tol);
  // r from |z| = r sinc(phi/2); A, B from the endpoint relations, reduced
  // with half-angle identities to a closed form stable across all phi.
  const double r = zn / sinc(0.5 * phi);
  const double ch = std::cos(0.5 * phi);
  const double sh = std::sin(0.5 * phi);
  std::vector<double> A(n), B(n);
  for (int l = 0; l < n; ++l) {
    A[l] = (g.x(l) * sh + g.y(l) * ch) / zn;
    B[l] = (g.x(l) * ch - g.y(l) * sh) / zn;
  }
  // exact unit norm up to rounding; renormalize to keep the invariant tight
  double s2 = 0.0;
  for (int l = 0; l < n; ++l) s2 += A[l] * A[l] + B[l] * B[l];
  const double inv = 1.0 / std::sqrt(s2);
  for (int l = 0; l < n; ++l) {
    A[l] *= inv;
    B[l] *= inv;
  }
  res.params = make_geodesic_params(std::move(A), std::move(B), phi, r);
  res.unique = true;
  return res;
}

double cc_distance(const GroupPoint& g, const GroupPoint& gt) {
  const GroupPoint d = multiply(inverse(g), gt);
  if (d.znorm2() == 0.0 && d.t == 0.0) return 0.0;
  return solve_geodesic(d).params.r;
}

HorizontalVector hlog(const GroupPoint& g,
                      const std::optional<std::vector<double>>& nu) {
  const int n = g.n();
  if (g.znorm2() == 0.0 && g.t == 0.0)
    return HorizontalVector(std::vector<double>(2 * static_cast<std::size_t>(n), 0.0));
  if (g.znorm2() == 0.0) {
    if (!nu)
      throw std::invalid_argument(
          "hlog: center-axis point needs a direction nu");
    if (nu->size() != 2 * static_cast<std::size_t>(n))
      throw std::invalid_argument("hlog: nu has wrong dimension");
    const double nn = norm(*nu);
    if (std::abs(nn - 1.0) > 1e-9)
      throw std::invalid_argument("hlog: nu must be a unit vector");
    const double r = std::sqrt(4.0 * kPi * std::abs(g.t));
    return HorizontalVector(scaled(*nu, r));
  }
  const GeodesicSolveResult sol = solve_geodesic(g);
  HorizontalVector tan = initial_tangent(sol.params);
  return HorizontalVector(scaled(tan.v, sol.params.r));
}

double unit_sphere_t_extent() { return 1.0 / kTwoPi; }

}  // namespace hmk
