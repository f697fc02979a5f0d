#include "hmk/core.hpp"

#include <cmath>

namespace hmk {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

std::vector<double> scaled(const std::vector<double>& a, double s) {
  std::vector<double> r(a);
  for (double& x : r) x *= s;
  return r;
}

double GroupPoint::znorm2() const {
  double s = 0.0;
  for (double c : z) s += c * c;
  return s;
}

GroupPoint identity(int n) {
  return GroupPoint(std::vector<double>(2 * static_cast<std::size_t>(n), 0.0),
                    0.0);
}

GroupPoint multiply(const GroupPoint& g1, const GroupPoint& g2) {
  if (g1.n() != g2.n()) throw std::invalid_argument("multiply: rank mismatch");
  const int n = g1.n();
  GroupPoint r = identity(n);
  // Im(z1 conj(z2)) summed pairwise: sum_l (y1_l x2_l - x1_l y2_l).
  double im = 0.0;
  for (int l = 0; l < n; ++l) {
    r.z[l] = g1.x(l) + g2.x(l);
    r.z[n + l] = g1.y(l) + g2.y(l);
    im += g1.y(l) * g2.x(l) - g1.x(l) * g2.y(l);
  }
  r.t = g1.t + g2.t + 0.5 * im;
  return r;
}

GroupPoint inverse(const GroupPoint& g) {
  GroupPoint r = g;
  for (double& c : r.z) c = -c;
  r.t = -r.t;
  return r;
}

GroupPoint dilate(double lambda, const GroupPoint& g) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("dilate: lambda must be positive");
  GroupPoint r = g;
  for (double& c : r.z) c *= lambda;
  r.t *= lambda * lambda;
  return r;
}

double koranyi_gauge(const GroupPoint& g) {
  const double q = g.znorm2();
  return std::pow(q * q + 16.0 * g.t * g.t, 0.25);
}

double koranyi_distance(const GroupPoint& g, const GroupPoint& h) {
  return koranyi_gauge(multiply(inverse(h), g));
}

double inner_h(const HorizontalVector& a, const HorizontalVector& b) {
  if (a.base.has_value() != b.base.has_value())
    throw std::invalid_argument("inner_h: mixed based/base-free vectors");
  if (a.base && b.base) {
    const GroupPoint& p = *a.base;
    const GroupPoint& q = *b.base;
    if (p.z != q.z || p.t != q.t)
      throw std::invalid_argument("inner_h: base points differ");
  }
  return dot(a.v, b.v);
}

FrameAt frame_at(const GroupPoint& g) {
  const int n = g.n();
  const std::size_t dim = 2 * static_cast<std::size_t>(n) + 1;
  FrameAt f;
  f.base = g;
  f.X.assign(n, std::vector<double>(dim, 0.0));
  f.Y.assign(n, std::vector<double>(dim, 0.0));
  f.T.assign(dim, 0.0);
  for (int l = 0; l < n; ++l) {
    f.X[l][l] = 1.0;
    f.X[l][dim - 1] = -0.5 * g.y(l);
    f.Y[l][n + l] = 1.0;
    f.Y[l][dim - 1] = 0.5 * g.x(l);
  }
  f.T[dim - 1] = 1.0;
  return f;
}

double horizontality_defect(const GroupPoint& g0, const GroupPoint& g) {
  if (g0.n() != g.n())
    throw std::invalid_argument("horizontality_defect: rank mismatch");
  double s = 0.0;
  for (int l = 0; l < g.n(); ++l)
    s += g0.x(l) * g.y(l) - g.x(l) * g0.y(l);
  return g.t - g0.t + 0.5 * s;
}

bool is_horizontal(const GroupPoint& g0, const GroupPoint& g, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("is_horizontal: tol <= 0");
  return std::abs(horizontality_defect(g0, g)) <= tol;
}

GroupPoint twisted_combination(const GroupPoint& g, const GroupPoint& gp,
                               double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("twisted_combination: lambda outside [0,1]");
  if (lambda == 0.0) return g;
  if (lambda == 1.0) return gp;
  return multiply(g, dilate(lambda, multiply(inverse(g), gp)));
}

namespace {

// Exact flows of the frame fields: along X_l the coordinates move as
// (x_l + s, y_l, t - s y_l / 2), along Y_l as (x_l, y_l + s, t + s x_l / 2).
GroupPoint flow_x(const GroupPoint& g, int l, double s) {
  GroupPoint r = g;
  r.t -= 0.5 * s * g.y(l);
  r.z[l] += s;
  return r;
}

GroupPoint flow_y(const GroupPoint& g, int l, double s) {
  GroupPoint r = g;
  r.t += 0.5 * s * g.x(l);
  r.z[g.n() + l] += s;
  return r;
}

}  // namespace

std::array<double, 3> frame_flow_commutator(const GroupPoint& g, int l,
                                            double step) {
  if (!(step > 0.0))
    throw std::invalid_argument("frame_flow_commutator: step <= 0");
  GroupPoint p = flow_y(g, l, -step);
  p = flow_x(p, l, -step);
  p = flow_y(p, l, step);
  p = flow_x(p, l, step);
  const double inv = 1.0 / (step * step);
  return {(p.x(l) - g.x(l)) * inv, (p.y(l) - g.y(l)) * inv,
          (p.t - g.t) * inv};
}

double horizontal_divergence(
    const std::function<std::vector<double>(const GroupPoint&)>& phi,
    const GroupPoint& g, double step) {
  if (!(step > 0.0))
    throw std::invalid_argument("horizontal_divergence: step <= 0");
  const int n = g.n();
  const FrameAt fr = frame_at(g);
  const std::size_t dim = 2 * static_cast<std::size_t>(n) + 1;

  auto offset = [&](const std::vector<double>& dir, double s) {
    GroupPoint q = g;
    for (std::size_t k = 0; k + 1 < dim; ++k) q.z[k] += s * dir[k];
    q.t += s * dir[dim - 1];
    return q;
  };
  auto deriv = [&](const std::vector<double>& dir, int comp) {
    const std::vector<double> fp = phi(offset(dir, step));
    const std::vector<double> fm = phi(offset(dir, -step));
    return (fp[comp] - fm[comp]) / (2.0 * step);
  };

  double div = 0.0;
  for (int l = 0; l < n; ++l) {
    div += deriv(fr.X[l], l);
    div += deriv(fr.Y[l], n + l);
  }
  return div;
}

PointSampler box_sampler(int n, double z_range, double t_range) {
  return [n, z_range, t_range](Rng& rng) {
    GroupPoint g = identity(n);
    for (double& c : g.z) c = rng.uniform(-z_range, z_range);
    g.t = rng.uniform(-t_range, t_range);
    return g;
  };
}

HConvexityReport is_h_convex_set(const MembershipFn& member,
                                 const PointSampler& sample,
                                 std::size_t trials, Rng& rng,
                                 int lambda_steps, double horizontal_reach) {
  HConvexityReport rep;
  std::size_t done = 0;
  std::size_t attempts = 0;
  const std::size_t max_attempts = 200 * (trials + 1);
  while (done < trials && attempts < max_attempts) {
    ++attempts;
    GroupPoint g = sample(rng);
    if (!member(g)) continue;
    // g~ = g * (w, 0) lies on the horizontal plane through g exactly.
    GroupPoint w = identity(g.n());
    for (double& c : w.z) c = rng.uniform(-horizontal_reach, horizontal_reach);
    GroupPoint gt = multiply(g, w);
    if (!member(gt)) continue;
    ++done;
    for (int k = 1; k <= lambda_steps; ++k) {
      const double lam = static_cast<double>(k) / (lambda_steps + 1);
      if (!member(twisted_combination(g, gt, lam))) {
        rep.convex = false;
        rep.counterexample = {g, gt};
        rep.lambda = lam;
        rep.pairs_tested = done;
        return rep;
      }
    }
  }
  rep.pairs_tested = done;
  return rep;
}

HConvexityReport is_h_convex_function(
    const std::function<double(const GroupPoint&)>& u,
    const PointSampler& sample, std::size_t trials, Rng& rng, int lambda_steps,
    double tol, bool horizontal_pairs_only) {
  HConvexityReport rep;
  for (std::size_t i = 0; i < trials; ++i) {
    GroupPoint g = sample(rng);
    GroupPoint gt;
    if (horizontal_pairs_only) {
      GroupPoint w = identity(g.n());
      for (double& c : w.z) c = rng.uniform(-1.0, 1.0);
      gt = multiply(g, w);
    } else {
      gt = sample(rng);
    }
    const double ug = u(g);
    const double ugt = u(gt);
    for (int k = 1; k <= lambda_steps; ++k) {
      const double lam = static_cast<double>(k) / (lambda_steps + 1);
      const double lhs = u(twisted_combination(g, gt, lam));
      const double rhs = (1.0 - lam) * ug + lam * ugt;
      if (lhs > rhs + tol) {
        rep.convex = false;
        rep.counterexample = {g, gt};
        rep.lambda = lam;
        rep.pairs_tested = i + 1;
        return rep;
      }
    }
  }
  rep.pairs_tested = trials;
  return rep;
}

}  // namespace hmk
