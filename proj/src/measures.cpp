#include "hmk/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace hmk {

namespace {
constexpr double kPi = std::numbers::pi;

// surface area of the unit sphere S^{d-1} in R^d
double sphere_area(int d) {
  return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

std::vector<double> random_sphere_dir(Rng& rng, int d) {
  // Box-Muller pairs; deterministic for a fixed engine state
  std::vector<double> v(d);
  for (int k = 0; k < d; k += 2) {
    const double u1 = std::max(rng.u01(), 1e-300);
    const double u2 = rng.u01();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    v[k] = rad * std::cos(2.0 * kPi * u2);
    if (k + 1 < d) v[k + 1] = rad * std::sin(2.0 * kPi * u2);
  }
  const double nn = norm(v);
  if (nn < 1e-12) return random_sphere_dir(rng, d);
  for (double& c : v) c /= nn;
  return v;
}

GroupPoint ray_point(int n, const std::vector<double>& xi, double c) {
  GroupPoint g = identity(n);
  for (std::size_t k = 0; k + 1 < xi.size(); ++k) g.z[k] = c * xi[k];
  g.t = c * xi.back();
  return g;
}

// first boundary crossing of the ray c -> c*xi, bisection with a coarse
// rescue scan for non-monotone rays
double ray_crossing(const WulffBody& body, const std::vector<double>& xi) {
  const BoundingBox& box = body.bounding_box();
  double c_box = 1e300;
  for (std::size_t k = 0; k + 1 < xi.size(); ++k)
    if (std::abs(xi[k]) > 1e-14)
      c_box = std::min(c_box, box.z_half / std::abs(xi[k]));
  if (std::abs(xi.back()) > 1e-14)
    c_box = std::min(c_box, box.t_half / std::abs(xi.back()));
  const int n = body.n();
  auto outside = [&](double c) { return body.margin(ray_point(n, xi, c)) > 0.0; };

  double lo = 0.0, hi = c_box;
  if (!outside(hi)) return hi;  // touches the box face (should not happen)
  for (int it = 0; it < 52; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (outside(mid))
      hi = mid;
    else
      lo = mid;
  }
  double c_star = 0.5 * (lo + hi);
  if (std::abs(body.margin(ray_point(n, xi, c_star))) >
      1e-5 * (1.0 + c_star)) {
    // rescue: locate the first sign change on a coarse ladder
    double prev = 0.0;
    for (int k = 1; k <= 256; ++k) {
      const double c = c_box * k / 256.0;
      if (outside(c)) {
        lo = prev;
        hi = c;
        for (int it = 0; it < 52; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (outside(mid))
            hi = mid;
          else
            lo = mid;
        }
        c_star = 0.5 * (lo + hi);
        break;
      }
      prev = c;
    }
  }
  return c_star;
}

BoundarySample make_boundary_sample(const WulffBody& body,
                                    const std::vector<double>& xi,
                                    double area_per_ray) {
  const int n = body.n();
  const std::size_t dim = 2 * static_cast<std::size_t>(n) + 1;
  const double c_star = ray_crossing(body, xi);
  BoundarySample s;
  s.point = ray_point(n, xi, c_star);
  s.margin = body.margin(s.point);

  // central-difference gradient of the margin, scaled per coordinate
  const BoundingBox& box = body.bounding_box();
  std::vector<double> grad(dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) {
    const double h =
        1e-6 * (k + 1 == dim ? std::max(box.t_half, 1e-12) : box.z_half);
    GroupPoint p = s.point, m = s.point;
    if (k + 1 == dim) {
      p.t += h;
      m.t -= h;
    } else {
      p.z[k] += h;
      m.z[k] -= h;
    }
    grad[k] = (body.margin(p) - body.margin(m)) / (2.0 * h);
  }
  const double gn = norm(grad);
  if (gn > 1e-14)
    for (double& c : grad) c /= gn;
  s.euclidean_normal = grad;

  // frame projections <n,X_l>, <n,Y_l> at the point
  s.horizontal_normal.assign(2 * static_cast<std::size_t>(n), 0.0);
  const double nt = grad[dim - 1];
  for (int l = 0; l < n; ++l) {
    s.horizontal_normal[l] = grad[l] - 0.5 * s.point.y(l) * nt;
    s.horizontal_normal[n + l] = grad[n + l] + 0.5 * s.point.x(l) * nt;
  }
  s.characteristic = norm(s.horizontal_normal) < 1e-6;

  const double cosang = std::max(dot(grad, xi), 0.02);
  s.patch_area = area_per_ray * std::pow(c_star, 2 * n) / cosang;
  s.active_dir = body.active_direction(hlog_view(s.point));
  return s;
}

}  // namespace

DiscreteSphereMeasure make_measure(GridPtr grid, std::vector<double> weights) {
  if (!grid) throw std::invalid_argument("measure: null grid");
  if (static_cast<int>(weights.size()) != grid->size())
    throw std::invalid_argument("measure: weight count != grid size");
  double mass = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("measure: negative weight");
    mass += w;
  }
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw std::invalid_argument("measure: total mass must be positive finite");
  return DiscreteSphereMeasure{std::move(grid), std::move(weights)};
}

std::vector<BoundarySample> boundary_sample(const WulffBody& body,
                                            std::size_t count, Rng& rng,
                                            int workers) {
  const double fmin = *std::min_element(body.support().values.begin(),
                                        body.support().values.end());
  if (!(fmin > 0.0))
    throw std::runtime_error("boundary_sample: no interior point at origin");
  workers = std::max(1, workers);
  const int d = 2 * body.n() + 1;
  const double per_ray = sphere_area(d) / static_cast<double>(count);
  std::vector<std::vector<BoundarySample>> parts(workers);
  auto run = [&](int w) {
    Rng local = rng.spawn(static_cast<std::uint64_t>(w));
    const std::size_t lo = count * w / workers;
    const std::size_t hi = count * (w + 1) / workers;
    parts[w].reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i)
      parts[w].push_back(
          make_boundary_sample(body, random_sphere_dir(local, d), per_ray));
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  std::vector<BoundarySample> out;
  out.reserve(count);
  for (auto& p : parts)
    for (auto& s : p) out.push_back(std::move(s));
  return out;
}

int h_gauss_direction(const BoundarySample& s, const WulffBody& body,
                      double tol) {
  const HLogView v = hlog_view(s.point);
  const double m = body.margin(v);
  if (m < -tol * (1.0 + body.cc_radius_bound()))
    throw std::runtime_error(
        "h_gauss_direction: sample has no active constraint within tolerance");
  return body.active_direction(v);
}

SurfaceMeasureResult surface_measure(const WulffBody& body, std::size_t count,
                                     Rng& rng, int workers) {
  const std::vector<BoundarySample> samples =
      boundary_sample(body, count, rng, workers);
  const int K = body.grid()->size();
  std::vector<KahanSum> w(K);
  KahanSum total, total2;
  std::size_t n_char = 0;
  for (const auto& s : samples) {
    if (s.characteristic) {
      ++n_char;
      continue;
    }
    const double c = norm(s.horizontal_normal) * s.patch_area;
    w[s.active_dir].add(c);
    total.add(c);
    total2.add(c * c);
  }
  const double N = static_cast<double>(count);
  const double mean = total.value() / N;
  const double var =
      std::max(0.0, total2.value() / N - mean * mean) * N / std::max(1.0, N - 1);
  SurfaceMeasureResult res;
  std::vector<double> weights(K);
  for (int i = 0; i < K; ++i) weights[i] = std::max(0.0, w[i].value());
  res.measure = DiscreteSphereMeasure{body.grid(), std::move(weights)};
  res.mass = total.value();
  res.mass_stderr = std::sqrt(var * N);  // stderr of a sum of N draws
  res.characteristic_fraction = static_cast<double>(n_char) / N;
  res.samples_used = count;
  return res;
}

std::vector<double> centroid(const DiscreteSphereMeasure& mu) {
  if (!(mu.mass() > 0.0))
    throw std::invalid_argument("centroid: measure has no mass");
  std::vector<double> c(mu.grid->dirs[0].size(), 0.0);
  for (int i = 0; i < mu.size(); ++i)
    for (std::size_t k = 0; k < c.size(); ++k)
      c[k] += mu.weights[i] * mu.grid->dirs[i][k];
  return c;
}

double hemisphere_margin(const DiscreteSphereMeasure& mu, int probes) {
  const std::size_t dim = mu.grid->dirs[0].size();
  auto value = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (int i = 0; i < mu.size(); ++i)
      s += mu.weights[i] * std::max(dot(mu.grid->dirs[i], v), 0.0);
    return s;
  };
  double best = 1e300;
  if (dim == 2) {
    for (int k = 0; k < probes; ++k) {
      const double th = 2.0 * kPi * k / probes;
      best = std::min(best, value({std::cos(th), std::sin(th)}));
    }
  } else {
    Rng rng(0xabcdULL + probes);
    for (const auto& u : mu.grid->dirs) best = std::min(best, value(scaled(u, -1.0)));
    for (int k = 0; k < probes; ++k)
      best = std::min(best, value(random_sphere_dir(rng, static_cast<int>(dim))));
  }
  return best;
}

SphereDensity smooth_density_euclidean(const std::vector<double>& h) {
  const int K = static_cast<int>(h.size());
  if (K < 4)
    throw std::invalid_argument("smooth_density_euclidean: grid too small");
  for (double v : h)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("smooth_density_euclidean: h must be positive");
  const double dth = 2.0 * kPi / K;
  SphereDensity out;
  out.grid_step = dth;
  out.values.resize(K);
  for (int j = 0; j < K; ++j) {
    const double hpp =
        (h[(j + 1) % K] - 2.0 * h[j] + h[(j + K - 1) % K]) / (dth * dth);
    out.values[j] = hpp + h[j];
    if (out.values[j] < 0.0) out.convex_ok = false;
  }
  return out;
}

double S2Grid::at(int i, int j) const {
  const int jj = ((j % n_azimuth) + n_azimuth) % n_azimuth;
  const int ii = std::clamp(i, 0, n_polar - 1);
  return values[static_cast<std::size_t>(ii) * n_azimuth + jj];
}

namespace {

struct S2Frame {
  double tp = 0.0, ta = 0.0;  // polar, azimuth
  double dth = 0.0, dph = 0.0;
};

double d_dtp(const S2Grid& g, int i, int j, double dth) {
  if (i == 0) return (g.at(1, j) - g.at(0, j)) / dth;
  if (i == g.n_polar - 1)
    return (g.at(i, j) - g.at(i - 1, j)) / dth;
  return (g.at(i + 1, j) - g.at(i - 1, j)) / (2.0 * dth);
}

double d_dta(const S2Grid& g, int i, int j, double dph) {
  return (g.at(i, j + 1) - g.at(i, j - 1)) / (2.0 * dph);
}

double d2_dtp(const S2Grid& g, int i, int j, double dth) {
  if (i == 0 || i == g.n_polar - 1) {
    const int ii = std::clamp(i, 1, g.n_polar - 2);
    return (g.at(ii + 1, j) - 2.0 * g.at(ii, j) + g.at(ii - 1, j)) /
           (dth * dth);
  }
  return (g.at(i + 1, j) - 2.0 * g.at(i, j) + g.at(i - 1, j)) / (dth * dth);
}

double d2_dta(const S2Grid& g, int i, int j, double dph) {
  return (g.at(i, j + 1) - 2.0 * g.at(i, j) + g.at(i, j - 1)) / (dph * dph);
}

double d2_mixed(const S2Grid& g, int i, int j, double dth, double dph) {
  if (i == 0 || i == g.n_polar - 1) {
    const int ii = std::clamp(i, 1, g.n_polar - 2);
    return (g.at(ii + 1, j + 1) - g.at(ii + 1, j - 1) - g.at(ii - 1, j + 1) +
            g.at(ii - 1, j - 1)) /
           (4.0 * dth * dph);
  }
  return (g.at(i + 1, j + 1) - g.at(i + 1, j - 1) - g.at(i - 1, j + 1) +
          g.at(i - 1, j - 1)) /
         (4.0 * dth * dph);
}

// intrinsic sphere Hessian of a scalar in the orthonormal frame
// {d/dtheta, (1/sin theta) d/dphi}
void sphere_hessian(const S2Grid& h, int i, int j, double dth, double dph,
                    double tp, double& H11, double& H12, double& H22) {
  const double st = std::sin(tp), ct = std::cos(tp);
  H11 = d2_dtp(h, i, j, dth);
  H12 = d2_mixed(h, i, j, dth, dph) / st -
        (ct / (st * st)) * d_dta(h, i, j, dph);
  H22 = d2_dta(h, i, j, dph) / (st * st) + (ct / st) * d_dtp(h, i, j, dth);
}

}  // namespace

S2Grid smooth_density_euclidean_s2(const S2Grid& h) {
  if (h.n_polar < 3 || h.n_azimuth < 4)
    throw std::invalid_argument("smooth_density_euclidean_s2: grid too small");
  const double dth = kPi / (h.n_polar + 1);
  const double dph = 2.0 * kPi / h.n_azimuth;
  S2Grid out;
  out.n_polar = h.n_polar;
  out.n_azimuth = h.n_azimuth;
  out.values.resize(h.values.size());
  for (int i = 0; i < h.n_polar; ++i) {
    const double tp = (i + 1) * dth;
    for (int j = 0; j < h.n_azimuth; ++j) {
      double H11, H12, H22;
      sphere_hessian(h, i, j, dth, dph, tp, H11, H12, H22);
      const double hv = h.at(i, j);
      out.values[static_cast<std::size_t>(i) * h.n_azimuth + j] =
          (H11 + hv) * (H22 + hv) - H12 * H12;
    }
  }
  return out;
}

namespace {

struct Vec3 {
  double x = 0, y = 0, z = 0;
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
};

// covariant table of the left-invariant metric in the basis {X, Y, T}:
// grad_X Y = T, grad_Y X = -T, grad_X T = grad_T X = -Y,
// grad_Y T = grad_T Y = X, diagonal zero
Vec3 conn_table(const Vec3& a, const Vec3& b) {
  return {a.y * b.z + a.z * b.y, -(a.x * b.z + a.z * b.x),
          a.x * b.y - a.y * b.x};
}

Vec3 sphere_point(double tp, double ta) {
  return {std::sin(tp) * std::cos(ta), std::sin(tp) * std::sin(ta),
          std::cos(tp)};
}

}  // namespace

S2Grid smooth_density_heisenberg(const S2Grid& h, double gamma) {
  if (h.n_polar < 3 || h.n_azimuth < 4)
    throw std::invalid_argument("smooth_density_heisenberg: grid too small");
  if (gamma == 0.0) return smooth_density_euclidean_s2(h);

  const int np = h.n_polar, na = h.n_azimuth;
  const double dth = kPi / (np + 1);
  const double dph = 2.0 * kPi / na;
  auto tp_of = [&](int i) { return (i + 1) * dth; };
  auto ta_of = [&](int j) { return j * dph; };

  // tangent frame directions as ambient triples
  auto E1 = [&](int i, int j) {
    const double tp = tp_of(i), ta = ta_of(j);
    return Vec3{std::cos(tp) * std::cos(ta), std::cos(tp) * std::sin(ta),
                -std::sin(tp)};
  };
  auto E2 = [&](int /*i*/, int j) {
    const double ta = ta_of(j);
    return Vec3{-std::sin(ta), std::cos(ta), 0.0};
  };

  // first covariant derivatives of the direction field
  auto field_v = [&](int i, int j) { return sphere_point(tp_of(i), ta_of(j)); };
  auto fd_field = [&](auto&& F, int i, int j, int axis) -> Vec3 {
    if (axis == 0) {
      if (i == 0) return (F(1, j) - F(0, j)) * (1.0 / dth);
      if (i == np - 1) return (F(i, j) - F(i - 1, j)) * (1.0 / dth);
      return (F(i + 1, j) - F(i - 1, j)) * (1.0 / (2.0 * dth));
    }
    const int jp = (j + 1) % na, jm = (j + na - 1) % na;
    const double st = std::sin(tp_of(i));
    return (F(i, jp) - F(i, jm)) * (1.0 / (2.0 * dph * st));
  };

  auto nabla_v = [&](int i, int j, int k) -> Vec3 {
    const Vec3 flat = fd_field(field_v, i, j, k);
    const Vec3 dir = k == 0 ? E1(i, j) : E2(i, j);
    return flat + conn_table(dir, field_v(i, j)) * gamma;
  };

  // second covariant derivatives D_ik = nabla_i (nabla_k v) corrected by
  // the sphere connection (conn coefficients cot(tp) between e1 and e2)
  auto nabla_field_k = [&](int k) {
    return [&, k](int i, int j) { return nabla_v(i, j, k); };
  };

  S2Grid out;
  out.n_polar = np;
  out.n_azimuth = na;
  out.values.resize(h.values.size());

  auto Wk0 = nabla_field_k(0);
  auto Wk1 = nabla_field_k(1);

  for (int i = 0; i < np; ++i) {
    const double tp = tp_of(i);
    const double cot = std::cos(tp) / std::sin(tp);
    for (int j = 0; j < na; ++j) {
      const Vec3 e1 = E1(i, j), e2 = E2(i, j);
      const Vec3 n1 = nabla_v(i, j, 0), n2 = nabla_v(i, j, 1);
      Vec3 D[2][2];
      D[0][0] = fd_field(Wk0, i, j, 0) + conn_table(e1, n1) * gamma;
      D[0][1] = fd_field(Wk1, i, j, 0) + conn_table(e1, n2) * gamma;
      D[1][0] = fd_field(Wk0, i, j, 1) + conn_table(e2, n1) * gamma -
                n2 * cot;
      D[1][1] = fd_field(Wk1, i, j, 1) + conn_table(e2, n2) * gamma +
                n1 * cot;

      // inverse Gauss map reconstruction G = h v + sum_k (e_k h) nabla_k v
      const double hv = h.at(i, j);
      const double dh1 = d_dtp(h, i, j, dth);
      const double dh2 = d_dta(h, i, j, dph) / std::sin(tp);
      const Vec3 G = sphere_point(tp, ta_of(j)) * hv + n1 * dh1 + n2 * dh2;

      const double gk[2] = {G.dot(n1), G.dot(n2)};
      const Vec3 nv[2] = {n1, n2};
      double A[2][2];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          double s = 0.0;
          for (int k = 0; k < 2; ++k)
            s += gk[k] * (D[a][k].dot(nv[b]) + D[b][k].dot(nv[a]));
          A[a][b] = 0.5 * s;
        }

      double H11, H12, H22;
      sphere_hessian(h, i, j, dth, dph, tp, H11, H12, H22);
      const double M11 = H11 + hv + A[0][0];
      const double M12 = H12 + 0.5 * (A[0][1] + A[1][0]);
      const double M22 = H22 + hv + A[1][1];
      out.values[static_cast<std::size_t>(i) * na + j] = M11 * M22 - M12 * M12;
    }
  }
  return out;
}

VolumeIdentityReport volume_identity_check(const WulffBody& body, Rng& rng,
                                           std::size_t volume_samples,
                                           std::size_t boundary_samples,
                                           int workers) {
  VolumeIdentityReport rep;
  Rng vol_rng = rng.spawn(1);
  Rng bnd_rng = rng.spawn(2);
  Rng sup_rng = rng.spawn(3);

  const VolumeEstimate vol = volume_mc(body, volume_samples, vol_rng, workers);
  rep.volume = vol.value;
  rep.volume_stderr = vol.stderr_;

  const std::vector<double> h = support_profile(body, sup_rng, 8192, 60);
  const std::vector<BoundarySample> samples =
      boundary_sample(body, boundary_samples, bnd_rng, workers);
  KahanSum total, total2;
  for (const auto& s : samples) {
    if (s.characteristic) continue;
    const double c =
        norm(s.horizontal_normal) * s.patch_area * h[s.active_dir];
    total.add(c);
    total2.add(c * c);
  }
  const double N = static_cast<double>(boundary_samples);
  const double mean = total.value() / N;
  const double var = std::max(0.0, total2.value() / N - mean * mean);
  rep.support_integral = total.value();
  rep.support_integral_stderr = std::sqrt(var / N) * N;

  rep.kappa = rep.volume / rep.support_integral;
  const double rv = rep.volume_stderr / rep.volume;
  const double rs = rep.support_integral_stderr / rep.support_integral;
  rep.kappa_stderr = rep.kappa * std::sqrt(rv * rv + rs * rs);

  const int n = body.n();
  rep.hyp_paper = 1.0 / (2.0 * n + 1.0);
  rep.hyp_dilation = 1.0 / (2.0 * n + 2.0);
  rep.paper_within_2sigma =
      std::abs(rep.kappa - rep.hyp_paper) <= 2.0 * rep.kappa_stderr;
  rep.dilation_within_2sigma =
      std::abs(rep.kappa - rep.hyp_dilation) <= 2.0 * rep.kappa_stderr;
  return rep;
}

double measure_scaling_exponent(const WulffBody& body,
                                const std::vector<double>& lambdas,
                                std::size_t count, Rng& rng, int workers) {
  if (lambdas.size() < 2)
    throw std::invalid_argument("measure_scaling_exponent: need >= 2 scales");
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const double lam = lambdas[k];
    SupportVector f = body.support();
    for (double& v : f.values) v *= lam;
    WulffBody scaled_body(std::move(f), body.membership_tol());
    Rng local = rng.spawn(100 + k);
    const SurfaceMeasureResult m =
        surface_measure(scaled_body, count, local, workers);
    lx.push_back(std::log(lam));
    ly.push_back(std::log(m.mass));
  }
  // least-squares slope
  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sx += lx[k];
    sy += ly[k];
    sxx += lx[k] * lx[k];
    sxy += lx[k] * ly[k];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace hmk
