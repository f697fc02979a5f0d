#include "hmk/euclid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace hmk {

namespace {
constexpr double kPi = std::numbers::pi;

double cross2(const std::vector<double>& o, const std::vector<double>& a,
              const std::vector<double>& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// counterclockwise convex hull (monotone chain), indices into pts
std::vector<int> hull_indices(const std::vector<std::vector<double>>& pts) {
  std::vector<int> idx(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (pts[a][0] != pts[b][0]) return pts[a][0] < pts[b][0];
    return pts[a][1] < pts[b][1];
  });
  std::vector<int> h;
  auto build = [&](auto begin, auto end) {
    const std::size_t base = h.size();
    for (auto it = begin; it != end; ++it) {
      while (h.size() >= base + 2 &&
             cross2(pts[h[h.size() - 2]], pts[h.back()], pts[*it]) <= 1e-18)
        h.pop_back();
      h.push_back(*it);
    }
    h.pop_back();
  };
  build(idx.begin(), idx.end());
  build(idx.rbegin(), idx.rend());
  return h;
}

std::vector<double> line_intersection(const std::vector<double>& u1, double f1,
                                      const std::vector<double>& u2,
                                      double f2) {
  const double det = u1[0] * u2[1] - u1[1] * u2[0];
  if (std::abs(det) < 1e-14)
    throw std::runtime_error("polygon: parallel active constraints");
  return {(f1 * u2[1] - f2 * u1[1]) / det, (u1[0] * f2 - u2[0] * f1) / det};
}

double shoelace(const std::vector<std::vector<double>>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    a += p[0] * q[1] - p[1] * q[0];
  }
  return 0.5 * a;
}

}  // namespace

Polygon2D polygon_from_support(const SupportVector& f) {
  if (f.grid->dim != 2)
    throw std::invalid_argument("polygon_from_support: plane grids only");
  const int K = f.size();
  // polar dual: the body {<x,u_i> <= f_i} has dual conv{u_i / f_i};
  // active constraints are the hull vertices of the dual points
  std::vector<std::vector<double>> dual(K);
  for (int i = 0; i < K; ++i) {
    dual[i] = {f.grid->dirs[i][0] / f.values[i],
               f.grid->dirs[i][1] / f.values[i]};
  }
  std::vector<int> hull = hull_indices(dual);
  if (hull.size() < 3)
    throw std::runtime_error("polygon_from_support: degenerate body");

  Polygon2D poly;
  poly.edge_length_by_dir.assign(K, 0.0);
  const int m = static_cast<int>(hull.size());
  // vertex between consecutive active constraints (hull is ccw)
  std::vector<std::vector<double>> verts(m);
  for (int k = 0; k < m; ++k) {
    const int i = hull[k];
    const int j = hull[(k + 1) % m];
    verts[k] = line_intersection(f.grid->dirs[i], f.values[i],
                                 f.grid->dirs[j], f.values[j]);
  }
  // edge with normal u_{hull[k]} runs from verts[k-1] to verts[k]
  for (int k = 0; k < m; ++k) {
    const auto& a = verts[(k + m - 1) % m];
    const auto& b = verts[k];
    poly.edge_length_by_dir[hull[k]] =
        std::hypot(b[0] - a[0], b[1] - a[1]);
  }
  poly.vertices = std::move(verts);
  poly.area = std::abs(shoelace(poly.vertices));
  return poly;
}

double polygon_support(const Polygon2D& poly, const std::vector<double>& u) {
  double best = -1e300;
  for (const auto& v : poly.vertices)
    best = std::max(best, v[0] * u[0] + v[1] * u[1]);
  return best;
}

Polygon2D polygon_from_measure(const DiscreteSphereMeasure& mu) {
  if (mu.grid->dirs[0].size() != 2)
    throw std::invalid_argument("polygon_from_measure: plane measures only");
  std::vector<int> idx;
  for (int i = 0; i < mu.size(); ++i)
    if (mu.weights[i] > 0.0) idx.push_back(i);
  if (idx.size() < 3)
    throw std::invalid_argument("polygon_from_measure: fewer than 3 atoms");
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::atan2(mu.grid->dirs[a][1], mu.grid->dirs[a][0]) <
           std::atan2(mu.grid->dirs[b][1], mu.grid->dirs[b][0]);
  });
  Polygon2D poly;
  std::vector<double> cur{0.0, 0.0};
  for (int i : idx) {
    poly.vertices.push_back(cur);
    // edge direction: normal rotated by +90 degrees
    const double ex = -mu.grid->dirs[i][1] * mu.weights[i];
    const double ey = mu.grid->dirs[i][0] * mu.weights[i];
    cur = {cur[0] + ex, cur[1] + ey};
  }
  const double closure = std::hypot(cur[0], cur[1]);
  if (closure > 1e-6 * (1.0 + mu.mass()))
    throw std::runtime_error(
        "polygon_from_measure: edges do not close (centroid != 0)");
  // anchor the area centroid at the origin
  const double a = shoelace(poly.vertices);
  double cx = 0.0, cy = 0.0;
  const std::size_t m = poly.vertices.size();
  for (std::size_t k = 0; k < m; ++k) {
    const auto& p = poly.vertices[k];
    const auto& q = poly.vertices[(k + 1) % m];
    const double w = p[0] * q[1] - p[1] * q[0];
    cx += (p[0] + q[0]) * w;
    cy += (p[1] + q[1]) * w;
  }
  cx /= 6.0 * a;
  cy /= 6.0 * a;
  for (auto& v : poly.vertices) {
    v[0] -= cx;
    v[1] -= cy;
  }
  poly.area = std::abs(a);
  poly.edge_length_by_dir.assign(mu.size(), 0.0);
  for (int i : idx) poly.edge_length_by_dir[i] = mu.weights[i];
  return poly;
}

bool flat_contains(const SupportVector& f, const std::vector<double>& x) {
  for (int i = 0; i < f.size(); ++i)
    if (dot(f.grid->dirs[i], x) > f.values[i]) return false;
  return true;
}

double flat_ray_crossing(const SupportVector& f, const std::vector<double>& xi,
                         int* active) {
  double best = 1e300;
  int arg = -1;
  for (int i = 0; i < f.size(); ++i) {
    const double d = dot(f.grid->dirs[i], xi);
    if (d > 1e-14) {
      const double c = f.values[i] / d;
      if (c < best) {
        best = c;
        arg = i;
      }
    }
  }
  if (arg < 0)
    throw std::runtime_error("flat_ray_crossing: unbounded ray");
  if (active) *active = arg;
  return best;
}

namespace {

std::vector<double> gaussian_dir(Rng& rng, int d) {
  std::vector<double> v(d);
  for (int k = 0; k < d; k += 2) {
    const double u1 = std::max(rng.u01(), 1e-300);
    const double u2 = rng.u01();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    v[k] = rad * std::cos(2.0 * kPi * u2);
    if (k + 1 < d) v[k + 1] = rad * std::sin(2.0 * kPi * u2);
  }
  const double nn = norm(v);
  if (nn < 1e-12) return gaussian_dir(rng, d);
  for (double& c : v) c /= nn;
  return v;
}

double flat_radius_bound(const SupportVector& f) {
  const double fmax = *std::max_element(f.values.begin(), f.values.end());
  return fmax / f.grid->spanning_margin;
}

}  // namespace

VolumeEstimate flat_volume_mc(const SupportVector& f, std::size_t samples,
                              Rng& rng, int workers) {
  if (samples < 1000)
    throw std::invalid_argument("flat_volume_mc: needs at least 1e3 samples");
  const int d = static_cast<int>(f.grid->dirs[0].size());
  const double R = flat_radius_bound(f) * (1.0 + 1e-9);
  workers = std::max(1, workers);
  std::vector<std::size_t> hits(workers, 0);
  auto run = [&](int w) {
    Rng local = rng.spawn(static_cast<std::uint64_t>(w));
    const std::size_t lo = samples * w / workers;
    const std::size_t hi = samples * (w + 1) / workers;
    std::size_t h = 0;
    std::vector<double> x(d);
    for (std::size_t s = lo; s < hi; ++s) {
      for (double& c : x) c = local.uniform(-R, R);
      if (flat_contains(f, x)) ++h;
    }
    hits[w] = h;
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  std::size_t inside = 0;
  for (std::size_t h : hits) inside += h;
  const double p = static_cast<double>(inside) / static_cast<double>(samples);
  double bv = 1.0;
  for (int k = 0; k < d; ++k) bv *= 2.0 * R;
  VolumeEstimate est;
  est.value = bv * p;
  est.stderr_ = bv * std::sqrt(std::max(0.0, p * (1.0 - p) /
                                                 static_cast<double>(samples)));
  est.samples = samples;
  return est;
}

SurfaceMeasureResult flat_surface_measure(const SupportVector& f,
                                          std::size_t count, Rng& rng,
                                          int workers) {
  const int d = static_cast<int>(f.grid->dirs[0].size());
  const int K = f.size();
  const double per_ray =
      2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d) /
      static_cast<double>(count);
  workers = std::max(1, workers);
  std::vector<std::vector<double>> w_parts(workers,
                                           std::vector<double>(K, 0.0));
  std::vector<double> tot(workers, 0.0), tot2(workers, 0.0);
  auto run = [&](int w) {
    Rng local = rng.spawn(static_cast<std::uint64_t>(w));
    const std::size_t lo = count * w / workers;
    const std::size_t hi = count * (w + 1) / workers;
    KahanSum t1, t2;
    for (std::size_t s = lo; s < hi; ++s) {
      const std::vector<double> xi = gaussian_dir(local, d);
      int active = -1;
      const double c = flat_ray_crossing(f, xi, &active);
      const double cosang =
          std::max(dot(f.grid->dirs[active], xi), 0.02);
      const double contrib =
          per_ray * std::pow(c, d - 1) / cosang;
      w_parts[w][active] += contrib;
      t1.add(contrib);
      t2.add(contrib * contrib);
    }
    tot[w] = t1.value();
    tot2[w] = t2.value();
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  std::vector<double> weights(K, 0.0);
  double total = 0.0, total2 = 0.0;
  for (int w = 0; w < workers; ++w) {
    for (int i = 0; i < K; ++i) weights[i] += w_parts[w][i];
    total += tot[w];
    total2 += tot2[w];
  }
  const double N = static_cast<double>(count);
  const double mean = total / N;
  const double var = std::max(0.0, total2 / N - mean * mean);
  SurfaceMeasureResult res;
  res.measure = DiscreteSphereMeasure{f.grid, std::move(weights)};
  res.mass = total;
  res.mass_stderr = std::sqrt(var * N);
  res.samples_used = count;
  return res;
}

std::vector<double> flat_support_profile(const SupportVector& f, Rng& rng,
                                         int cloud_size, int climb_steps) {
  const int d = static_cast<int>(f.grid->dirs[0].size());
  const int K = f.size();
  std::vector<std::vector<double>> cloud;
  cloud.reserve(cloud_size);
  for (int i = 0; i < cloud_size; ++i) {
    std::vector<double> xi = gaussian_dir(rng, d);
    const double c = flat_ray_crossing(f, xi, nullptr);
    cloud.push_back(scaled(xi, c));
  }
  const double R = flat_radius_bound(f);
  std::vector<double> out(K, -1e300);
  for (int i = 0; i < K; ++i) {
    const auto& u = f.grid->dirs[i];
    std::vector<double> best_pt;
    for (const auto& p : cloud) {
      const double v = dot(p, u);
      if (v > out[i]) {
        out[i] = v;
        best_pt = p;
      }
    }
    double sigma = 0.15;
    std::vector<double> cur = best_pt;
    for (int k = 0; k < climb_steps; ++k) {
      std::vector<double> cand = cur;
      for (double& c : cand) c += sigma * R * rng.uniform(-1, 1);
      const double nn = norm(cand);
      if (nn < 1e-12) continue;
      const double cr = flat_ray_crossing(f, scaled(cand, 1.0 / nn), nullptr);
      const std::vector<double> proj = scaled(cand, cr / nn);
      const double v = dot(proj, u);
      if (v > out[i]) {
        out[i] = v;
        cur = proj;
      } else {
        sigma *= 0.93;
      }
    }
  }
  return out;
}

std::vector<double> align_translation(const SupportVector& h,
                                      const std::vector<double>& reference) {
  // minimize sum_i (h_i + <c, u_i> - ref_i)^2 over c
  const int d = static_cast<int>(h.grid->dirs[0].size());
  std::vector<double> atb(d, 0.0);
  std::vector<double> ata(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < h.size(); ++i) {
    const auto& u = h.grid->dirs[i];
    const double r = reference[i] - h.values[i];
    for (int a = 0; a < d; ++a) {
      atb[a] += u[a] * r;
      for (int b = 0; b < d; ++b) ata[a * d + b] += u[a] * u[b];
    }
  }
  // tiny Gaussian elimination
  std::vector<double> c(d, 0.0);
  for (int col = 0; col < d; ++col) {
    int piv = col;
    for (int r = col + 1; r < d; ++r)
      if (std::abs(ata[r * d + col]) > std::abs(ata[piv * d + col])) piv = r;
    for (int k = 0; k < d; ++k) std::swap(ata[col * d + k], ata[piv * d + k]);
    std::swap(atb[col], atb[piv]);
    const double p = ata[col * d + col];
    if (std::abs(p) < 1e-14)
      throw std::runtime_error("align_translation: singular normal matrix");
    for (int r = 0; r < d; ++r) {
      if (r == col) continue;
      const double m = ata[r * d + col] / p;
      for (int k = 0; k < d; ++k) ata[r * d + k] -= m * ata[col * d + k];
      atb[r] -= m * atb[col];
    }
  }
  for (int k = 0; k < d; ++k) c[k] = atb[k] / ata[k * d + k];
  return c;
}

}  // namespace hmk
