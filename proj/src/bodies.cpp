#include "hmk/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace hmk {

namespace {
constexpr double kPi = std::numbers::pi;

double spanning_margin_2d(const std::vector<std::vector<double>>& dirs) {
  // exact in the plane: positively spanning iff the largest angular gap
  // between consecutive directions is < pi; the margin is cos(gap/2)
  std::vector<double> ang;
  ang.reserve(dirs.size());
  for (const auto& u : dirs) ang.push_back(std::atan2(u[1], u[0]));
  std::sort(ang.begin(), ang.end());
  double max_gap = 2.0 * kPi - (ang.back() - ang.front());
  for (std::size_t i = 1; i < ang.size(); ++i)
    max_gap = std::max(max_gap, ang[i] - ang[i - 1]);
  if (max_gap >= kPi) return 0.0;
  return std::cos(0.5 * max_gap);
}

double spanning_margin_probe(const std::vector<std::vector<double>>& dirs,
                             int dim) {
  // probed lower-dimensional boundary search; probabilistic for 2n > 2
  Rng rng(0x5eedULL + dirs.size());
  double margin = 1e300;
  auto eval = [&](const std::vector<double>& v) {
    double best = -1e300;
    for (const auto& u : dirs) best = std::max(best, dot(u, v));
    margin = std::min(margin, best);
  };
  for (const auto& u : dirs) eval(scaled(u, -1.0));
  for (int k = 0; k < 20000; ++k) {
    std::vector<double> v(dim);
    double s2 = 0.0;
    for (double& c : v) {
      c = rng.uniform(-1.0, 1.0);
      s2 += c * c;
    }
    if (s2 < 1e-12) continue;
    eval(scaled(v, 1.0 / std::sqrt(s2)));
  }
  return margin;
}

}  // namespace

namespace {

GridPtr build_grid(int n, int dim, std::vector<std::vector<double>> dirs) {
  if (dirs.size() < static_cast<std::size_t>(dim) + 1)
    throw std::invalid_argument("grid: too few directions to span");
  for (auto& u : dirs) {
    if (u.size() != static_cast<std::size_t>(dim))
      throw std::invalid_argument("grid: direction has wrong dimension");
    const double nn = norm(u);
    if (std::abs(nn - 1.0) > 1e-12) {
      if (nn < 1e-12)
        throw std::invalid_argument("grid: zero direction");
      for (double& c : u) c /= nn;
    }
  }
  auto g = std::make_shared<DirectionGrid>();
  g->n = n;
  g->dim = dim;
  g->dirs = std::move(dirs);
  g->spanning_margin = (dim == 2) ? spanning_margin_2d(g->dirs)
                                  : spanning_margin_probe(g->dirs, dim);
  if (g->spanning_margin <= 1e-9)
    throw std::invalid_argument(
        "grid: directions do not positively span (half-space found)");
  return g;
}

}  // namespace

GridPtr make_grid(int n, std::vector<std::vector<double>> dirs) {
  if (n < 1) throw std::invalid_argument("grid: n must be >= 1");
  return build_grid(n, 2 * n, std::move(dirs));
}

GridPtr make_flat_grid(int dim, std::vector<std::vector<double>> dirs) {
  if (dim < 2) throw std::invalid_argument("grid: dim must be >= 2");
  return build_grid(0, dim, std::move(dirs));
}

GridPtr uniform_circle_grid(int count) {
  if (count < 3) throw std::invalid_argument("circle grid: count < 3");
  std::vector<std::vector<double>> dirs;
  dirs.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double th = 2.0 * kPi * i / count;
    dirs.push_back({std::cos(th), std::sin(th)});
  }
  return make_grid(1, std::move(dirs));
}

SupportVector make_support(GridPtr grid, std::vector<double> values) {
  if (!grid) throw std::invalid_argument("support: null grid");
  if (static_cast<int>(values.size()) != grid->size())
    throw std::invalid_argument("support: size mismatch with grid");
  for (double v : values)
    if (!(v > 0.0))
      throw std::invalid_argument("support: values must be positive");
  return SupportVector{std::move(grid), std::move(values)};
}

HLogView hlog_view(const GroupPoint& g) {
  HLogView v;
  if (g.znorm2() == 0.0) {
    v.axis = true;
    v.axis_r = std::sqrt(4.0 * kPi * std::abs(g.t));
    v.hl.assign(2 * static_cast<std::size_t>(g.n()), 0.0);
    return v;
  }
  v.hl = hlog(g).v;
  return v;
}

double pairing_from_view(const HLogView& v, const std::vector<double>& u) {
  if (v.axis) return v.axis_r;
  return dot(v.hl, u);
}

double support_pairing(const GroupPoint& g, const std::vector<double>& u) {
  if (std::abs(norm(u) - 1.0) > 1e-9)
    throw std::invalid_argument("support_pairing: direction must be unit");
  if (g.znorm2() == 0.0 && g.t == 0.0) return 0.0;
  return pairing_from_view(hlog_view(g), u);
}

double BoundingBox::volume() const {
  double v = 2.0 * t_half;
  for (int k = 0; k < 2 * n; ++k) v *= 2.0 * z_half;
  return v;
}

WulffBody::WulffBody(SupportVector f, double membership_tol)
    : f_(std::move(f)), tol_(membership_tol) {
  if (!f_.grid) throw std::invalid_argument("wulff: null grid");
  if (f_.grid->n < 1)
    throw std::invalid_argument("wulff: flat grids have no twisted body");
  for (double v : f_.values)
    if (!(v > 0.0))
      throw std::invalid_argument("wulff: support values must be positive");
  const double fmax = *std::max_element(f_.values.begin(), f_.values.end());
  cc_radius_ = fmax / f_.grid->spanning_margin;
  // members satisfy d_cc <= cc_radius_, hence |z| <= R and
  // |t| <= R^2 * (max t on the unit CC sphere)
  box_.n = f_.grid->n;
  box_.z_half = cc_radius_ * (1.0 + 1e-9);
  box_.t_half = cc_radius_ * cc_radius_ * unit_sphere_t_extent() *
                (1.0 + 1e-9);
}

double WulffBody::margin(const HLogView& v) const {
  double m = -1e300;
  for (int i = 0; i < f_.size(); ++i)
    m = std::max(m, pairing_from_view(v, f_.grid->dirs[i]) - f_.values[i]);
  return m;
}

double WulffBody::margin(const GroupPoint& g) const {
  if (g.znorm2() == 0.0 && g.t == 0.0)
    return -*std::min_element(f_.values.begin(), f_.values.end());
  return margin(hlog_view(g));
}

bool WulffBody::contains(const GroupPoint& g) const {
  return margin(g) <= tol_;
}

int WulffBody::active_direction(const HLogView& v) const {
  int best = 0;
  double m = -1e300;
  for (int i = 0; i < f_.size(); ++i) {
    const double c = pairing_from_view(v, f_.grid->dirs[i]) - f_.values[i];
    if (c > m) {
      m = c;
      best = i;
    }
  }
  return best;
}

double WulffBody::orbit_boundary_scale(const HLogView& v) const {
  double r = 0.0;
  for (int i = 0; i < f_.size(); ++i)
    r = std::max(r, pairing_from_view(v, f_.grid->dirs[i]) / f_.values[i]);
  if (!(r > 0.0))
    throw std::runtime_error("orbit_boundary_scale: degenerate point");
  return 1.0 / r;
}

GroupPoint WulffBody::project_to_boundary(const GroupPoint& g) const {
  return dilate(orbit_boundary_scale(hlog_view(g)), g);
}

WulffBody wulff_shape(const SupportVector& f) { return WulffBody(f); }

std::vector<double> axis_crossings(const WulffBody& body) {
  const int n = body.n();
  std::vector<double> out;
  out.reserve(4 * n + 2);
  for (int k = 0; k < 2 * n; ++k) {
    for (double sgn : {1.0, -1.0}) {
      GroupPoint p = identity(n);
      p.z[k] = sgn;
      out.push_back(body.orbit_boundary_scale(hlog_view(p)));
    }
  }
  const double fmin = *std::min_element(body.support().values.begin(),
                                        body.support().values.end());
  const double t_cross = fmin * fmin / (4.0 * kPi);
  out.push_back(t_cross);
  out.push_back(t_cross);
  return out;
}

double h_support(const PointCloudBody& body, const std::vector<double>& u) {
  if (body.points.empty())
    throw std::invalid_argument("h_support: empty point cloud");
  double best = -1e300;
  for (const auto& g : body.points)
    best = std::max(best, support_pairing(g, u));
  return best;
}

GroupPoint random_boundary_point(const WulffBody& body, Rng& rng) {
  const BoundingBox& box = body.bounding_box();
  for (int tries = 0; tries < 1000; ++tries) {
    GroupPoint g = identity(body.n());
    for (double& c : g.z) c = rng.uniform(-box.z_half, box.z_half);
    g.t = rng.uniform(-box.t_half, box.t_half);
    if (g.znorm2() == 0.0 && g.t == 0.0) continue;
    return body.project_to_boundary(g);
  }
  throw std::runtime_error("random_boundary_point: sampling failed");
}

namespace {

// local hill climb of the pairing along the boundary
double climb_support(const WulffBody& body, const std::vector<double>& u,
                     GroupPoint seed, double value, int steps, Rng& rng) {
  const BoundingBox& box = body.bounding_box();
  double sigma = 0.15;
  GroupPoint cur = std::move(seed);
  for (int k = 0; k < steps; ++k) {
    GroupPoint cand = cur;
    for (double& c : cand.z) c += sigma * box.z_half * rng.uniform(-1, 1);
    cand.t += sigma * box.t_half * rng.uniform(-1, 1);
    if (cand.znorm2() == 0.0 && cand.t == 0.0) continue;
    cand = body.project_to_boundary(cand);
    const double v = support_pairing(cand, u);
    if (v > value) {
      value = v;
      cur = cand;
    } else {
      sigma *= 0.93;
    }
  }
  return value;
}

}  // namespace

double h_support(const WulffBody& body, const std::vector<double>& u, Rng& rng,
                 int samples, int climb_steps) {
  if (std::abs(norm(u) - 1.0) > 1e-9)
    throw std::invalid_argument("h_support: direction must be unit");
  struct Seed {
    GroupPoint g;
    double v;
  };
  std::vector<Seed> top;
  for (int i = 0; i < samples; ++i) {
    GroupPoint b = random_boundary_point(body, rng);
    const double v = support_pairing(b, u);
    top.push_back({std::move(b), v});
    std::sort(top.begin(), top.end(),
              [](const Seed& a, const Seed& b2) { return a.v > b2.v; });
    if (top.size() > 3) top.pop_back();
  }
  double best = -1e300;
  for (auto& s : top)
    best = std::max(best,
                    climb_support(body, u, s.g, s.v, climb_steps, rng));
  return best;
}

std::vector<double> support_profile(const WulffBody& body, Rng& rng,
                                    int cloud_size, int climb_steps) {
  const auto& dirs = body.grid()->dirs;
  const int K = static_cast<int>(dirs.size());
  std::vector<GroupPoint> cloud;
  cloud.reserve(cloud_size);
  std::vector<HLogView> views;
  views.reserve(cloud_size);
  for (int i = 0; i < cloud_size; ++i) {
    GroupPoint b = random_boundary_point(body, rng);
    views.push_back(hlog_view(b));
    cloud.push_back(std::move(b));
  }
  std::vector<double> out(K, -1e300);
  for (int i = 0; i < K; ++i) {
    int arg = 0;
    for (int k = 0; k < cloud_size; ++k) {
      const double v = pairing_from_view(views[k], dirs[i]);
      if (v > out[i]) {
        out[i] = v;
        arg = k;
      }
    }
    out[i] = climb_support(body, dirs[i], cloud[arg], out[i], climb_steps,
                           rng);
  }
  return out;
}

bool is_self_consistent(const SupportVector& f, Rng& rng, double tol) {
  WulffBody body(f);
  const std::vector<double> h = support_profile(body, rng);
  for (int i = 0; i < f.size(); ++i)
    if (std::abs(h[i] - f.values[i]) > tol * std::max(1.0, f.values[i]))
      return false;
  return true;
}

VolumeEstimate volume_mc_membership(const MembershipFn& member, int n,
                                    const BoundingBox& box,
                                    std::size_t samples, Rng& rng,
                                    int workers) {
  if (samples < 1000)
    throw std::invalid_argument("volume_mc: needs at least 1e3 samples");
  if (!(box.z_half > 0.0) || !(box.t_half > 0.0))
    throw std::invalid_argument("volume_mc: degenerate bounding box");
  workers = std::max(1, workers);
  std::vector<std::size_t> hits(workers, 0);
  auto run = [&](int w) {
    Rng local = rng.spawn(static_cast<std::uint64_t>(w));
    const std::size_t lo = samples * w / workers;
    const std::size_t hi = samples * (w + 1) / workers;
    std::size_t h = 0;
    GroupPoint g = identity(n);
    for (std::size_t s = lo; s < hi; ++s) {
      for (double& c : g.z) c = local.uniform(-box.z_half, box.z_half);
      g.t = local.uniform(-box.t_half, box.t_half);
      if (member(g)) ++h;
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
  const double bv = box.volume();
  VolumeEstimate est;
  est.value = bv * p;
  est.stderr_ = bv * std::sqrt(std::max(0.0, p * (1.0 - p) /
                                                 static_cast<double>(samples)));
  est.samples = samples;
  return est;
}

VolumeEstimate volume_mc(const WulffBody& body, std::size_t samples, Rng& rng,
                         int workers) {
  return volume_mc_membership(
      [&body](const GroupPoint& g) { return body.contains(g); }, body.n(),
      body.bounding_box(), samples, rng, workers);
}

double hausdorff_distance(const WulffBody& a, const WulffBody& b,
                          std::size_t samples, Rng& rng) {
  if (a.n() != b.n())
    throw std::invalid_argument("hausdorff_distance: rank mismatch");
  // Koranyi gap between the two boundaries along shared dilation orbits;
  // exact per orbit, sampled over orbit directions. Symmetric by
  // construction and exactly zero for identical bodies.
  const BoundingBox& box_a = a.bounding_box();
  const BoundingBox& box_b = b.bounding_box();
  const double zr = std::max(box_a.z_half, box_b.z_half);
  const double tr = std::max(box_a.t_half, box_b.t_half);
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    GroupPoint g = identity(a.n());
    for (double& c : g.z) c = rng.uniform(-zr, zr);
    g.t = rng.uniform(-tr, tr);
    if (g.znorm2() == 0.0 && g.t == 0.0) continue;
    const HLogView v = hlog_view(g);
    const GroupPoint pa = dilate(a.orbit_boundary_scale(v), g);
    const GroupPoint pb = dilate(b.orbit_boundary_scale(v), g);
    worst = std::max(worst, koranyi_distance(pa, pb));
  }
  return worst;
}

}  // namespace hmk
