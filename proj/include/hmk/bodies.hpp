#ifndef HMK_BODIES_HPP
#define HMK_BODIES_HPP

#include <memory>
#include <vector>

#include "hmk/core.hpp"
#include "hmk/geodesy.hpp"

// H-convex bodies as horizontal Wulff shapes over a direction grid:
// support pairing, support estimation, Wulff construction, Haar volume
// and body comparison.

namespace hmk {

/// Grid of horizontal unit directions in R^{2n}. Construction verifies the
/// directions positively span (no closed half-space contains all of them);
/// in the plane the check is exact via the largest angular gap, in higher
/// dimension it is probed. Flat grids (n = 0, any dim) serve the Euclidean
/// oracle geometry.
struct DirectionGrid {
  int n = 1;    // Heisenberg rank; 0 for flat oracle grids
  int dim = 2;  // ambient dimension of the directions (2n when n >= 1)
  std::vector<std::vector<double>> dirs;
  /// min over unit v of max_i <u_i, v>; positive iff positively spanning.
  double spanning_margin = 0.0;

  int size() const { return static_cast<int>(dirs.size()); }
};

using GridPtr = std::shared_ptr<const DirectionGrid>;

GridPtr make_grid(int n, std::vector<std::vector<double>> dirs);
GridPtr make_flat_grid(int dim, std::vector<std::vector<double>> dirs);
GridPtr uniform_circle_grid(int count);

/// Positive values f(u_i) over a grid; the discrete support data.
struct SupportVector {
  GridPtr grid;
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
};

SupportVector make_support(GridPtr grid, std::vector<double> values);

/// Either the horizontal log of a point or, on the center axis, the radius
/// paired identically against every direction.
struct HLogView {
  std::vector<double> hl;
  double axis_r = 0.0;
  bool axis = false;
};

HLogView hlog_view(const GroupPoint& g);
double pairing_from_view(const HLogView& v, const std::vector<double>& u);

/// <hlog(g; u), u>; the center convention makes it cc_distance(e, g) there.
double support_pairing(const GroupPoint& g, const std::vector<double>& u);

struct BoundingBox {
  double z_half = 0.0;  // per horizontal coordinate
  double t_half = 0.0;
  int n = 1;
  double volume() const;
};

/// Intersection of horizontal half-spaces H^-(u_i, f_i). Immutable.
class WulffBody {
 public:
  explicit WulffBody(SupportVector f, double membership_tol = 1e-9);

  const SupportVector& support() const { return f_; }
  const GridPtr& grid() const { return f_.grid; }
  int n() const { return f_.grid->n; }
  double membership_tol() const { return tol_; }

  /// max_i (pairing(g, u_i) - f_i); nonpositive inside.
  double margin(const GroupPoint& g) const;
  double margin(const HLogView& v) const;
  bool contains(const GroupPoint& g) const;

  /// Index attaining the margin (the active constraint); ties -> smallest.
  int active_direction(const HLogView& v) const;

  /// Scale lambda with margin(delta_lambda g) = 0; the dilation orbit
  /// through g crosses the boundary at delta_lambda(g).
  double orbit_boundary_scale(const HLogView& v) const;
  GroupPoint project_to_boundary(const GroupPoint& g) const;

  const BoundingBox& bounding_box() const { return box_; }
  /// Rigorous CC-radius cap max_i f_i / spanning_margin.
  double cc_radius_bound() const { return cc_radius_; }

 private:
  SupportVector f_;
  double tol_;
  double cc_radius_;
  BoundingBox box_;
};

WulffBody wulff_shape(const SupportVector& f);

/// Boundary crossings of the coordinate axes (+x_l, -x_l, +y_l, -y_l, +t,
/// -t in that order), each as the absolute crossing coordinate.
std::vector<double> axis_crossings(const WulffBody& body);

struct PointCloudBody {
  std::vector<GroupPoint> points;
};

double h_support(const PointCloudBody& body, const std::vector<double>& u);

/// Sampled sup of the pairing over the body: boundary-biased samples plus
/// hill climbing from the best seeds. Deterministic for a fixed rng state.
double h_support(const WulffBody& body, const std::vector<double>& u, Rng& rng,
                 int samples = 1000, int climb_steps = 50);

/// h_support for every grid direction sharing one boundary cloud.
std::vector<double> support_profile(const WulffBody& body, Rng& rng,
                                    int cloud_size = 4096,
                                    int climb_steps = 50);

/// f is self-consistent when f = h(wulff(f), .) on the grid within tol.
bool is_self_consistent(const SupportVector& f, Rng& rng, double tol = 5e-3);

struct VolumeEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
};

/// Hit-or-miss Lebesgue volume over an axis box. Deterministic given seed
/// and worker count (samples are range-partitioned per worker).
VolumeEstimate volume_mc_membership(const MembershipFn& member, int n,
                                    const BoundingBox& box,
                                    std::size_t samples, Rng& rng,
                                    int workers = 1);

VolumeEstimate volume_mc(const WulffBody& body, std::size_t samples, Rng& rng,
                         int workers = 1);

/// Sampled symmetric Hausdorff distance between boundaries in the Koranyi
/// metric.
double hausdorff_distance(const WulffBody& a, const WulffBody& b,
                          std::size_t samples, Rng& rng);

/// Random point on the boundary, found by projecting a box sample along
/// its dilation orbit.
GroupPoint random_boundary_point(const WulffBody& body, Rng& rng);

}  // namespace hmk

#endif  // HMK_BODIES_HPP
