#ifndef HMK_EUCLID_HPP
#define HMK_EUCLID_HPP

#include <vector>

#include "hmk/bodies.hpp"
#include "hmk/measures.hpp"

// Flat-geometry backend: exact 2D polygon algebra for support vectors
// (halfplane intersection via polar duality), the classical edge-chaining
// reconstruction, and sampled estimators in arbitrary dimension. Used by
// the Euclidean oracle solver and as an independent check of the sampled
// machinery.

namespace hmk {

struct Polygon2D {
  std::vector<std::vector<double>> vertices;  // counterclockwise
  std::vector<double> edge_length_by_dir;     // per input direction, 0 if inactive
  double area = 0.0;
};

/// Intersection of {x : <x, u_i> <= f_i} for a positively spanning plane
/// grid; exact up to rounding.
Polygon2D polygon_from_support(const SupportVector& f);

/// Exact Euclidean support function of the polygon.
double polygon_support(const Polygon2D& poly, const std::vector<double>& u);

/// Classical Minkowski reconstruction in the plane: rotate atom normals by
/// 90 degrees, chain edges in angular order. Valid when the centroid
/// vanishes; the polygon is anchored with its area centroid at the origin.
Polygon2D polygon_from_measure(const DiscreteSphereMeasure& mu);

/// Membership of the flat body {x : <x, u_i> <= f_i} in R^d.
bool flat_contains(const SupportVector& f, const std::vector<double>& x);

/// Exact first crossing of the ray c -> c * xi with the flat boundary.
double flat_ray_crossing(const SupportVector& f, const std::vector<double>& xi,
                         int* active = nullptr);

/// Hit-or-miss volume of the flat body in R^d.
VolumeEstimate flat_volume_mc(const SupportVector& f, std::size_t samples,
                              Rng& rng, int workers = 1);

/// Ray-cast surface measure of the flat body (classical surface area
/// measure; unit density).
SurfaceMeasureResult flat_surface_measure(const SupportVector& f,
                                          std::size_t count, Rng& rng,
                                          int workers = 1);

/// Sampled support profile of the flat body (cloud + hill climb), for
/// dimensions where the exact polygon route is unavailable.
std::vector<double> flat_support_profile(const SupportVector& f, Rng& rng,
                                         int cloud_size = 4096,
                                         int climb_steps = 50);

/// Least-squares translation c making h + <c, u> closest to the reference;
/// removes the translation gauge before support comparisons.
std::vector<double> align_translation(const SupportVector& h,
                                      const std::vector<double>& reference);

}  // namespace hmk

#endif  // HMK_EUCLID_HPP
