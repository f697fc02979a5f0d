#ifndef HMK_MEASURES_HPP
#define HMK_MEASURES_HPP

#include <vector>

#include "hmk/bodies.hpp"

// H-surface area measure as Gauss-map pushforward of boundary measure,
// boundary sampling, measure diagnostics, smooth densities on the sphere
// of directions and the volume-identity estimator.

namespace hmk {

/// Atoms (u_i, w_i >= 0) on a direction grid; represents both inputs and
/// computed surface measures.
struct DiscreteSphereMeasure {
  GridPtr grid;
  std::vector<double> weights;

  double mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
  int size() const { return static_cast<int>(weights.size()); }
};

DiscreteSphereMeasure make_measure(GridPtr grid, std::vector<double> weights);

struct BoundarySample {
  GroupPoint point;
  std::vector<double> euclidean_normal;   // unit, length 2n+1
  std::vector<double> horizontal_normal;  // frame projections, length 2n
  double patch_area = 0.0;                // Euclidean 2n-area weight
  double grad_norm = 0.0;                 // |grad of the active pairing|
  double margin = 0.0;
  int active_dir = -1;
  bool characteristic = false;
};

/// Boundary density pushed forward by the Gauss map.
///  - horizontal_perimeter: |N_H| d(area), the sub-Riemannian perimeter
///    density (the printed choice for the surface measure);
///  - volume_variation: d(area) / |grad pairing|, the exact first
///    variation of volume in the facet supports (what the variational
///    solver inverts). The two coincide on CC balls (the distance is
///    horizontally eikonal) and in the Euclidean reduction, but differ on
///    general twisted facets.
enum class SurfaceDensity { horizontal_perimeter, volume_variation };

/// Boundary points by bisection along random rays from the origin, with
/// ray-casting area weights and central-difference normals.
std::vector<BoundarySample> boundary_sample(const WulffBody& body,
                                            std::size_t count, Rng& rng,
                                            int workers = 1);

/// Grid index of the maximal active constraint at a boundary sample.
int h_gauss_direction(const BoundarySample& s, const WulffBody& body,
                      double tol = 1e-5);

struct SurfaceMeasureResult {
  DiscreteSphereMeasure measure;
  double mass = 0.0;
  double mass_stderr = 0.0;
  double characteristic_fraction = 0.0;
  std::size_t samples_used = 0;
};

/// Pushforward of the chosen boundary density under the active-constraint
/// Gauss map. Deterministic given seed and worker count.
SurfaceMeasureResult surface_measure(
    const WulffBody& body, std::size_t count, Rng& rng, int workers = 1,
    SurfaceDensity density = SurfaceDensity::horizontal_perimeter);

/// Unnormalized vector integral sum_i w_i u_i.
std::vector<double> centroid(const DiscreteSphereMeasure& mu);

/// min over probe directions v of sum_i w_i <u_i, v>^+; the empirical
/// hemisphere constant c. Zero (up to probe resolution) iff concentrated.
double hemisphere_margin(const DiscreteSphereMeasure& mu, int probes = 4096);

struct SphereDensity {
  std::vector<double> values;
  double grid_step = 0.0;
  bool convex_ok = true;   // false if any value is negative
};

/// Circle case of det(Hess h + h I): density = h'' + h by periodic
/// second-order central differences. Negative values are flagged.
SphereDensity smooth_density_euclidean(const std::vector<double>& h);

/// Sphere (S^2) case on an (n_polar x n_azimuth) latitude-longitude grid
/// excluding the poles; intrinsic Hessian in an orthonormal tangent frame.
struct S2Grid {
  int n_polar = 0;    // interior rows, theta_p = (i+1) pi / (n_polar+1)
  int n_azimuth = 0;  // columns, theta_a = 2 pi j / n_azimuth
  std::vector<double> values;  // row-major
  double at(int i, int j) const;
};

S2Grid smooth_density_euclidean_s2(const S2Grid& h);

/// Experimental: full determinant with the A_ij correction, with the
/// covariant derivative realized along the left-invariant connection
/// table; gamma = 0 flattens the frame and reproduces the Euclidean
/// density exactly.
S2Grid smooth_density_heisenberg(const S2Grid& h, double gamma = 1.0);

struct VolumeIdentityReport {
  double kappa = 0.0;
  double kappa_stderr = 0.0;
  double volume = 0.0;
  double volume_stderr = 0.0;
  double support_integral = 0.0;       // sum_i h_i w_i
  double support_integral_stderr = 0.0;
  double hyp_paper = 0.0;              // 1/(2n+1)
  double hyp_dilation = 0.0;           // 1/(2n+2)
  bool paper_within_2sigma = false;
  bool dilation_within_2sigma = false;
};

/// kappa = Vol / integral of h dS_H, measured; both candidate constants
/// are scored against the estimate.
VolumeIdentityReport volume_identity_check(const WulffBody& body, Rng& rng,
                                           std::size_t volume_samples = 200000,
                                           std::size_t boundary_samples = 200000,
                                           int workers = 1);

/// log-log fit of the surface-measure mass under dilations; the measured
/// scaling exponent (2n+1 for the horizontal density).
double measure_scaling_exponent(const WulffBody& body,
                                const std::vector<double>& lambdas,
                                std::size_t count, Rng& rng, int workers = 1);

}  // namespace hmk

#endif  // HMK_MEASURES_HPP
