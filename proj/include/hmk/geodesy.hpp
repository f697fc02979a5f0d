#ifndef HMK_GEODESY_HPP
#define HMK_GEODESY_HPP

#include <optional>
#include <vector>

#include "hmk/core.hpp"

// Carnot-Caratheodory geodesics from the identity: forward evaluation,
// the inverse endpoint problem, CC distance and the horizontal log map.

namespace hmk {

/// Unit-length geodesic parameters (A, B, phi) plus a length r applied as a
/// dilation. The curve with sum(A^2 + B^2) = 1 has horizontal speed 1.
struct GeodesicParams {
  std::vector<double> A;   // n coefficients
  std::vector<double> B;   // n coefficients
  double phi = 0.0;        // in [-2pi, 2pi]
  double r = 1.0;          // length, positive

  int n() const { return static_cast<int>(A.size()); }
};

/// Validating factory; checks the unit-coefficient and |phi| constraints.
GeodesicParams make_geodesic_params(std::vector<double> A,
                                    std::vector<double> B, double phi,
                                    double r);

struct GeodesicSolveResult {
  GeodesicParams params;
  bool unique = true;
  /// Set when the endpoint sits on the center axis (z = 0): the initial
  /// tangent is then a free circle parameter and params carries a default.
  bool tangent_family = false;
};

// Stable scalar kernels of the geodesic equations (exposed for tests).
double sinc(double u);          // sin(u)/u
double versinc(double u);       // (1 - cos u)/u
double tfun(double u);          // (u - sin u)/(2 u^2)
double sin_minus(double u);     // u - sin(u), cancellation-free

/// Endpoint ratio t/|z|^2 of the unit geodesic as a function of phi:
/// rho(phi) = (phi - sin phi) / (4 (1 - cos phi)); odd, increasing.
double geodesic_ratio(double phi);
double geodesic_ratio_deriv(double phi);

/// Curve point at parameter s in [0,1] (identity at s = 0), length r
/// realized by dilation.
GroupPoint geodesic_point(const GeodesicParams& p, double s);

/// Quadrature of the horizontal speed over [0,1]; returns approximately r.
/// Uses finite differences of the curve so it stays an independent check
/// of the forward evaluation. steps >= 16.
double arc_length(const GeodesicParams& p, int steps = 256);

/// Unit tangent at s = 0, the tuple (B_1..B_n, A_1..A_n); phi-independent.
HorizontalVector initial_tangent(const GeodesicParams& p);

/// Inverse endpoint problem for g != e. For z != 0 the solution is unique;
/// for center points the tangent is a free parameter and a default is
/// returned with tangent_family set.
GeodesicSolveResult solve_geodesic(const GroupPoint& g, double tol = 4e-16);

double cc_distance(const GroupPoint& g, const GroupPoint& gt);

/// Position vector of g: cc distance times the initial tangent of the
/// minimizing geodesic. Center points need the direction nu (the in-plane
/// tangent convention aligns the degenerate tangent with nu).
HorizontalVector hlog(const GroupPoint& g,
                      const std::optional<std::vector<double>>& nu = {});

/// Largest |t| on the unit CC sphere: max over phi of (phi - sin phi) /
/// (2 phi^2), attained at phi = +-pi with value 1/(2 pi). Bodies of CC
/// radius R therefore fit in |t| <= R^2 * this.
double unit_sphere_t_extent();

}  // namespace hmk

#endif  // HMK_GEODESY_HPP
