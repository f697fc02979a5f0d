#ifndef HMK_SOLVER_HPP
#define HMK_SOLVER_HPP

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmk/bodies.hpp"
#include "hmk/euclid.hpp"
#include "hmk/measures.hpp"

// The variational Minkowski solver: validate the prescribed measure,
// minimize Phi(f) = ||f|| / Vol(wulff(f))^beta over support vectors by
// projected coordinate descent, renormalize, and dilate to match mass.
// A classical Euclidean solver on the same engine serves as the oracle.

namespace hmk {

struct CentroidViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct HemisphereConcentration : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfeasibleInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SolveMode { heisenberg, euclidean };

struct SolverConfig {
  SolveMode mode = SolveMode::heisenberg;
  /// Exponent beta on the volume inside Phi. 0 selects the dilation-
  /// consistent 1/Q (Q = 2n+2 twisted, d flat), which makes Phi exactly
  /// homogeneous of degree zero; 1/(2n+1) stays selectable.
  double vol_exponent = 0.0;
  /// Volume normalization target; 0 measures the volume of wulff(f == 1).
  double volume_target = 0.0;
  std::size_t mc_samples = 200000;
  std::size_t measure_samples = 400000;
  std::uint64_t seed = 7;
  int workers = 1;
  double eta0 = 0.25;          // initial multiplicative step, halves on stall
  double tol_phi = 1e-5;       // relative sweep improvement threshold
  int max_sweeps = 120;
  double validation_tol = 1e-9;
  bool skip_centroid = false;  // experimental escape hatch
  double phi_tie_rel = 1e-12;  // ties broken toward smaller max f
  int projection_cloud = 4096;
  int projection_climb = 40;
};

struct ValidatedMeasure {
  DiscreteSphereMeasure mu;
  double mass = 0.0;
  double margin_c = 0.0;     // empirical hemisphere constant
  double radius_bound = 0.0; // (mass + 1) / c
  std::vector<double> centroid_vec;
};

/// Gate for the prescribed measure: centroid within tol * mass of zero and
/// positive hemisphere margin. Throws CentroidViolation or
/// HemisphereConcentration naming the failed condition.
ValidatedMeasure validate_measure(const DiscreteSphereMeasure& mu,
                                  double tol = 1e-9,
                                  bool skip_centroid = false);

/// Common-random-numbers evaluator of Phi for one grid; comparisons of
/// nearby support vectors share the same sample cloud.
class PhiEvaluator {
 public:
  PhiEvaluator(const DiscreteSphereMeasure& mu, const SolverConfig& cfg);
  ~PhiEvaluator();
  PhiEvaluator(PhiEvaluator&&) noexcept;

  /// Refresh the sample cloud for bodies near the scale of f.
  void rebox(const std::vector<double>& f, std::uint64_t salt);
  double volume(const std::vector<double>& f) const;
  double phi(const std::vector<double>& f) const;
  double volume_rel_stderr() const;
  /// Largest support value the current box can accommodate.
  double box_support_cap() const;
  int scaling_exponent() const;  // Q

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot Phi (builds a fresh evaluator; CRN only within the call).
double phi(const SupportVector& f, const DiscreteSphereMeasure& mu,
           const SolverConfig& cfg);

/// Measured homogeneity degree of Phi under f -> 2f for a given exponent;
/// the degree-zero exponent is the dilation-consistent one.
double phi_homogeneity_degree(const DiscreteSphereMeasure& mu,
                              const SolverConfig& cfg, double exponent);

struct ResidualReport {
  std::vector<double> per_direction;  // relative atom errors
  double max_relative = 0.0;
  double mass_error = 0.0;            // relative
  double mass_stderr = 0.0;
};

struct SolveReport {
  SupportVector f_out;
  DiscreteSphereMeasure achieved;
  ResidualReport residuals;
  std::vector<double> phi_trace;      // per sweep, after renormalization
  double phi_noise_3sigma = 0.0;      // trace slack from MC volume noise
  bool radius_bound_ok = true;
  double radius_bound = 0.0;
  double margin_c = 0.0;
  double dilation_applied = 1.0;
  double mass_scaling_exponent = 0.0;
  double vol_exponent_used = 0.0;
  double volume_target = 0.0;
  int sweeps_run = 0;
  bool converged = false;
  SolverConfig config;
};

SolveReport solve(const DiscreteSphereMeasure& mu, const SolverConfig& cfg);

/// Same variational engine with flat geometry; d = 2 uses exact polygon
/// volume/measure/support, d = 3 the sampled flat estimators.
SolveReport euclidean_oracle_solve(const DiscreteSphereMeasure& mu, int d,
                                   SolverConfig cfg);

/// Compare the sampled surface measure of a body against a prescribed mu.
ResidualReport residual(const DiscreteSphereMeasure& mu, const WulffBody& body,
                        Rng& rng, std::size_t samples = 400000,
                        int workers = 1);

ResidualReport residual_against(const DiscreteSphereMeasure& mu,
                                const SurfaceMeasureResult& achieved);

}  // namespace hmk

#endif  // HMK_SOLVER_HPP
