#ifndef HMK_CORE_HPP
#define HMK_CORE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

// Exact algebra and metric primitives of the Heisenberg group H^n:
// group law, dilations, Koranyi gauge, left-invariant frame, horizontality,
// twisted combinations, convexity probes and horizontal divergence.

namespace hmk {

/// Deterministic RNG used throughout. All stochastic routines take one
/// explicitly so parallel use is caller-partitioned.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(splitmix(seed)) {}

  std::uint64_t next_u64() {
    // xorshift* over a splitmix-initialized state; portable and fast.
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform in [0, 1). Bit-identical on every platform.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  /// Derive an independent stream, e.g. one per worker or per subtask.
  Rng spawn(std::uint64_t stream) const {
    return Rng(state_ ^ splitmix(0x9E3779B97F4A7C15ULL * (stream + 1)));
  }

  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

private:
  std::uint64_t state_;
};

/// Kahan-compensated accumulator; keeps sums order-stable to rounding.
class KahanSum {
public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// small dense-vector helpers (dimensions here are 2n or 2n+1, tiny)
double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm(const std::vector<double>& a);
std::vector<double> scaled(const std::vector<double>& a, double s);

/// Element g = (z, t) of H^n. z stores (x_1..x_n, y_1..y_n).
struct GroupPoint {
  std::vector<double> z;
  double t = 0.0;

  GroupPoint() = default;
  GroupPoint(std::vector<double> z_, double t_) : z(std::move(z_)), t(t_) {}

  int n() const { return static_cast<int>(z.size() / 2); }
  double x(int l) const { return z[l]; }
  double y(int l) const { return z[n() + l]; }
  double znorm2() const;
};

GroupPoint identity(int n);
GroupPoint multiply(const GroupPoint& g1, const GroupPoint& g2);
GroupPoint inverse(const GroupPoint& g);

/// Anisotropic dilation (z, t) -> (lambda z, lambda^2 t); lambda > 0.
GroupPoint dilate(double lambda, const GroupPoint& g);

/// Homogeneous norm: ||g||^4 = (|z|^2)^2 + 16 t^2.
double koranyi_gauge(const GroupPoint& g);
double koranyi_distance(const GroupPoint& g, const GroupPoint& h);

/// Vector in the horizontal plane, expressed in the {X_l, Y_l} frame.
/// Base point is optional; base-free vectors pair with anything base-free.
struct HorizontalVector {
  std::vector<double> v;                 // (v_x1..v_xn, v_y1..v_yn)
  std::optional<GroupPoint> base;

  HorizontalVector() = default;
  explicit HorizontalVector(std::vector<double> v_) : v(std::move(v_)) {}
  HorizontalVector(std::vector<double> v_, GroupPoint base_)
      : v(std::move(v_)), base(std::move(base_)) {}
};

double inner_h(const HorizontalVector& a, const HorizontalVector& b);

/// Left-invariant frame evaluated at a point, as coordinate coefficient
/// tuples of length 2n+1: X_l = dx_l - (y_l/2) dt, Y_l = dy_l + (x_l/2) dt.
struct FrameAt {
  GroupPoint base;
  std::vector<std::vector<double>> X;    // n tuples
  std::vector<std::vector<double>> Y;    // n tuples
  std::vector<double> T;                 // one tuple
};

FrameAt frame_at(const GroupPoint& g);

/// Signed defect of the horizontal-plane condition
///   t - t0 + (1/2) sum_l (x0_l y_l - x_l y0_l) = 0,
/// re-derived from the group law so that H_{g0} = g0 * H_e exactly.
double horizontality_defect(const GroupPoint& g0, const GroupPoint& g);
bool is_horizontal(const GroupPoint& g0, const GroupPoint& g, double tol);

/// g * delta_lambda(g^{-1} * gp), computed compositionally.
GroupPoint twisted_combination(const GroupPoint& g, const GroupPoint& gp,
                               double lambda);

/// Net displacement of the X_l/Y_l flow commutator loop divided by step^2.
/// The loop runs -Y, -X, +Y, +X (each for `step`), whose limit is -T here.
std::array<double, 3> frame_flow_commutator(const GroupPoint& g, int l,
                                            double step);

/// div_H phi = sum_l (X_l phi_l + Y_l phi_{n+l}) by central differences
/// along the frame directions; error O(step^2).
double horizontal_divergence(
    const std::function<std::vector<double>(const GroupPoint&)>& phi,
    const GroupPoint& g, double step);

/// Verdict of a sampled convexity probe. Probabilistic by nature: a `true`
/// verdict means no violation was found in the given number of trials.
struct HConvexityReport {
  bool convex = true;
  std::optional<std::pair<GroupPoint, GroupPoint>> counterexample;
  double lambda = 0.0;
  std::size_t pairs_tested = 0;
};

using MembershipFn = std::function<bool(const GroupPoint&)>;
using PointSampler = std::function<GroupPoint(Rng&)>;

/// Samples g in the set, g~ in the set on the horizontal plane through g,
/// and checks twisted combinations stay inside on a lambda grid.
HConvexityReport is_h_convex_set(const MembershipFn& member,
                                 const PointSampler& sample, std::size_t trials,
                                 Rng& rng, int lambda_steps = 9,
                                 double horizontal_reach = 1.0);

/// Convexity of a scalar field under twisted combinations. The function
/// definition quantifies over all pairs; set horizontal_pairs_only to probe
/// the restricted variant.
HConvexityReport is_h_convex_function(
    const std::function<double(const GroupPoint&)>& u,
    const PointSampler& sample, std::size_t trials, Rng& rng,
    int lambda_steps = 9, double tol = 1e-9,
    bool horizontal_pairs_only = false);

/// Uniform sampler over an axis box [-zr, zr]^{2n} x [-tr, tr].
PointSampler box_sampler(int n, double z_range, double t_range);

}  // namespace hmk

#endif  // HMK_CORE_HPP
