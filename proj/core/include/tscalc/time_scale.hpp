#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "tscalc/error.hpp"

namespace tsc {

inline constexpr double kDefaultTol = 1e-9;

// Closed interval [a, b]; a == b denotes a singleton.
struct Interval {
  double a = 0.0;
  double b = 0.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Points start + k*step for integer k in [k_min, k_max]; a missing bound
// means the lattice is unbounded on that side.
struct UniformLattice {
  double start = 0.0;
  double step = 1.0;
  std::optional<std::int64_t> k_min;
  std::optional<std::int64_t> k_max;
  friend bool operator==(const UniformLattice&, const UniformLattice&) = default;
};

// Points q^k (0 < q < 1) for integer k in [k_min, k_max]; k grows toward 0.
// k_max unbounded accumulates at 0 and therefore requires include_zero so
// the segment stays closed.
struct GeometricLattice {
  double q = 0.5;
  std::optional<std::int64_t> k_min;
  std::optional<std::int64_t> k_max;
  bool include_zero = false;
  friend bool operator==(const GeometricLattice&, const GeometricLattice&) = default;
};

// Strictly increasing list of points.
struct FinitePoints {
  std::vector<double> values;
  friend bool operator==(const FinitePoints&, const FinitePoints&) = default;
};

using Segment = std::variant<Interval, UniformLattice, GeometricLattice, FinitePoints>;

enum class PointClass {
  Dense,
  Isolated,
  LeftDenseRightScattered,
  RightDenseLeftScattered,
};

std::string_view to_string(PointClass c) noexcept;

// A jump operator answer: the jump target and its distance from the query
// point. The gap is computed analytically where the segment structure allows
// (exactly `step` inside a uniform lattice), so scattered-point difference
// quotients reproduce the quantum-calculus operators bit for bit.
struct Jump {
  double point = 0.0;
  double gap = 0.0;
};

// Canonical union of disjoint segments. Immutable after normalize();
// every query is const and safe for unrestricted concurrent use.
class TimeScale {
 public:
  // Canonicalizes a segment list: validates invariants, merges
  // overlapping/adjacent intervals, removes lattice/finite points covered by
  // intervals (splitting lattices where needed), merges compatible lattices,
  // pools finite points, and sorts by infimum.
  static TimeScale normalize(std::vector<Segment> segments, double tol = kDefaultTol);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  double min() const noexcept { return min_; }  // -inf when unbounded below
  double max() const noexcept { return max_; }  // +inf when unbounded above
  double tol() const noexcept { return tol_; }

  bool contains(double x) const;

  // Forward jump sigma(t) = inf{s in T : s > t}, with sigma(max) = max.
  double sigma(double t) const { return forward_jump(t).point; }
  // Backward jump rho(t) = sup{s in T : s < t}, with rho(min) = min.
  double rho(double t) const { return backward_jump(t).point; }

  Jump forward_jump(double t) const;   // throws point_not_in_scale
  Jump backward_jump(double t) const;  // throws point_not_in_scale

  PointClass classify(double t) const;

  // True iff t survives in T_kappa^kappa: a finite left-scattered maximum and
  // a finite right-scattered minimum are excluded.
  bool in_kappa_kappa(double t) const;

  // True iff both s and the reflection 2t - s lie in the scale.
  bool reflect_in_scale(double t, double s) const;

  // Largest scale point <= x / smallest scale point >= x (within tol),
  // or nullopt when no such point exists. Used by numeric samplers.
  std::optional<double> floor_point(double x) const;
  std::optional<double> ceil_point(double x) const;

  bool approx_eq(double x, double y) const;

  friend bool operator==(const TimeScale&, const TimeScale&) = default;

 private:
  TimeScale() = default;

  std::vector<Segment> segments_;
  double min_ = 0.0;
  double max_ = 0.0;
  double tol_ = kDefaultTol;
};

}  // namespace tsc
