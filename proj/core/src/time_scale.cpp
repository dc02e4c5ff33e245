#include "tscalc/time_scale.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace tsc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool approx_eq_tol(double x, double y, double tol) {
  return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)});
}
bool approx_lt(double x, double y, double tol) {
  return x < y && !approx_eq_tol(x, y, tol);
}
bool approx_le(double x, double y, double tol) {
  return x <= y || approx_eq_tol(x, y, tol);
}

std::int64_t llround_sat(double x) {
  constexpr double lim = 4.0e18;
  if (x >= lim) return static_cast<std::int64_t>(lim);
  if (x <= -lim) return static_cast<std::int64_t>(-lim);
  return std::llround(x);
}
std::int64_t floor_sat(double x) {
  constexpr double lim = 4.0e18;
  if (x >= lim) return static_cast<std::int64_t>(lim);
  if (x <= -lim) return static_cast<std::int64_t>(-lim);
  return static_cast<std::int64_t>(std::floor(x));
}
std::int64_t ceil_sat(double x) {
  constexpr double lim = 4.0e18;
  if (x >= lim) return static_cast<std::int64_t>(lim);
  if (x <= -lim) return static_cast<std::int64_t>(-lim);
  return static_cast<std::int64_t>(std::ceil(x));
}

// ---------------------------------------------------------------------------
// Uniform lattice index arithmetic
// ---------------------------------------------------------------------------

double uni_point(const UniformLattice& u, std::int64_t k) {
  return u.start + static_cast<double>(k) * u.step;
}
bool uni_in_range(const UniformLattice& u, std::int64_t k) {
  if (u.k_min && k < *u.k_min) return false;
  if (u.k_max && k > *u.k_max) return false;
  return true;
}
// Index of t when t lies on the lattice (within tol), else nullopt.
std::optional<std::int64_t> uni_index_of(const UniformLattice& u, double t, double tol) {
  std::int64_t k = llround_sat((t - u.start) / u.step);
  if (!uni_in_range(u, k)) return std::nullopt;
  if (!approx_eq_tol(uni_point(u, k), t, tol)) return std::nullopt;
  return k;
}

// ---------------------------------------------------------------------------
// Geometric lattice index arithmetic (points q^k, decreasing in k)
// ---------------------------------------------------------------------------

double geo_point(const GeometricLattice& g, std::int64_t k) {
  return std::pow(g.q, static_cast<double>(k));
}
bool geo_in_range(const GeometricLattice& g, std::int64_t k) {
  if (g.k_min && k < *g.k_min) return false;
  if (g.k_max && k > *g.k_max) return false;
  return true;
}
std::optional<std::int64_t> geo_index_of(const GeometricLattice& g, double t, double tol) {
  if (t <= 0.0) return std::nullopt;
  std::int64_t k = llround_sat(std::log(t) / std::log(g.q));
  if (!geo_in_range(g, k)) return std::nullopt;
  if (!approx_eq_tol(geo_point(g, k), t, tol)) return std::nullopt;
  return k;
}

// ---------------------------------------------------------------------------
// Per-segment queries. A Hit is the nearest segment member strictly above
// (successor) or below (predecessor) the query point, with its gap; the gap
// is the stored step when the move stays inside a uniform lattice so that
// scattered difference quotients match the h-symmetric operator exactly.
// ---------------------------------------------------------------------------

struct Hit {
  double value;
  double gap;
};

bool seg_contains(const Segment& seg, double x, double tol) {
  return std::visit(
      [&](const auto& s) -> bool {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Interval>) {
          return approx_le(s.a, x, tol) && approx_le(x, s.b, tol);
        } else if constexpr (std::is_same_v<S, UniformLattice>) {
          return uni_index_of(s, x, tol).has_value();
        } else if constexpr (std::is_same_v<S, GeometricLattice>) {
          if (s.include_zero && approx_eq_tol(x, 0.0, tol)) return true;
          return geo_index_of(s, x, tol).has_value();
        } else {
          auto it = std::lower_bound(s.values.begin(), s.values.end(), x);
          if (it != s.values.end() && approx_eq_tol(*it, x, tol)) return true;
          if (it != s.values.begin() && approx_eq_tol(*(it - 1), x, tol)) return true;
          return false;
        }
      },
      seg);
}

std::optional<Hit> seg_successor(const Segment& seg, double t, double tol) {
  return std::visit(
      [&](const auto& s) -> std::optional<Hit> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Interval>) {
          if (approx_lt(t, s.a, tol)) return Hit{s.a, s.a - t};
          if (approx_lt(t, s.b, tol)) return Hit{t, 0.0};
          return std::nullopt;
        } else if constexpr (std::is_same_v<S, UniformLattice>) {
          if (auto k = uni_index_of(s, t, tol)) {
            std::int64_t j = *k + 1;
            if (s.k_max && j > *s.k_max) return std::nullopt;
            return Hit{t + s.step, s.step};
          }
          double hi = t + tol * std::max(1.0, std::abs(t));
          std::int64_t j = floor_sat((hi - s.start) / s.step) + 1;
          for (int guard = 0; guard < 4 && uni_point(s, j) <= hi; ++guard) ++j;
          if (s.k_min && j < *s.k_min) j = *s.k_min;
          if (s.k_max && j > *s.k_max) return std::nullopt;
          double v = uni_point(s, j);
          return Hit{v, v - t};
        } else if constexpr (std::is_same_v<S, GeometricLattice>) {
          double fuzz = tol * std::max(1.0, std::abs(t));
          if (t < -fuzz) {
            if (s.include_zero) return Hit{0.0, -t};
            double v = geo_point(s, *s.k_max);  // k_max finite when no zero
            return Hit{v, v - t};
          }
          if (std::abs(t) <= fuzz) {
            if (!s.k_max) return Hit{0.0, 0.0};  // accumulation: right-dense
            double v = geo_point(s, *s.k_max);
            return Hit{v, v - t};
          }
          if (auto k = geo_index_of(s, t, tol)) {
            std::int64_t j = *k - 1;
            if (s.k_min && j < *s.k_min) return std::nullopt;
            double v = geo_point(s, j);
            return Hit{v, v - t};
          }
          double hi = t + fuzz;
          // largest k with q^k > hi
          std::int64_t j = ceil_sat(std::log(hi) / std::log(s.q)) - 1;
          for (int guard = 0; guard < 4 && geo_point(s, j + 1) > hi; ++guard) ++j;
          for (int guard = 0; guard < 4 && geo_point(s, j) <= hi; ++guard) --j;
          if (s.k_max && j > *s.k_max) j = *s.k_max;
          if (s.k_min && j < *s.k_min) return std::nullopt;
          double v = geo_point(s, j);
          if (v <= hi) return std::nullopt;
          return Hit{v, v - t};
        } else {
          auto it = std::upper_bound(s.values.begin(), s.values.end(), t);
          while (it != s.values.end() && approx_eq_tol(*it, t, tol)) ++it;
          if (it == s.values.end()) return std::nullopt;
          return Hit{*it, *it - t};
        }
      },
      seg);
}

std::optional<Hit> seg_predecessor(const Segment& seg, double t, double tol) {
  return std::visit(
      [&](const auto& s) -> std::optional<Hit> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Interval>) {
          if (approx_lt(s.b, t, tol)) return Hit{s.b, t - s.b};
          if (approx_lt(s.a, t, tol)) return Hit{t, 0.0};
          return std::nullopt;
        } else if constexpr (std::is_same_v<S, UniformLattice>) {
          if (auto k = uni_index_of(s, t, tol)) {
            std::int64_t j = *k - 1;
            if (s.k_min && j < *s.k_min) return std::nullopt;
            return Hit{t - s.step, s.step};
          }
          double lo = t - tol * std::max(1.0, std::abs(t));
          std::int64_t j = ceil_sat((lo - s.start) / s.step) - 1;
          for (int guard = 0; guard < 4 && uni_point(s, j) >= lo; ++guard) --j;
          if (s.k_max && j > *s.k_max) j = *s.k_max;
          if (s.k_min && j < *s.k_min) return std::nullopt;
          double v = uni_point(s, j);
          return Hit{v, t - v};
        } else if constexpr (std::is_same_v<S, GeometricLattice>) {
          double fuzz = tol * std::max(1.0, std::abs(t));
          if (t <= fuzz) return std::nullopt;  // zero is the segment minimum
          std::int64_t j;
          if (auto k = geo_index_of(s, t, tol)) {
            j = *k + 1;
          } else {
            double lo = t - fuzz;
            // smallest k with q^k < lo
            j = floor_sat(std::log(lo) / std::log(s.q)) + 1;
            for (int guard = 0; guard < 4 && geo_point(s, j - 1) < lo; ++guard) --j;
            for (int guard = 0; guard < 4 && geo_point(s, j) >= lo; ++guard) ++j;
          }
          if (s.k_min && j < *s.k_min) j = *s.k_min;
          if (s.k_max && j > *s.k_max) {
            if (s.include_zero) return Hit{0.0, t};
            return std::nullopt;
          }
          double v = geo_point(s, j);
          if (v >= t - fuzz) return std::nullopt;
          return Hit{v, t - v};
        } else {
          auto it = std::lower_bound(s.values.begin(), s.values.end(), t);
          while (it != s.values.begin() && approx_eq_tol(*(it - 1), t, tol)) --it;
          if (it == s.values.begin()) return std::nullopt;
          double v = *(it - 1);
          return Hit{v, t - v};
        }
      },
      seg);
}

double seg_inf(const Segment& seg) {
  return std::visit(
      [](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Interval>) {
          return s.a;
        } else if constexpr (std::is_same_v<S, UniformLattice>) {
          return s.k_min ? uni_point(s, *s.k_min) : -kInf;
        } else if constexpr (std::is_same_v<S, GeometricLattice>) {
          return s.include_zero ? 0.0 : geo_point(s, *s.k_max);
        } else {
          return s.values.front();
        }
      },
      seg);
}

double seg_sup(const Segment& seg) {
  return std::visit(
      [](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Interval>) {
          return s.b;
        } else if constexpr (std::is_same_v<S, UniformLattice>) {
          return s.k_max ? uni_point(s, *s.k_max) : kInf;
        } else if constexpr (std::is_same_v<S, GeometricLattice>) {
          return s.k_min ? geo_point(s, *s.k_min) : kInf;
        } else {
          return s.values.back();
        }
      },
      seg);
}

// Canonical member nearest to x when the segment contains x.
std::optional<double> seg_snap(const Segment& seg, double x, double tol) {
  if (!seg_contains(seg, x, tol)) return std::nullopt;
  return std::visit(
      [&](const auto& s) -> std::optional<double> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Interval>) {
          return std::clamp(x, s.a, s.b);
        } else if constexpr (std::is_same_v<S, UniformLattice>) {
          auto k = uni_index_of(s, x, tol);
          return uni_point(s, *k);
        } else if constexpr (std::is_same_v<S, GeometricLattice>) {
          if (auto k = geo_index_of(s, x, tol)) return geo_point(s, *k);
          return 0.0;
        } else {
          auto it = std::lower_bound(s.values.begin(), s.values.end(), x);
          if (it != s.values.end() && approx_eq_tol(*it, x, tol)) return *it;
          return *(it - 1);
        }
      },
      seg);
}

// ---------------------------------------------------------------------------
// Normalization helpers
// ---------------------------------------------------------------------------

void validate_segment(const Segment& seg) {
  std::visit(
      [](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Interval>) {
          if (!std::isfinite(s.a) || !std::isfinite(s.b) || s.a > s.b)
            raise(errc::invalid_segment, "interval requires finite a <= b");
        } else if constexpr (std::is_same_v<S, UniformLattice>) {
          if (!std::isfinite(s.start) || !std::isfinite(s.step) || s.step <= 0.0)
            raise(errc::invalid_segment, "uniform lattice requires finite start and step > 0");
          if (s.k_min && s.k_max && *s.k_min > *s.k_max)
            raise(errc::invalid_segment, "uniform lattice has empty index range");
        } else if constexpr (std::is_same_v<S, GeometricLattice>) {
          if (!std::isfinite(s.q) || s.q <= 0.0 || s.q >= 1.0)
            raise(errc::invalid_segment, "geometric lattice requires 0 < q < 1");
          if (s.k_min && s.k_max && *s.k_min > *s.k_max)
            raise(errc::invalid_segment, "geometric lattice has empty index range");
          if (!s.k_max && !s.include_zero)
            raise(errc::invalid_segment,
                  "geometric lattice accumulating at 0 must include 0 to be closed");
        } else {
          if (s.values.empty())
            raise(errc::invalid_segment, "finite point set is empty");
          for (std::size_t i = 0; i < s.values.size(); ++i) {
            if (!std::isfinite(s.values[i]))
              raise(errc::invalid_segment, "finite point set contains a non-finite value");
            if (i > 0 && s.values[i] <= s.values[i - 1])
              raise(errc::invalid_segment, "finite point set must be strictly increasing");
          }
        }
      },
      seg);
}

// Index range with optional (unbounded) endpoints.
struct KRange {
  std::optional<std::int64_t> lo, hi;
};

bool krange_empty(const KRange& r) {
  return r.lo && r.hi && *r.lo > *r.hi;
}

// Subtract the closed index interval [ka, kb] (kb nullopt = +inf).
std::vector<KRange> krange_subtract(const KRange& r, std::int64_t ka,
                                    std::optional<std::int64_t> kb) {
  bool below = kb && r.lo && *kb < *r.lo;
  bool above = r.hi && ka > *r.hi;
  if (below || above) return {r};
  std::vector<KRange> out;
  KRange left{r.lo, ka - 1};
  if (!r.lo || *r.lo <= ka - 1) out.push_back(left);
  if (kb) {
    KRange right{*kb + 1, r.hi};
    if (!r.hi || *kb + 1 <= *r.hi) out.push_back(right);
  }
  return out;
}

}  // namespace

std::string_view to_string(PointClass c) noexcept {
  switch (c) {
    case PointClass::Dense:                   return "dense";
    case PointClass::Isolated:                return "isolated";
    case PointClass::LeftDenseRightScattered: return "left_dense_right_scattered";
    case PointClass::RightDenseLeftScattered: return "right_dense_left_scattered";
  }
  return "unknown";
}

bool TimeScale::approx_eq(double x, double y) const {
  return approx_eq_tol(x, y, tol_);
}

bool TimeScale::contains(double x) const {
  if (!std::isfinite(x)) return false;
  for (const auto& seg : segments_)
    if (seg_contains(seg, x, tol_)) return true;
  return false;
}

Jump TimeScale::forward_jump(double t) const {
  if (!contains(t)) raise(errc::point_not_in_scale, "sigma: point not in scale");
  std::optional<Hit> best;
  for (const auto& seg : segments_) {
    auto h = seg_successor(seg, t, tol_);
    if (h && (!best || h->value < best->value)) best = h;
  }
  if (!best) return Jump{t, 0.0};  // t is the maximum
  return Jump{best->value, best->gap};
}

Jump TimeScale::backward_jump(double t) const {
  if (!contains(t)) raise(errc::point_not_in_scale, "rho: point not in scale");
  std::optional<Hit> best;
  for (const auto& seg : segments_) {
    auto h = seg_predecessor(seg, t, tol_);
    if (h && (!best || h->value > best->value)) best = h;
  }
  if (!best) return Jump{t, 0.0};  // t is the minimum
  return Jump{best->value, best->gap};
}

PointClass TimeScale::classify(double t) const {
  bool right_dense = approx_eq(forward_jump(t).point, t);
  bool left_dense = approx_eq(backward_jump(t).point, t);
  if (right_dense && left_dense) return PointClass::Dense;
  if (!right_dense && !left_dense) return PointClass::Isolated;
  if (left_dense) return PointClass::LeftDenseRightScattered;
  return PointClass::RightDenseLeftScattered;
}

bool TimeScale::in_kappa_kappa(double t) const {
  if (!contains(t)) raise(errc::point_not_in_scale, "in_kappa_kappa: point not in scale");
  if (std::isfinite(max_) && approx_eq(t, max_)) {
    if (!approx_eq(backward_jump(max_).point, max_)) return false;  // left-scattered max
  }
  if (std::isfinite(min_) && approx_eq(t, min_)) {
    if (!approx_eq(forward_jump(min_).point, min_)) return false;  // right-scattered min
  }
  return true;
}

bool TimeScale::reflect_in_scale(double t, double s) const {
  return contains(s) && contains(2.0 * t - s);
}

std::optional<double> TimeScale::floor_point(double x) const {
  std::optional<double> best;
  for (const auto& seg : segments_) {
    std::optional<double> cand = seg_snap(seg, x, tol_);
    if (!cand) {
      if (auto h = seg_predecessor(seg, x, tol_)) cand = h->value;
    }
    if (cand && (!best || *cand > *best)) best = cand;
  }
  return best;
}

std::optional<double> TimeScale::ceil_point(double x) const {
  std::optional<double> best;
  for (const auto& seg : segments_) {
    std::optional<double> cand = seg_snap(seg, x, tol_);
    if (!cand) {
      if (auto h = seg_successor(seg, x, tol_)) cand = h->value;
    }
    if (cand && (!best || *cand < *best)) best = cand;
  }
  return best;
}

TimeScale TimeScale::normalize(std::vector<Segment> segments, double tol) {
  if (segments.empty()) raise(errc::empty_scale, "time scale requires at least one segment");
  if (!(tol > 0.0) || !std::isfinite(tol))
    raise(errc::invalid_segment, "tolerance must be a positive finite number");
  for (const auto& seg : segments) validate_segment(seg);

  std::vector<Interval> ivs;
  std::vector<UniformLattice> unis;
  std::vector<GeometricLattice> geos;
  std::vector<double> pool;

  for (auto& seg : segments) {
    std::visit(
        [&](auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Interval>) {
            if (approx_eq_tol(s.a, s.b, tol)) pool.push_back(s.a);
            else ivs.push_back(s);
          } else if constexpr (std::is_same_v<S, UniformLattice>) {
            if (s.k_min && s.k_max && *s.k_min == *s.k_max) pool.push_back(uni_point(s, *s.k_min));
            else unis.push_back(s);
          } else if constexpr (std::is_same_v<S, GeometricLattice>) {
            if (s.k_min && s.k_max && *s.k_min == *s.k_max) {
              pool.push_back(geo_point(s, *s.k_min));
              if (s.include_zero) pool.push_back(0.0);
            } else {
              geos.push_back(s);
            }
          } else {
            pool.insert(pool.end(), s.values.begin(), s.values.end());
          }
        },
        seg);
  }

  // Merge overlapping or adjacent intervals (closures meeting within tol).
  std::sort(ivs.begin(), ivs.end(),
            [](const Interval& x, const Interval& y) { return x.a < y.a; });
  std::vector<Interval> merged;
  for (const auto& iv : ivs) {
    if (!merged.empty() && approx_le(iv.a, merged.back().b, tol)) {
      merged.back().b = std::max(merged.back().b, iv.b);
    } else {
      merged.push_back(iv);
    }
  }
  ivs = std::move(merged);

  // Remove uniform-lattice points covered by an interval, splitting ranges.
  std::vector<UniformLattice> uni_out;
  for (const auto& u : unis) {
    std::vector<KRange> ranges{{u.k_min, u.k_max}};
    for (const auto& iv : ivs) {
      double fa = tol * std::max(1.0, std::abs(iv.a));
      double fb = tol * std::max(1.0, std::abs(iv.b));
      std::int64_t ka = ceil_sat((iv.a - fa - u.start) / u.step);
      for (int g = 0; g < 4 && uni_point(u, ka) < iv.a - fa; ++g) ++ka;
      for (int g = 0; g < 4 && uni_point(u, ka - 1) >= iv.a - fa; ++g) --ka;
      std::int64_t kb = floor_sat((iv.b + fb - u.start) / u.step);
      for (int g = 0; g < 4 && uni_point(u, kb) > iv.b + fb; ++g) --kb;
      for (int g = 0; g < 4 && uni_point(u, kb + 1) <= iv.b + fb; ++g) ++kb;
      if (ka > kb) continue;
      std::vector<KRange> next;
      for (const auto& r : ranges)
        for (auto& piece : krange_subtract(r, ka, kb))
          if (!krange_empty(piece)) next.push_back(piece);
      ranges = std::move(next);
    }
    for (const auto& r : ranges) {
      if (r.lo && r.hi && *r.lo == *r.hi) {
        pool.push_back(uni_point(u, *r.lo));
      } else {
        uni_out.push_back(UniformLattice{u.start, u.step, r.lo, r.hi});
      }
    }
  }
  unis = std::move(uni_out);

  // Same for geometric lattices. Larger k means smaller point, so an
  // interval [a,b] covers k >= ceil(log_q b) and (for a > 0) k <= floor(log_q a).
  std::vector<GeometricLattice> geo_out;
  for (const auto& g0 : geos) {
    GeometricLattice g = g0;
    std::vector<KRange> ranges{{g.k_min, g.k_max}};
    for (const auto& iv : ivs) {
      double fa = tol * std::max(1.0, std::abs(iv.a));
      double fb = tol * std::max(1.0, std::abs(iv.b));
      double hi = iv.b + fb;
      if (hi <= 0.0) continue;  // interval entirely below the positive points
      std::int64_t ka = ceil_sat(std::log(hi) / std::log(g.q));
      for (int gg = 0; gg < 4 && geo_point(g, ka) > hi; ++gg) ++ka;
      for (int gg = 0; gg < 4 && geo_point(g, ka - 1) <= hi; ++gg) --ka;
      std::optional<std::int64_t> kb;
      double lo = iv.a - fa;
      if (lo > 0.0) {
        std::int64_t k = floor_sat(std::log(lo) / std::log(g.q));
        for (int gg = 0; gg < 4 && geo_point(g, k) < lo; ++gg) --k;
        for (int gg = 0; gg < 4 && geo_point(g, k + 1) >= lo; ++gg) ++k;
        kb = k;
      }
      if (kb && ka > *kb) continue;
      if (!kb && g.include_zero && g.k_max) g.include_zero = false;  // 0 covered by interval
      std::vector<KRange> next;
      for (const auto& r : ranges)
        for (auto& piece : krange_subtract(r, ka, kb))
          if (!krange_empty(piece)) next.push_back(piece);
      ranges = std::move(next);
    }
    // Zero stays attached to the piece reaching the smallest points.
    std::sort(ranges.begin(), ranges.end(), [](const KRange& x, const KRange& y) {
      if (!x.hi) return false;
      if (!y.hi) return true;
      return *x.hi < *y.hi;
    });
    bool zero_pending = g.include_zero;
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      const auto& r = ranges[i];
      bool last = i + 1 == ranges.size();
      bool zero_here = zero_pending && last;
      if (r.lo && r.hi && *r.lo == *r.hi) {
        pool.push_back(geo_point(g, *r.lo));
        if (zero_here) pool.push_back(0.0);
      } else {
        geo_out.push_back(GeometricLattice{g.q, r.lo, r.hi, zero_here});
      }
      if (zero_here) zero_pending = false;
    }
    if (zero_pending) pool.push_back(0.0);
  }
  geos = std::move(geo_out);

  // Merge uniform lattices sharing step and anchor; drop lattices whose
  // points all lie inside a coarser companion (e.g. Z inside 0.5*Z).
  auto uni_congruent = [&](const UniformLattice& a, const UniformLattice& b,
                           std::int64_t& offset) {
    if (!approx_eq_tol(a.step, b.step, tol)) return false;
    double d = (b.start - a.start) / a.step;
    std::int64_t m = llround_sat(d);
    if (!approx_eq_tol(uni_point(a, m), b.start, tol)) return false;
    offset = m;
    return true;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < unis.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < unis.size() && !changed; ++j) {
        std::int64_t m = 0;
        if (uni_congruent(unis[i], unis[j], m)) {
          // Translate j's range into i's index space.
          KRange a{unis[i].k_min, unis[i].k_max};
          KRange b{unis[j].k_min ? std::optional(*unis[j].k_min + m) : std::nullopt,
                   unis[j].k_max ? std::optional(*unis[j].k_max + m) : std::nullopt};
          bool a_below_b = a.hi && b.lo && *a.hi + 1 < *b.lo;
          bool b_below_a = b.hi && a.lo && *b.hi + 1 < *a.lo;
          if (!a_below_b && !b_below_a) {
            KRange u;
            if (a.lo && b.lo) u.lo = std::min(*a.lo, *b.lo);
            if (a.hi && b.hi) u.hi = std::max(*a.hi, *b.hi);
            unis[i] = UniformLattice{unis[i].start, unis[i].step, u.lo, u.hi};
            unis.erase(unis.begin() + static_cast<std::ptrdiff_t>(j));
            changed = true;
          }
        } else {
          // Absorption: every point of the finer-range lattice inside the other.
          auto subset = [&](const UniformLattice& sub, const UniformLattice& sup) {
            double ratio = sub.step / sup.step;
            std::int64_t m2 = llround_sat(ratio);
            if (m2 < 1 || !approx_eq_tol(static_cast<double>(m2) * sup.step, sub.step, tol))
              return false;
            double d = (sub.start - sup.start) / sup.step;
            std::int64_t off = llround_sat(d);
            if (!approx_eq_tol(uni_point(sup, off), sub.start, tol)) return false;
            double sub_inf = sub.k_min ? uni_point(sub, *sub.k_min) : -kInf;
            double sub_sup = sub.k_max ? uni_point(sub, *sub.k_max) : kInf;
            double sup_inf = sup.k_min ? uni_point(sup, *sup.k_min) : -kInf;
            double sup_sup = sup.k_max ? uni_point(sup, *sup.k_max) : kInf;
            return (sup_inf == -kInf || approx_le(sup_inf, sub_inf, tol)) &&
                   (sup_sup == kInf || approx_le(sub_sup, sup_sup, tol));
          };
          if (subset(unis[j], unis[i])) {
            unis.erase(unis.begin() + static_cast<std::ptrdiff_t>(j));
            changed = true;
          } else if (subset(unis[i], unis[j])) {
            unis.erase(unis.begin() + static_cast<std::ptrdiff_t>(i));
            changed = true;
          }
        }
      }
    }
  }

  // Merge geometric lattices with the same ratio (shared anchor q^0 = 1).
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < geos.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < geos.size() && !changed; ++j) {
        if (!approx_eq_tol(geos[i].q, geos[j].q, tol)) continue;
        KRange a{geos[i].k_min, geos[i].k_max};
        KRange b{geos[j].k_min, geos[j].k_max};
        bool a_below_b = a.hi && b.lo && *a.hi + 1 < *b.lo;
        bool b_below_a = b.hi && a.lo && *b.hi + 1 < *a.lo;
        if (!a_below_b && !b_below_a) {
          KRange u;
          if (a.lo && b.lo) u.lo = std::min(*a.lo, *b.lo);
          if (a.hi && b.hi) u.hi = std::max(*a.hi, *b.hi);
          geos[i] = GeometricLattice{geos[i].q, u.lo, u.hi,
                                     geos[i].include_zero || geos[j].include_zero};
          geos.erase(geos.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
        }
      }
    }
  }

  // Pool points: sort, drop those covered by intervals or lattices, dedupe.
  std::sort(pool.begin(), pool.end());
  std::vector<double> pts;
  for (double p : pool) {
    bool covered = false;
    for (const auto& iv : ivs)
      if (approx_le(iv.a, p, tol) && approx_le(p, iv.b, tol)) { covered = true; break; }
    if (!covered)
      for (const auto& u : unis)
        if (seg_contains(Segment{u}, p, tol)) { covered = true; break; }
    if (!covered)
      for (const auto& g : geos)
        if (seg_contains(Segment{g}, p, tol)) { covered = true; break; }
    if (!covered && !pts.empty() && approx_eq_tol(pts.back(), p, tol)) covered = true;
    if (!covered) pts.push_back(p);
  }

  TimeScale out;
  out.tol_ = tol;
  for (const auto& iv : ivs) out.segments_.push_back(iv);
  for (const auto& u : unis) out.segments_.push_back(u);
  for (const auto& g : geos) out.segments_.push_back(g);
  if (!pts.empty()) out.segments_.push_back(FinitePoints{std::move(pts)});
  assert(!out.segments_.empty());

  std::sort(out.segments_.begin(), out.segments_.end(),
            [](const Segment& x, const Segment& y) {
              double ix = seg_inf(x), iy = seg_inf(y);
              if (ix != iy) return ix < iy;
              double sx = seg_sup(x), sy = seg_sup(y);
              if (sx != sy) return sx < sy;
              return x.index() < y.index();
            });

  out.min_ = kInf;
  out.max_ = -kInf;
  for (const auto& seg : out.segments_) {
    out.min_ = std::min(out.min_, seg_inf(seg));
    out.max_ = std::max(out.max_, seg_sup(seg));
  }
  return out;
}

}  // namespace tsc
