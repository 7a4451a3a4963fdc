#include "geomseg/sset_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace geomseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative widening applied to closed-form Gaussian roots so the boxes stay
// supersets of the exact sets under rounding.
double widening(double centre, double half_width) {
  return 1e-10 * (1.0 + std::abs(centre) + half_width);
}

// out[k] = sum_{j != k} v[j], without subtracting (so infinities stay exact).
void exclusive_sums(std::span<const double> v, std::vector<double>& out) {
  const std::size_t p = v.size();
  out.assign(p, 0.0);
  double running = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    out[k] = running;
    running += v[k];
  }
  running = 0.0;
  for (std::size_t k = p; k-- > 0;) {
    out[k] += running;
    running += v[k];
  }
}

void require_gaussian(const CostModel& model, const char* op) {
  if (model.kind() != ModelKind::Gaussian) {
    throw UnsupportedOperator(std::string(op) + " is only defined for the Gaussian model (got " +
                              model.name() + ")");
  }
}

// Centre into `centre`, returns radius_sq with the emptiness convention of SSet.
double gaussian_ball(const SSet& s, std::vector<double>& centre) {
  const SegmentStats st = s.stats();
  const std::size_t p = st.dims();
  const double m = static_cast<double>(st.count());
  centre.resize(p);
  double rss = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    const double sum = st.sum(k);
    centre[k] = sum / m;
    rss += std::max(st.aux(k) - sum * sum / m, 0.0);
  }
  const double r2 = (s.delta() - rss) / m;
  if (s.is_empty()) return std::min(r2, std::nextafter(0.0, -1.0));
  return std::max(r2, 0.0);
}

struct RootPair {
  Interval outer;
  Interval inner;
};

RootPair bisection_roots(const SSet& s, std::size_t k, double K) {
  const CostModel& model = s.model();
  const SegmentStats st = s.stats();
  auto f = [&](double x) { return dim_cost(model, st, k, x); };

  const double c = dim_argmin(model, st, k);
  if (!(f(c) <= K)) return {Interval::none(), Interval::none()};

  const double tol = 1e-10 * (1.0 + std::abs(K));

  // a: f(a) <= K, b: f(b) > K. Returns {inner, outer} endpoint.
  auto bisect = [&](double a, double b) {
    double fa = f(a);
    double fb = f(b);
    for (int it = 0; it < 400; ++it) {
      if (fb - K <= tol && K - fa <= tol) break;
      const double mid = a + 0.5 * (b - a);
      if (mid == a || mid == b) break;
      const double fm = f(mid);
      if (fm <= K) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
        fb = fm;
      }
    }
    return std::pair<double, double>{a, b};
  };

  auto side = [&](double bound) -> std::pair<double, double> {
    if (c == bound) return {bound, bound};
    if (std::isfinite(bound)) {
      if (f(bound) <= K) return {bound, bound};
      return bisect(c, bound);
    }
    const double dir = bound > c ? 1.0 : -1.0;
    double inside = c;
    double step = std::max(std::abs(c), 1.0);
    double x = c + dir * step;
    for (int it = 0; it < 2100 && f(x) <= K; ++it) {
      inside = x;
      step *= 2.0;
      x = c + dir * step;
    }
    return bisect(inside, x);
  };

  const auto [lo_in, lo_out] = side(model.domain_lo());
  const auto [hi_in, hi_out] = side(model.domain_hi());
  return {Interval{lo_out, hi_out}, Interval{lo_in, hi_in}};
}

// Exclusion rule for one dimension: cut [lo, hi] by the removable
// interval [a, b] only when [a, b] is not contained in [lo, hi].
void exclusion_cut(Hyperrect& r, std::size_t k, double a, double b) {
  const double lo = r.lo(k);
  const double hi = r.hi(k);
  if (!(a <= b)) return;
  if (a >= lo && b <= hi) return;
  if (b < lo || a > hi) return;
  if (a < lo && b > hi) {
    r.set_empty();
    return;
  }
  if (a < lo) {
    r.set_bounds(k, b, hi);
  } else {
    r.set_bounds(k, lo, a);
  }
}

}  // namespace

SSet::SSet(const SSetContext& ctx, std::size_t i, std::size_t j)
    : ctx_(&ctx), i_(i), j_(j), delta_(0.0), empty_(false) {
  if (i_ == j_) return;
  const double base = ctx.qhat[i_ - 1];
  const double top = ctx.qhat[j_ - 1];
  delta_ = top - base;
  empty_ = base + segment_cost(ctx.model(), stats()) >= top;
}

SSet make_sset(std::size_t i, std::size_t j, const SSetContext& ctx) {
  if (ctx.data == nullptr) throw std::invalid_argument("make_sset: context has no data");
  if (i < 1 || i > j) throw std::out_of_range("make_sset: need 1 <= i <= j");
  if (j > ctx.horizon || j > ctx.data->n() + 1 || j > ctx.qhat.size()) {
    throw std::out_of_range("make_sset: j=" + std::to_string(j) + " exceeds the current time");
  }
  return SSet(ctx, i, j);
}

double s_eval(const SSet& s, std::span<const double> theta) {
  if (s.is_full()) return -kInf;
  const CostModel& model = s.model();
  const SegmentStats st = s.stats();
  double total = 0.0;
  for (std::size_t k = 0; k < st.dims(); ++k) {
    if (!model.in_open_domain(theta[k])) {
      throw DomainError("s_eval: theta outside the parameter domain", std::nullopt, k);
    }
    total += dim_cost(model, st, k, theta[k]);
  }
  return total - s.delta();
}

bool sset_contains(const SSet& s, std::span<const double> theta) {
  if (s.is_full()) return true;
  if (s.is_empty()) return false;
  return s_eval(s, theta) <= 0.0;
}

BallRep ball(const SSet& s) {
  require_gaussian(s.model(), "ball representation");
  BallRep out;
  if (s.is_full()) {
    out.center.assign(s.dims(), 0.0);
    out.radius_sq = kInf;
    return out;
  }
  out.radius_sq = gaussian_ball(s, out.center);
  return out;
}

namespace {

double centre_distance(std::span<const double> a, std::span<const double> b) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    d2 += d * d;
  }
  return std::sqrt(d2);
}

bool disjoint_balls(std::span<const double> ca, double ra2, std::span<const double> cb,
                    double rb2) {
  if (ra2 < 0.0 || rb2 < 0.0) return true;
  return centre_distance(ca, cb) > std::sqrt(ra2) + std::sqrt(rb2);
}

bool inside_ball(std::span<const double> ci, double ri2, std::span<const double> co, double ro2) {
  if (ri2 < 0.0) return true;
  if (ro2 < 0.0) return false;
  const double ri = std::sqrt(ri2);
  const double ro = std::sqrt(ro2);
  if (ro < ri) return false;
  return centre_distance(ci, co) <= ro - ri;
}

}  // namespace

bool ball_disjoint(const BallRep& a, const BallRep& b) {
  return disjoint_balls(a.center, a.radius_sq, b.center, b.radius_sq);
}

bool ball_included(const BallRep& a, const BallRep& b) {
  if (a.empty() || b.empty()) return true;
  return centre_distance(a.center, b.center) <=
         std::abs(std::sqrt(a.radius_sq) - std::sqrt(b.radius_sq));
}

bool ball_inside(const BallRep& inner, const BallRep& outer) {
  return inside_ball(inner.center, inner.radius_sq, outer.center, outer.radius_sq);
}

Hyperrect Hyperrect::full(const CostModel& model, std::size_t p) {
  Hyperrect r;
  r.lo_.assign(p, model.domain_lo());
  r.hi_.assign(p, model.domain_hi());
  return r;
}

Hyperrect Hyperrect::empty_box(std::size_t p) {
  Hyperrect r;
  r.lo_.assign(p, 1.0);
  r.hi_.assign(p, 0.0);
  r.empty_ = true;
  return r;
}

Hyperrect::Hyperrect(const CostModel& model, std::vector<double> lo, std::vector<double> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw std::invalid_argument("Hyperrect: bound sizes differ");
  for (std::size_t k = 0; k < lo_.size(); ++k) {
    lo_[k] = std::max(lo_[k], model.domain_lo());
    hi_[k] = std::min(hi_[k], model.domain_hi());
    if (!(lo_[k] <= hi_[k])) empty_ = true;
  }
}

bool Hyperrect::contains(std::span<const double> theta, double slack) const {
  if (empty_) return false;
  for (std::size_t k = 0; k < lo_.size(); ++k) {
    if (theta[k] < lo_[k] - slack || theta[k] > hi_[k] + slack) return false;
  }
  return true;
}

bool Hyperrect::inside(const Hyperrect& other) const {
  if (empty_) return true;
  if (other.empty_) return false;
  for (std::size_t k = 0; k < lo_.size(); ++k) {
    if (lo_[k] < other.lo_[k] || hi_[k] > other.hi_[k]) return false;
  }
  return true;
}

CharPoints char_points(const SSet& s, const Hyperrect& r) {
  if (s.is_full()) throw std::invalid_argument("char_points: full-space set has no minimal point");
  if (r.is_empty()) throw std::invalid_argument("char_points: empty box");
  const CostModel& model = s.model();
  const SegmentStats st = s.stats();
  const std::size_t p = st.dims();
  CharPoints cp;
  cp.c.resize(p);
  cp.m.resize(p);
  cp.M.resize(p);
  for (std::size_t k = 0; k < p; ++k) {
    const double c = dim_argmin(model, st, k);
    cp.c[k] = c;
    cp.m[k] = std::clamp(c, r.lo(k), r.hi(k));
    const double vlo = std::isfinite(r.lo(k)) ? dim_cost(model, st, k, r.lo(k)) : kInf;
    const double vhi = std::isfinite(r.hi(k)) ? dim_cost(model, st, k, r.hi(k)) : kInf;
    cp.M[k] = vhi > vlo ? r.hi(k) : r.lo(k);
  }
  return cp;
}

Interval dim_roots(const SSet& s, std::size_t k, double K) {
  if (s.is_full()) throw std::invalid_argument("dim_roots: full-space set");
  const CostModel& model = s.model();
  if (model.kind() == ModelKind::Gaussian) {
    const SegmentStats st = s.stats();
    const double m = static_cast<double>(st.count());
    const double c = dim_argmin(model, st, k);
    const double rem = (K - dim_min(model, st, k)) / m;
    if (!(rem >= 0.0)) return Interval::none();
    const double h = std::sqrt(rem);
    return {c - h, c + h};
  }
  return bisection_roots(s, k, K).outer;
}

void rect_inter_in_place(Hyperrect& r, const SSet& s, GeometryScratch& ws) {
  if (r.is_empty() || s.is_full()) return;
  if (s.is_empty()) {
    r.set_empty();
    return;
  }
  const std::size_t p = s.dims();
  const CostModel& model = s.model();
  ws.value.resize(p);

  if (model.kind() == ModelKind::Gaussian) {
    const double r2 = gaussian_ball(s, ws.center);
    for (std::size_t k = 0; k < p; ++k) {
      const double d = std::clamp(ws.center[k], r.lo(k), r.hi(k)) - ws.center[k];
      ws.value[k] = d * d;
    }
    exclusive_sums(ws.value, ws.others);
    for (std::size_t k = 0; k < p; ++k) {
      const double rem = r2 - ws.others[k];
      if (!(rem >= 0.0)) {
        r.set_empty();
        return;
      }
      const double c = ws.center[k];
      const double h = std::sqrt(rem);
      const double w = widening(c, h);
      const double lo = std::max(r.lo(k), c - h - w);
      const double hi = std::min(r.hi(k), c + h + w);
      if (!(lo <= hi)) {
        r.set_empty();
        return;
      }
      r.set_bounds(k, lo, hi);
    }
    return;
  }

  const SegmentStats st = s.stats();
  for (std::size_t k = 0; k < p; ++k) {
    const double m = std::clamp(dim_argmin(model, st, k), r.lo(k), r.hi(k));
    ws.value[k] = dim_cost(model, st, k, m);
  }
  exclusive_sums(ws.value, ws.others);
  for (std::size_t k = 0; k < p; ++k) {
    const Interval roots = bisection_roots(s, k, s.delta() - ws.others[k]).outer;
    if (roots.empty()) {
      r.set_empty();
      return;
    }
    const double lo = std::max(r.lo(k), roots.lo);
    const double hi = std::min(r.hi(k), roots.hi);
    if (!(lo <= hi)) {
      r.set_empty();
      return;
    }
    r.set_bounds(k, lo, hi);
  }
}

void rect_excl_in_place(Hyperrect& r, const SSet& s, GeometryScratch& ws) {
  if (r.is_empty()) return;
  if (s.is_full()) {
    r.set_empty();
    return;
  }
  if (s.is_empty()) return;
  const std::size_t p = s.dims();
  const CostModel& model = s.model();
  ws.value.resize(p);

  if (model.kind() == ModelKind::Gaussian) {
    const double r2 = gaussian_ball(s, ws.center);
    for (std::size_t k = 0; k < p; ++k) {
      const double c = ws.center[k];
      const double dlo = std::abs(r.lo(k) - c);
      const double dhi = std::abs(r.hi(k) - c);
      const double d = std::max(dlo, dhi);
      ws.value[k] = std::isfinite(d) ? d * d : kInf;
    }
    exclusive_sums(ws.value, ws.others);
    for (std::size_t k = 0; k < p && !r.is_empty(); ++k) {
      const double rem = r2 - ws.others[k];
      if (!(rem >= 0.0)) continue;
      const double c = ws.center[k];
      const double h = std::sqrt(rem);
      const double w = widening(c, h);
      exclusion_cut(r, k, c - h + w, c + h - w);
    }
    return;
  }

  const SegmentStats st = s.stats();
  for (std::size_t k = 0; k < p; ++k) {
    const double vlo = std::isfinite(r.lo(k)) ? dim_cost(model, st, k, r.lo(k)) : kInf;
    const double vhi = std::isfinite(r.hi(k)) ? dim_cost(model, st, k, r.hi(k)) : kInf;
    ws.value[k] = std::max(vlo, vhi);
  }
  exclusive_sums(ws.value, ws.others);
  for (std::size_t k = 0; k < p && !r.is_empty(); ++k) {
    const double K = s.delta() - ws.others[k];
    if (!std::isfinite(K)) continue;
    const Interval inner = bisection_roots(s, k, K).inner;
    exclusion_cut(r, k, inner.lo, inner.hi);
  }
}

Hyperrect rect_inter(const Hyperrect& r, const SSet& s) {
  Hyperrect out = r;
  GeometryScratch ws;
  rect_inter_in_place(out, s, ws);
  return out;
}

Hyperrect rect_excl(const Hyperrect& r, const SSet& s) {
  Hyperrect out = r;
  GeometryScratch ws;
  rect_excl_in_place(out, s, ws);
  return out;
}

STestSet sset_inter(const STestSet& test, const SSet& s, GeometryScratch& ws) {
  require_gaussian(s.model(), "S-type intersection");
  if (test.is_empty()) return test;
  if (s.is_full()) return test;
  if (s.is_empty()) return STestSet::none();
  if (test.is_full()) return STestSet(s);
  const double ra2 = gaussian_ball(test.set(), ws.center);
  const double rb2 = gaussian_ball(s, ws.center2);
  if (disjoint_balls(ws.center, ra2, ws.center2, rb2)) return STestSet::none();
  return test;
}

STestSet sset_excl(const STestSet& test, const SSet& s, GeometryScratch& ws) {
  require_gaussian(s.model(), "S-type exclusion");
  if (test.is_empty()) return test;
  if (s.is_full()) return STestSet::none();
  if (s.is_empty() || test.is_full()) return test;
  const double ri2 = gaussian_ball(test.set(), ws.center);
  const double ro2 = gaussian_ball(s, ws.center2);
  if (inside_ball(ws.center, ri2, ws.center2, ro2)) return STestSet::none();
  return test;
}

STestSet sset_inter(const STestSet& test, const SSet& s) {
  GeometryScratch ws;
  return sset_inter(test, s, ws);
}

STestSet sset_excl(const STestSet& test, const SSet& s) {
  GeometryScratch ws;
  return sset_excl(test, s, ws);
}

}  // namespace geomseg
