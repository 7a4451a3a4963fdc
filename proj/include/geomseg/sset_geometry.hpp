#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "geomseg/cost_model.hpp"

namespace geomseg {

/// Shared read-only state every S-type set is a view over: the data with its
/// prefix statistics and the optimal costs Qhat_0..Qhat_{horizon-1}.
struct SSetContext {
  const TimeSeriesMatrix* data = nullptr;
  std::span<const double> qhat;
  /// Largest admissible end index j (Qhat_{j-1} must be known).
  std::size_t horizon = 0;

  const CostModel& model() const { return data->model(); }
};

/// S^i_j = { theta : sum_k s^k_ij(theta^k) <= Delta_ij },
/// with s^k_ij summing omega over y_i..y_{j-1} and Delta_ij = Qhat_{j-1} - Qhat_{i-1}.
/// S^i_i is the whole parameter space.
///
/// Never materialised: (i, j, Delta) plus the context is enough to evaluate
/// every operator in O(p).
class SSet {
 public:
  SSet(const SSetContext& ctx, std::size_t i, std::size_t j);

  std::size_t i() const { return i_; }
  std::size_t j() const { return j_; }
  double delta() const { return delta_; }
  bool is_full() const { return i_ == j_; }
  /// Empty in the sense of the inequality rule: Qhat_{i-1} + C(y_i..y_{j-1}) >= Qhat_{j-1}.
  /// A set reduced to a single boundary point counts as empty.
  bool is_empty() const { return empty_; }

  const SSetContext& context() const { return *ctx_; }
  const CostModel& model() const { return ctx_->model(); }
  std::size_t dims() const { return ctx_->data->p(); }
  SegmentStats stats() const { return ctx_->data->segment(i_, j_); }

  double dim_value(std::size_t k, double theta) const {
    return dim_cost(model(), stats(), k, theta);
  }

 private:
  const SSetContext* ctx_;
  std::size_t i_;
  std::size_t j_;
  double delta_;
  bool empty_;
};

/// Builds S^i_j; rejects j beyond the context horizon or i > j.
SSet make_sset(std::size_t i, std::size_t j, const SSetContext& ctx);

/// s_ij(theta) = sum_k s^k(theta^k) - Delta; -infinity for the full space.
double s_eval(const SSet& s, std::span<const double> theta);
bool sset_contains(const SSet& s, std::span<const double> theta);

/// Gaussian S-type sets are balls: sum_k (theta^k - center^k)^2 <= radius_sq.
struct BallRep {
  std::vector<double> center;
  double radius_sq = 0.0;

  bool empty() const { return radius_sq < 0.0; }
};

BallRep ball(const SSet& s);

bool ball_disjoint(const BallRep& a, const BallRep& b);
/// One ball contains the other (either direction).
bool ball_included(const BallRep& a, const BallRep& b);
/// `inner` is a subset of `outer`.
bool ball_inside(const BallRep& inner, const BallRep& outer);

struct Interval {
  double lo = 1.0;
  double hi = 0.0;

  static Interval none() { return {}; }
  bool empty() const { return !(lo <= hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Axis-aligned box over the parameter domain; bounds may be infinite.
class Hyperrect {
 public:
  /// The whole parameter domain of `model` in p dimensions.
  static Hyperrect full(const CostModel& model, std::size_t p);
  static Hyperrect empty_box(std::size_t p);

  /// Bounds are clamped to the model domain; an inverted bound empties the box.
  Hyperrect(const CostModel& model, std::vector<double> lo, std::vector<double> hi);

  std::size_t dims() const { return lo_.size(); }
  bool is_empty() const { return empty_; }
  double lo(std::size_t k) const { return lo_[k]; }
  double hi(std::size_t k) const { return hi_[k]; }

  /// Membership with an absolute slack on every bound.
  bool contains(std::span<const double> theta, double slack = 0.0) const;
  /// Coordinatewise inclusion; an empty box is inside everything.
  bool inside(const Hyperrect& other) const;

  void set_bounds(std::size_t k, double lo, double hi) {
    lo_[k] = lo;
    hi_[k] = hi;
  }
  void set_empty() { empty_ = true; }

  friend bool operator==(const Hyperrect&, const Hyperrect&) = default;

 private:
  Hyperrect() = default;

  std::vector<double> lo_;
  std::vector<double> hi_;
  bool empty_ = false;
};

/// Minimal (c), closest (m) and farthest (M) points of a box relative to S.
/// An infinite farthest coordinate signals an unbounded s^k on that side.
struct CharPoints {
  std::vector<double> c;
  std::vector<double> m;
  std::vector<double> M;
};

CharPoints char_points(const SSet& s, const Hyperrect& r);

/// { theta^k : s^k(theta^k) <= K } intersected with the model domain.
/// Gaussian: closed form. Poisson/NegBin: bracketed bisection to a residual
/// of 1e-10 (1 + |K|); the returned endpoints lie on or just outside the
/// true interval.
Interval dim_roots(const SSet& s, std::size_t k, double K);

/// Reusable buffers for the in-place operators.
struct GeometryScratch {
  std::vector<double> center;
  std::vector<double> center2;
  std::vector<double> value;
  std::vector<double> others;
};

/// Tightest box containing r intersect S (closest-point rule).
Hyperrect rect_inter(const Hyperrect& r, const SSet& s);
/// Box containing r minus S (farthest-point rule; one-sided cuts only).
Hyperrect rect_excl(const Hyperrect& r, const SSet& s);

void rect_inter_in_place(Hyperrect& r, const SSet& s, GeometryScratch& ws);
void rect_excl_in_place(Hyperrect& r, const SSet& s, GeometryScratch& ws);

/// S-type testing set: the full space, a carried S-type set, or empty.
class STestSet {
 public:
  static STestSet full() { return STestSet(State::Full); }
  static STestSet none() { return STestSet(State::Empty); }
  explicit STestSet(const SSet& s) : state_(State::Alive), set_(s) {}

  bool is_full() const { return state_ == State::Full; }
  bool is_empty() const { return state_ == State::Empty; }
  const SSet& set() const { return *set_; }

 private:
  enum class State { Full, Alive, Empty };
  explicit STestSet(State st) : state_(st) {}

  State state_;
  std::optional<SSet> set_;
};

/// Empty when the carried ball misses S, otherwise the left operand.
/// Gaussian only: other models raise UnsupportedOperator.
STestSet sset_inter(const STestSet& test, const SSet& s);
/// Empty when the carried ball lies inside S, otherwise the left operand.
STestSet sset_excl(const STestSet& test, const SSet& s);

STestSet sset_inter(const STestSet& test, const SSet& s, GeometryScratch& ws);
STestSet sset_excl(const STestSet& test, const SSet& s, GeometryScratch& ws);

}  // namespace geomseg
