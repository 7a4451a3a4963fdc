#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "geomseg/errors.hpp"

namespace geomseg {

enum class ModelKind { Gaussian, Poisson, NegBin };

/// Open-domain floor (and 1 - ceiling for NegBin) used when a per-dimension
/// minimiser sits on the boundary of the parameter domain.
inline constexpr double kDomainEps = 1e-12;

/// Likelihood model shared by every dimension. Defines the atomic cost
/// omega(theta, y) (twice the negative log-likelihood) and its domain.
class CostModel {
 public:
  static CostModel gaussian() { return CostModel(ModelKind::Gaussian, 0.0); }
  static CostModel poisson() { return CostModel(ModelKind::Poisson, 0.0); }
  static CostModel negbin(double phi);

  ModelKind kind() const { return kind_; }
  /// Dispersion; only meaningful for NegBin.
  double phi() const { return phi_; }

  /// Closed box used to clamp minimisers and initial testing sets.
  double domain_lo() const;
  double domain_hi() const;
  bool in_open_domain(double theta) const;

  std::string name() const;

  friend bool operator==(const CostModel&, const CostModel&) = default;

 private:
  CostModel(ModelKind kind, double phi) : kind_(kind), phi_(phi) {}

  ModelKind kind_;
  double phi_;
};

/// Parses "gaussian", "poisson" or "negbin" (phi supplied separately).
CostModel parse_model(const std::string& name, double phi = 1.0);

double atomic_cost(const CostModel& model, double theta, double y);
double point_cost(const CostModel& model, std::span<const double> theta,
                  std::span<const double> y_row);

/// Throws DomainError if `y` is not an admissible observation for `model`.
void validate_observation(const CostModel& model, double y);

class SegmentStats;

/// n x p observations plus per-dimension prefix statistics.
///
/// Two prefix arrays of length (n+1)*p are kept, row-major:
///   sum[t*p+k] = sum of y^k over the first t rows,
///   aux[t*p+k] = sum of the model's theta-free term over the first t rows
///                (y^2 for Gaussian, log y! for Poisson,
///                 log C(y+phi-1, y) for NegBin).
class TimeSeriesMatrix {
 public:
  TimeSeriesMatrix(std::size_t n, std::size_t p, std::vector<double> values,
                   CostModel model);

  std::size_t n() const { return n_; }
  std::size_t p() const { return p_; }
  const CostModel& model() const { return model_; }

  /// Zero-based row access.
  double value(std::size_t row, std::size_t k) const { return values_[row * p_ + k]; }
  std::span<const double> row(std::size_t row) const {
    return {values_.data() + row * p_, p_};
  }
  const std::vector<double>& values() const { return values_; }

  double prefix_sum(std::size_t t, std::size_t k) const { return sum_[t * p_ + k]; }
  double prefix_aux(std::size_t t, std::size_t k) const { return aux_[t * p_ + k]; }

  /// Observations y_i .. y_{j-1} (1-based, half-open). Requires 1 <= i < j <= n+1.
  SegmentStats segment(std::size_t i, std::size_t j) const;

  /// Same data bound to another model (prefix terms are model dependent).
  TimeSeriesMatrix with_model(const CostModel& model) const;

 private:
  std::size_t n_;
  std::size_t p_;
  CostModel model_;
  std::vector<double> values_;
  std::vector<double> sum_;
  std::vector<double> aux_;
};

/// Sufficient statistics of one segment, read from prefix differences.
class SegmentStats {
 public:
  SegmentStats(const TimeSeriesMatrix& data, std::size_t i, std::size_t j)
      : data_(&data), i_(i), j_(j) {}

  std::size_t begin() const { return i_; }
  std::size_t end() const { return j_; }
  std::size_t count() const { return j_ - i_; }
  std::size_t dims() const { return data_->p(); }
  const TimeSeriesMatrix& data() const { return *data_; }

  double sum(std::size_t k) const {
    return data_->prefix_sum(j_ - 1, k) - data_->prefix_sum(i_ - 1, k);
  }
  double aux(std::size_t k) const {
    return data_->prefix_aux(j_ - 1, k) - data_->prefix_aux(i_ - 1, k);
  }

 private:
  const TimeSeriesMatrix* data_;
  std::size_t i_;
  std::size_t j_;
};

inline SegmentStats TimeSeriesMatrix::segment(std::size_t i, std::size_t j) const {
  return SegmentStats(*this, i, j);
}

// Per-dimension segment function s^k(theta) = sum_u omega(theta, y_u^k) and
// its closed-form minimiser. These are the building blocks of both segment
// costs and S-type sets, so they live inline for the hot loops.

inline double dim_argmin(const CostModel& model, const SegmentStats& st, std::size_t k) {
  const double m = static_cast<double>(st.count());
  const double s = st.sum(k);
  switch (model.kind()) {
    case ModelKind::Gaussian:
      return s / m;
    case ModelKind::Poisson:
      return std::max(s / m, kDomainEps);
    case ModelKind::NegBin: {
      const double th = s / (s + m * model.phi());
      return std::clamp(th, kDomainEps, 1.0 - kDomainEps);
    }
  }
  return 0.0;
}

/// s^k(theta). Uses the 0*log(0) = 0 convention for all-zero segments.
inline double dim_cost(const CostModel& model, const SegmentStats& st, std::size_t k,
                       double theta) {
  const double m = static_cast<double>(st.count());
  const double s = st.sum(k);
  const double a = st.aux(k);
  switch (model.kind()) {
    case ModelKind::Gaussian: {
      const double c = s / m;
      const double rss = std::max(a - s * c, 0.0);
      const double d = theta - c;
      return m * d * d + rss;
    }
    case ModelKind::Poisson: {
      const double ylog = s == 0.0 ? 0.0 : s * std::log(theta);
      return 2.0 * (m * theta - ylog + a);
    }
    case ModelKind::NegBin: {
      const double ylog = s == 0.0 ? 0.0 : s * std::log(theta);
      return -2.0 * (ylog + m * model.phi() * std::log1p(-theta) + a);
    }
  }
  return 0.0;
}

inline double dim_min(const CostModel& model, const SegmentStats& st, std::size_t k) {
  if (model.kind() == ModelKind::Gaussian) {
    const double m = static_cast<double>(st.count());
    const double s = st.sum(k);
    return std::max(st.aux(k) - s * s / m, 0.0);
  }
  return dim_cost(model, st, k, dim_argmin(model, st, k));
}

std::vector<double> segment_argmin(const CostModel& model, const SegmentStats& stats);

/// C(y_i..y_{j-1}) in O(p) from prefix statistics.
inline double segment_cost(const CostModel& model, const SegmentStats& stats) {
  double total = 0.0;
  for (std::size_t k = 0; k < stats.dims(); ++k) total += dim_min(model, stats, k);
  return total;
}

/// 2 p sigma^2 log(n), natural logarithm.
double default_penalty(double n, std::size_t p, double sigma);

/// Pooled robust scale: per dimension median |y_{t+1}-y_t| / (0.6745 sqrt 2),
/// averaged over dimensions. Throws ZeroScaleError on a zero estimate.
double estimate_sigma(const TimeSeriesMatrix& data);

}  // namespace geomseg
