#include "geomseg/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace geomseg {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

bool is_integer(double y) { return std::abs(y - std::round(y)) <= 1e-9; }

double aux_term(const CostModel& model, double y) {
  switch (model.kind()) {
    case ModelKind::Gaussian:
      return y * y;
    case ModelKind::Poisson:
      return std::lgamma(std::round(y) + 1.0);
    case ModelKind::NegBin: {
      const double yy = std::round(y);
      return std::lgamma(yy + model.phi()) - std::lgamma(model.phi()) - std::lgamma(yy + 1.0);
    }
  }
  return 0.0;
}

double median_in_place(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

CostModel CostModel::negbin(double phi) {
  if (!(phi > 0.0) || !std::isfinite(phi)) {
    throw DomainError("negative binomial dispersion phi must be positive");
  }
  return CostModel(ModelKind::NegBin, phi);
}

double CostModel::domain_lo() const {
  switch (kind_) {
    case ModelKind::Gaussian:
      return -std::numeric_limits<double>::infinity();
    case ModelKind::Poisson:
    case ModelKind::NegBin:
      return kDomainEps;
  }
  return 0.0;
}

double CostModel::domain_hi() const {
  switch (kind_) {
    case ModelKind::Gaussian:
    case ModelKind::Poisson:
      return std::numeric_limits<double>::infinity();
    case ModelKind::NegBin:
      return 1.0 - kDomainEps;
  }
  return 0.0;
}

bool CostModel::in_open_domain(double theta) const {
  if (std::isnan(theta)) return false;
  switch (kind_) {
    case ModelKind::Gaussian:
      return std::isfinite(theta);
    case ModelKind::Poisson:
      return theta > 0.0 && std::isfinite(theta);
    case ModelKind::NegBin:
      return theta > 0.0 && theta < 1.0;
  }
  return false;
}

std::string CostModel::name() const {
  switch (kind_) {
    case ModelKind::Gaussian:
      return "gaussian";
    case ModelKind::Poisson:
      return "poisson";
    case ModelKind::NegBin:
      return "negbin";
  }
  return "unknown";
}

CostModel parse_model(const std::string& name, double phi) {
  if (name == "gaussian") return CostModel::gaussian();
  if (name == "poisson") return CostModel::poisson();
  if (name == "negbin") return CostModel::negbin(phi);
  throw std::invalid_argument("unknown model '" + name + "'");
}

void validate_observation(const CostModel& model, double y) {
  if (!std::isfinite(y)) throw DomainError("observation is not a finite number");
  if (model.kind() == ModelKind::Gaussian) return;
  if (y < 0.0 || !is_integer(y)) {
    std::ostringstream os;
    os << model.name() << " observations must be nonnegative integers, got " << y;
    throw DomainError(os.str());
  }
}

double atomic_cost(const CostModel& model, double theta, double y) {
  if (std::isnan(theta) || std::isnan(y)) throw DomainError("NaN input to atomic cost");
  if (!model.in_open_domain(theta)) {
    std::ostringstream os;
    os << "theta=" << theta << " outside the " << model.name() << " parameter domain";
    throw DomainError(os.str());
  }
  validate_observation(model, y);
  switch (model.kind()) {
    case ModelKind::Gaussian:
      return (y - theta) * (y - theta);
    case ModelKind::Poisson: {
      const double ylog = y == 0.0 ? 0.0 : y * std::log(theta);
      return 2.0 * (theta - ylog + aux_term(model, y));
    }
    case ModelKind::NegBin: {
      const double ylog = y == 0.0 ? 0.0 : y * std::log(theta);
      return -2.0 * (ylog + model.phi() * std::log1p(-theta) + aux_term(model, y));
    }
  }
  return 0.0;
}

double point_cost(const CostModel& model, std::span<const double> theta,
                  std::span<const double> y_row) {
  if (theta.size() != y_row.size()) {
    throw std::invalid_argument("point_cost: theta and y dimensions differ");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    try {
      total += atomic_cost(model, theta[k], y_row[k]);
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " (dimension " + std::to_string(k) + ")",
                        std::nullopt, k);
    }
  }
  return total;
}

TimeSeriesMatrix::TimeSeriesMatrix(std::size_t n, std::size_t p, std::vector<double> values,
                                   CostModel model)
    : n_(n), p_(p), model_(model), values_(std::move(values)) {
  if (p_ == 0) throw InputError("time series needs at least one dimension");
  if (values_.size() != n_ * p_) throw InputError("value count does not match n*p");
  for (std::size_t t = 0; t < n_; ++t) {
    for (std::size_t k = 0; k < p_; ++k) {
      try {
        validate_observation(model_, values_[t * p_ + k]);
      } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " at row " + std::to_string(t + 1) +
                              ", column " + std::to_string(k + 1),
                          t + 1, k + 1);
      }
    }
  }

  sum_.assign((n_ + 1) * p_, 0.0);
  aux_.assign((n_ + 1) * p_, 0.0);
  for (std::size_t k = 0; k < p_; ++k) {
    CompensatedSum s;
    CompensatedSum a;
    for (std::size_t t = 0; t < n_; ++t) {
      const double y = values_[t * p_ + k];
      s.add(y);
      a.add(aux_term(model_, y));
      sum_[(t + 1) * p_ + k] = s.value();
      aux_[(t + 1) * p_ + k] = a.value();
    }
  }
}

TimeSeriesMatrix TimeSeriesMatrix::with_model(const CostModel& model) const {
  return TimeSeriesMatrix(n_, p_, values_, model);
}

std::vector<double> segment_argmin(const CostModel& model, const SegmentStats& stats) {
  std::vector<double> out(stats.dims());
  for (std::size_t k = 0; k < stats.dims(); ++k) out[k] = dim_argmin(model, stats, k);
  return out;
}

double default_penalty(double n, std::size_t p, double sigma) {
  if (!(n >= 2.0)) throw std::invalid_argument("default penalty needs n >= 2");
  if (p == 0) throw std::invalid_argument("default penalty needs p >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("default penalty needs sigma > 0");
  return 2.0 * static_cast<double>(p) * sigma * sigma * std::log(n);
}

double estimate_sigma(const TimeSeriesMatrix& data) {
  if (data.n() < 2) throw std::invalid_argument("estimate_sigma needs n >= 2");
  const double scale = 0.6745 * std::sqrt(2.0);
  std::vector<double> diffs(data.n() - 1);
  double total = 0.0;
  for (std::size_t k = 0; k < data.p(); ++k) {
    for (std::size_t t = 0; t + 1 < data.n(); ++t) {
      diffs[t] = std::abs(data.value(t + 1, k) - data.value(t, k));
    }
    total += median_in_place(diffs) / scale;
  }
  const double sigma = total / static_cast<double>(data.p());
  if (!(sigma > 0.0)) throw ZeroScaleError("estimated noise scale is zero (constant series?)");
  return sigma;
}

}  // namespace geomseg
