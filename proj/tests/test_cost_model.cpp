#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "geomseg/cost_model.hpp"
#include "geomseg/errors.hpp"
#include "oracles.hpp"

using namespace geomseg;

namespace {

TimeSeriesMatrix column(std::vector<double> v, CostModel model = CostModel::gaussian()) {
  const std::size_t n = v.size();
  return TimeSeriesMatrix(n, 1, std::move(v), model);
}

}  // namespace

TEST_CASE("atomic cost examples") {
  CHECK(atomic_cost(CostModel::gaussian(), 1.0, 1.0) == 0.0);
  CHECK(atomic_cost(CostModel::poisson(), 1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(atomic_cost(CostModel::negbin(1.0), 0.5, 1.0) ==
        doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(atomic_cost(CostModel::negbin(1.0), 0.5, 1.0) == doctest::Approx(2.772589).epsilon(1e-6));
}

TEST_CASE("atomic cost rejects bad inputs") {
  CHECK_THROWS_AS(atomic_cost(CostModel::poisson(), 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(atomic_cost(CostModel::poisson(), -1.0, 1.0), DomainError);
  CHECK_THROWS_AS(atomic_cost(CostModel::negbin(1.0), 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(atomic_cost(CostModel::gaussian(), NAN, 1.0), DomainError);
  CHECK_THROWS_AS(atomic_cost(CostModel::gaussian(), 0.0, NAN), DomainError);
  CHECK_THROWS_AS(atomic_cost(CostModel::poisson(), 1.0, -1.0), DomainError);
  CHECK_THROWS_AS(atomic_cost(CostModel::poisson(), 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(CostModel::negbin(0.0), DomainError);
}

TEST_CASE("point cost examples") {
  const std::vector<double> zero{0.0, 0.0};
  const std::vector<double> y{3.0, 4.0};
  CHECK(point_cost(CostModel::gaussian(), zero, y) == 25.0);
  const std::vector<double> fig{0.29, 1.93};
  CHECK(point_cost(CostModel::gaussian(), fig, fig) == 0.0);
  const std::vector<double> ones{1.0, 1.0};
  CHECK(point_cost(CostModel::poisson(), ones, ones) == doctest::Approx(4.0));
}

TEST_CASE("point cost reports the offending dimension") {
  const std::vector<double> theta{1.0, -1.0};
  const std::vector<double> y{1.0, 1.0};
  try {
    point_cost(CostModel::poisson(), theta, y);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    REQUIRE(e.column().has_value());
    CHECK(*e.column() == 1);
  }
}

TEST_CASE("segment argmin examples") {
  const auto g = column({0.0, 2.0});
  CHECK(segment_argmin(g.model(), g.segment(1, 3))[0] == doctest::Approx(1.0));
  const auto nb = column({1.0}, CostModel::negbin(1.0));
  CHECK(segment_argmin(nb.model(), nb.segment(1, 2))[0] == doctest::Approx(0.5));
  const auto po = column({2.0, 4.0}, CostModel::poisson());
  CHECK(segment_argmin(po.model(), po.segment(1, 3))[0] == doctest::Approx(3.0));
}

TEST_CASE("all-zero count segments use the domain floor and ceiling") {
  const auto po = column({0.0, 0.0, 0.0}, CostModel::poisson());
  CHECK(segment_argmin(po.model(), po.segment(1, 4))[0] == kDomainEps);
  CHECK(segment_cost(po.model(), po.segment(1, 4)) == doctest::Approx(2.0 * 3.0 * kDomainEps));
  const auto nb = column({0.0, 0.0}, CostModel::negbin(2.0));
  CHECK(segment_argmin(nb.model(), nb.segment(1, 3))[0] == kDomainEps);
  CHECK(std::isfinite(segment_cost(nb.model(), nb.segment(1, 3))));
}

TEST_CASE("segment cost examples") {
  const auto g = column({0.0, 2.0});
  CHECK(segment_cost(g.model(), g.segment(1, 3)) == doctest::Approx(2.0));
  CHECK(segment_cost(g.model(), g.segment(2, 3)) == 0.0);
  const TimeSeriesMatrix fig(2, 2, {0.29, 1.93, 1.86, -0.02}, CostModel::gaussian());
  CHECK(std::abs(segment_cost(fig.model(), fig.segment(1, 3)) - 3.1337) <= 1e-4);
}

TEST_CASE("default penalty examples") {
  CHECK(std::abs(default_penalty(1e4, 2, 1.0) - 36.8414) <= 1e-4);
  CHECK(default_penalty(std::exp(1.0), 1, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(default_penalty(100, 10, 2.0) - 368.414) <= 1e-3);
  CHECK_THROWS_AS(default_penalty(1.0, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(default_penalty(10.0, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(default_penalty(10.0, 1, 0.0), std::invalid_argument);
}

TEST_CASE("estimate_sigma") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> v(10000);
  for (double& x : v) x = z(rng);
  const auto noise = column(v);
  CHECK(std::abs(estimate_sigma(noise) - 1.0) <= 0.05);

  std::vector<double> doubled = v;
  for (double& x : doubled) x *= 2.0;
  CHECK(estimate_sigma(column(doubled)) == doctest::Approx(2.0 * estimate_sigma(noise)));

  CHECK_THROWS_AS(estimate_sigma(column({3.0, 3.0, 3.0, 3.0})), ZeroScaleError);
  CHECK_THROWS_AS(estimate_sigma(column({3.0})), std::invalid_argument);
}

TEST_CASE("loading validates the domain with 1-based row and column") {
  try {
    TimeSeriesMatrix(2, 2, {1.0, 2.0, 3.0, -1.0}, CostModel::poisson());
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(e.row() == 2u);
    CHECK(e.column() == 2u);
  }
  CHECK_THROWS_AS(TimeSeriesMatrix(1, 1, {2.5}, CostModel::negbin(1.0)), DomainError);
  CHECK_THROWS_AS(TimeSeriesMatrix(1, 1, {INFINITY}, CostModel::gaussian()), DomainError);
  CHECK_THROWS_AS(TimeSeriesMatrix(2, 1, {1.0}, CostModel::gaussian()), InputError);
}

TEST_CASE("prefix differences reproduce raw sums") {
  std::mt19937_64 rng(5);
  for (const CostModel& model : {CostModel::gaussian(), CostModel::poisson(), CostModel::negbin(1.5)}) {
    const auto d = oracle::random_matrix(model, 40, 3, rng);
    for (std::size_t i = 1; i <= 40; i += 7) {
      for (std::size_t j = i + 1; j <= 41; j += 5) {
        for (std::size_t k = 0; k < 3; ++k) {
          double s = 0.0;
          for (std::size_t r = i - 1; r < j - 1; ++r) s += d.value(r, k);
          CHECK(d.segment(i, j).sum(k) == doctest::Approx(s).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("segment cost equals a dense minimisation of the summed point costs") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> len(1, 10), dim(1, 3);
  for (const CostModel& model : {CostModel::gaussian(), CostModel::poisson(), CostModel::negbin(1.0)}) {
    for (int rep = 0; rep < 30; ++rep) {
      const std::size_t m = len(rng), p = dim(rng);
      const auto d = oracle::random_matrix(model, m, p, rng);
      double grid_min = 0.0;
      for (std::size_t k = 0; k < p; ++k) {
        auto f = [&](double th) { return oracle::dim_sum(d, 0, m, k, th); };
        double lo = model.domain_lo(), hi = model.domain_hi();
        if (model.kind() == ModelKind::Gaussian) {
          lo = -20.0;
          hi = 20.0;
        } else if (model.kind() == ModelKind::Poisson) {
          hi = 50.0;
        }
        grid_min += oracle::golden_min(f, lo, hi);
      }
      const double c = segment_cost(model, d.segment(1, m + 1));
      CHECK(std::abs(c - grid_min) <= 1e-6 * std::max(1.0, std::abs(grid_min)));
    }
  }
}

TEST_CASE("sufficient statistics match pointwise sums for random theta") {
  std::mt19937_64 rng(8);
  for (const CostModel& model : {CostModel::gaussian(), CostModel::poisson(), CostModel::negbin(2.0)}) {
    const auto d = oracle::random_matrix(model, 25, 2, rng);
    std::uniform_real_distribution<double> th(model.kind() == ModelKind::Gaussian ? -3.0 : 0.05,
                                              model.kind() == ModelKind::NegBin ? 0.95 : 5.0);
    for (int rep = 0; rep < 50; ++rep) {
      const std::vector<double> theta{th(rng), th(rng)};
      double pointwise = 0.0;
      for (std::size_t r = 3; r < 19; ++r) pointwise += point_cost(model, theta, d.row(r));
      const auto st = d.segment(4, 20);
      const double via_stats = dim_cost(model, st, 0, theta[0]) + dim_cost(model, st, 1, theta[1]);
      CHECK(oracle::rel_diff(pointwise, via_stats) <= 1e-9);
    }
  }
}

TEST_CASE("single point cost equals omega at its minimiser") {
  for (const CostModel& model : {CostModel::poisson(), CostModel::negbin(1.0)}) {
    for (double y : {0.0, 1.0, 4.0, 17.0}) {
      const auto d = column({y}, model);
      const auto st = d.segment(1, 2);
      const double theta = segment_argmin(model, st)[0];
      CHECK(segment_cost(model, st) == doctest::Approx(atomic_cost(model, theta, y)).epsilon(1e-12));
    }
  }
  const auto g = column({-4.2});
  CHECK(segment_cost(g.model(), g.segment(1, 2)) >= 0.0);
}

TEST_CASE("splitting never increases the cost") {
  std::mt19937_64 rng(99);
  for (const CostModel& model : {CostModel::gaussian(), CostModel::poisson(), CostModel::negbin(1.0)}) {
    const auto d = oracle::random_matrix(model, 60, 2, rng);
    std::uniform_int_distribution<std::size_t> pos(1, 60);
    for (int rep = 0; rep < 300; ++rep) {
      std::size_t a = pos(rng), b = pos(rng), c = pos(rng);
      std::size_t s[3] = {a, b, c};
      std::sort(s, s + 3);
      if (s[0] == s[1] || s[1] == s[2]) continue;
      const double whole = segment_cost(model, d.segment(s[0], s[2] + 1));
      const double left = segment_cost(model, d.segment(s[0], s[1] + 1));
      const double right = segment_cost(model, d.segment(s[1] + 1, s[2] + 1));
      CHECK(left + right <= whole + 1e-9 * std::max(1.0, whole));
    }
  }
}

TEST_CASE("model parsing") {
  CHECK(parse_model("gaussian") == CostModel::gaussian());
  CHECK(parse_model("negbin", 3.0).phi() == 3.0);
  CHECK_THROWS_AS(parse_model("cauchy"), std::invalid_argument);
}
