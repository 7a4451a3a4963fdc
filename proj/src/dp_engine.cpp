#include "geomseg/dp_engine.hpp"

#include <cassert>
#include <limits>
#include <stdexcept>
#include <string>

namespace geomseg {

RunState::RunState(std::size_t n, double beta)
    : qhat(n + 1, 0.0), tauhat(n + 1, 0), beta(beta) {
  candidates.reserve(n);
}

std::pair<double, std::size_t> best_cost_best_tau(std::size_t t, RunState& state,
                                                  const TimeSeriesMatrix& data,
                                                  std::vector<double>* costs) {
  if (state.candidates.empty()) {
    throw CorruptionError("best_cost_best_tau: empty candidate list at t=" + std::to_string(t));
  }
  if (costs) costs->resize(state.candidates.size());
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_c = 0;
  bool found = false;
  for (std::size_t idx = 0; idx < state.candidates.size(); ++idx) {
    const std::size_t c = state.candidates[idx];
    const double cost = last_segment_cost(data, c, t);
    if (costs) (*costs)[idx] = cost;
    const double value = state.qhat[c] + cost + state.beta;
    // Candidates are kept sorted, so strict < keeps the smallest index on ties.
    if (!found || value < best) {
      best = value;
      best_c = c;
      found = true;
    }
  }
  state.qhat[t] = best;
  state.tauhat[t] = best_c;
  return {best, best_c};
}

std::vector<std::size_t> backtrack(std::span<const std::size_t> tauhat, std::size_t n) {
  if (tauhat.size() < n + 1) throw CorruptionError("backtrack: tauhat shorter than n+1");
  std::vector<std::size_t> cps;
  std::size_t t = n;
  while (t > 0) {
    const std::size_t prev = tauhat[t];
    if (prev >= t) {
      throw CorruptionError("backtrack: tauhat[" + std::to_string(t) + "]=" +
                            std::to_string(prev) + " is not below t");
    }
    if (prev == 0) break;
    cps.push_back(prev);
    t = prev;
  }
  return {cps.rbegin(), cps.rend()};
}

double segmentation_cost(const TimeSeriesMatrix& data, std::span<const std::size_t> changepoints,
                         double beta) {
  double total = 0.0;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= changepoints.size(); ++k) {
    const std::size_t end = k < changepoints.size() ? changepoints[k] : data.n();
    if (end <= start || end > data.n()) {
      throw std::invalid_argument("segmentation_cost: change points must increase within (0, n)");
    }
    total += last_segment_cost(data, start, end) + beta;
    start = end;
  }
  return total;
}

Segmentation finish_segmentation(const RunState& state, const TimeSeriesMatrix& data) {
  Segmentation seg;
  seg.changepoints = backtrack(state.tauhat, data.n());
  seg.segment_count = seg.changepoints.size() + 1;
  seg.total_cost = state.qhat[data.n()];
  return seg;
}

void check_deadline(const SolveOptions& options, std::size_t t) {
  if (options.deadline && (t & 255u) == 0 &&
      std::chrono::steady_clock::now() > *options.deadline) {
    throw TimeCapExceeded("solve exceeded its time cap at t=" + std::to_string(t));
  }
}

Segmentation op_solve(const TimeSeriesMatrix& data, double beta) {
  const std::size_t n = data.n();
  if (n == 0) throw std::invalid_argument("op_solve: empty series");
  RunState state(n, beta);
  for (std::size_t t = 1; t <= n; ++t) {
    state.candidates.push_back(t - 1);
    best_cost_best_tau(t, state, data);
  }
  return finish_segmentation(state, data);
}

SolveResult pelt_solve(const TimeSeriesMatrix& data, double beta, const SolveOptions& options) {
  const std::size_t n = data.n();
  if (n == 0) throw std::invalid_argument("pelt_solve: empty series");
  RunState state(n, beta);
  SolveResult result;
  if (options.record_trace) {
    result.trace.live_counts.assign(n + 1, 0);
    result.trace.pruned_at.assign(n + 1, SolveTrace::kNeverPruned);
  }
  std::vector<double> costs;
  std::vector<std::size_t> kept;
  kept.reserve(n);

  for (std::size_t t = 1; t <= n; ++t) {
    check_deadline(options, t);
    state.candidates.push_back(t - 1);
    best_cost_best_tau(t, state, data, &costs);

    const double qt = state.qhat[t];
    kept.clear();
    for (std::size_t idx = 0; idx < state.candidates.size(); ++idx) {
      const std::size_t c = state.candidates[idx];
      if (state.qhat[c] + costs[idx] >= qt) {
        if (options.record_trace) result.trace.pruned_at[c] = t;
      } else {
        kept.push_back(c);
      }
    }
    state.candidates.swap(kept);
    if (options.record_trace) result.trace.live_counts[t] = state.candidates.size();
    if (options.observer) options.observer(t, state.candidates);
  }

  result.segmentation = finish_segmentation(state, data);
  result.qhat = std::move(state.qhat);
  return result;
}

}  // namespace geomseg
