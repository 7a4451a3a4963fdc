#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "geomseg/cost_model.hpp"

namespace geomseg {

/// Optimal segmentation of y_1..y_n. Change points are the last indices of
/// every segment but the final one, strictly increasing in (0, n).
struct Segmentation {
  std::vector<std::size_t> changepoints;
  double total_cost = 0.0;
  std::size_t segment_count = 1;
};

/// Mutable state of one solve. Candidates are stored as change indices
/// c = i - 1, so the last segment of candidate c is y_{c+1}..y_t.
struct RunState {
  RunState(std::size_t n, double beta);

  std::vector<double> qhat;          // Qhat_0..Qhat_n
  std::vector<std::size_t> tauhat;   // tauhat[t] for t = 1..n; tauhat[0] unused
  std::vector<std::size_t> candidates;
  double beta;
};

/// Per-candidate lifetime and per-step live counts of a pruned solve.
struct SolveTrace {
  /// live_counts[t] = number of candidates kept after the pruning sweep of step t.
  std::vector<std::size_t> live_counts;
  /// pruned_at[c] = step at which change c was pruned, or kNeverPruned.
  std::vector<std::size_t> pruned_at;

  static constexpr std::size_t kNeverPruned = static_cast<std::size_t>(-1);

  /// Whether change c is still a candidate after step t.
  bool live_after(std::size_t c, std::size_t t) const {
    return c < t && pruned_at[c] > t;
  }
};

struct SolveOptions {
  bool record_trace = true;
  /// Checked every few hundred steps; exceeding it throws TimeCapExceeded.
  std::optional<std::chrono::steady_clock::time_point> deadline;
  /// Called after the pruning sweep of every step with the live candidates.
  std::function<void(std::size_t t, std::span<const std::size_t> live)> observer;
};

struct SolveResult {
  Segmentation segmentation;
  SolveTrace trace;
  std::vector<double> qhat;
};

/// Cost of the last segment y_{c+1}..y_t for candidate change c.
inline double last_segment_cost(const TimeSeriesMatrix& data, std::size_t c, std::size_t t) {
  return segment_cost(data.model(), data.segment(c + 1, t + 1));
}

/// Minimises Qhat_c + C(y_{c+1}..y_t) + beta over state.candidates, writes
/// Qhat_t and tauhat_t, and returns them. Ties go to the smallest c.
/// `costs` (optional) receives C for every candidate in order.
std::pair<double, std::size_t> best_cost_best_tau(std::size_t t, RunState& state,
                                                  const TimeSeriesMatrix& data,
                                                  std::vector<double>* costs = nullptr);

/// cp(n) = (cp(tauhat_n), tauhat_n), cp(0) = empty.
std::vector<std::size_t> backtrack(std::span<const std::size_t> tauhat, std::size_t n);

/// Sum of segment costs plus beta per segment, recomputed from the data.
double segmentation_cost(const TimeSeriesMatrix& data, std::span<const std::size_t> changepoints,
                         double beta);

/// Exhaustive optimal partitioning, O(n^2).
Segmentation op_solve(const TimeSeriesMatrix& data, double beta);

/// Optimal partitioning with inequality-based pruning: change c is dropped at
/// step t when Qhat_c + C(y_{c+1}..y_t) >= Qhat_t.
SolveResult pelt_solve(const TimeSeriesMatrix& data, double beta,
                       const SolveOptions& options = {});

/// Shared tail of every solver: checks n, fills the segmentation from tauhat.
Segmentation finish_segmentation(const RunState& state, const TimeSeriesMatrix& data);

void check_deadline(const SolveOptions& options, std::size_t t);

}  // namespace geomseg
