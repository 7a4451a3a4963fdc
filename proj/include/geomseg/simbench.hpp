#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geomseg/cost_model.hpp"
#include "geomseg/dp_engine.hpp"
#include "geomseg/geomfpop.hpp"

namespace geomseg {

/// Piecewise-constant simulation: `segments` equal-length blocks, the even
/// ones (2nd, 4th, ...) shifted by `amplitude` in the first `affected_dims`
/// dimensions.
struct SimSpec {
  std::size_t n = 0;
  std::size_t p = 1;
  std::size_t segments = 1;
  CostModel model = CostModel::gaussian();
  double amplitude = 1.0;
  std::optional<std::size_t> affected_dims;  // defaults to p
  std::uint64_t seed = 0;

  std::size_t changed_dims() const { return affected_dims.value_or(p); }
};

struct SimData {
  TimeSeriesMatrix data;
  std::vector<std::size_t> changepoints;
};

/// Last index of each segment but the final one: floor(k n / segments).
std::vector<std::size_t> true_boundaries(std::size_t n, std::size_t segments);

/// Throws std::invalid_argument for segments == 0, segments > n, p == 0 or
/// affected_dims > p.
SimData generate(const SimSpec& spec);

/// Independent stream for replicate r of cell `cell` under a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t replicate);

enum class SolverKind { Op, Pelt, Geom };

struct AlgorithmSpec {
  SolverKind solver = SolverKind::Pelt;
  PruningConfig geom;  // used when solver == Geom; the seed is set per run

  /// "op", "pelt", "geom-r:all:all", ...
  std::string id() const;
  /// id() with ':' replaced by '_' for file names.
  std::string file_id() const;
};

/// Accepts "op", "pelt", "geom-s", "geom-r" (all/all) and
/// "geom-r:<future>:<past>".
AlgorithmSpec parse_algorithm(const std::string& id);

struct AlgorithmRun {
  SolveResult solve;
  double wall_time = 0.0;
  std::size_t inter_ops = 0;
  std::size_t excl_ops = 0;
  GeomDiagnostics diagnostics;  // per-step counts, Geom only
};

/// Times one solve on a monotonic clock. op_solve records no trace.
AlgorithmRun run_algorithm(const AlgorithmSpec& algo, const TimeSeriesMatrix& data, double beta,
                           std::uint64_t seed, const SolveOptions& options = {});

/// Gaussian default penalty with sigma = 1.
double simulation_penalty(const SimSpec& spec);

// ---------------------------------------------------------------------------
// Candidate traces

struct TraceRequest {
  std::vector<std::size_t> p_values;
  std::size_t n = 10000;
  std::size_t replicates = 20;
  std::vector<AlgorithmSpec> algorithms;
  std::uint64_t seed = 0;
  std::size_t points_per_decade = 20;
  std::size_t jobs = 1;
  /// Keep the per-replicate traces (needed for set-inclusion checks).
  bool keep_runs = false;
};

struct TraceSeries {
  std::size_t p = 0;
  std::string algorithm;
  /// Mean over replicates of 100 * live_t / t at every grid point.
  std::vector<double> mean_percent;
  std::vector<std::string> errors;
};

struct TraceRun {
  std::size_t p = 0;
  std::string algorithm;
  std::size_t replicate = 0;
  SolveTrace trace;
};

struct TraceTable {
  std::vector<std::size_t> t_grid;
  std::vector<TraceSeries> series;
  std::vector<TraceRun> runs;
};

/// Roughly log-spaced integers in [1, n], always ending with n.
std::vector<std::size_t> log_grid(std::size_t n, std::size_t points_per_decade);

/// Every algorithm sees the same noise series for a given (p, replicate).
TraceTable candidate_trace_experiment(const TraceRequest& request);

// ---------------------------------------------------------------------------
// Runtime benchmarks

struct BenchRecord {
  std::string experiment;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t segments = 1;
  std::size_t affected_dims = 0;
  std::string algorithm;
  std::size_t replicate = 0;
  double wall_time = 0.0;
  bool censored = false;
  /// Skipped because a smaller n of the same series already hit the cap.
  bool skipped = false;
  std::size_t final_live = 0;
  std::size_t changepoint_count = 0;
  double total_cost = 0.0;
  std::size_t inter_ops = 0;
  std::size_t excl_ops = 0;
  std::string error;
};

struct BenchCell {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t segments = 1;
  std::size_t affected_dims = 0;
  std::string algorithm;
  double median_time = 0.0;
  bool censored = false;
};

struct BenchResult {
  std::string experiment;
  std::vector<BenchRecord> records;
  std::vector<BenchCell> cells;
};

struct GridRequest {
  std::vector<std::size_t> n_values;
  std::vector<std::size_t> p_values;
  std::vector<AlgorithmSpec> algorithms;
  std::size_t replicates = 3;
  double time_cap = 180.0;  // seconds per solve
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

/// Noise series; once a (p, algorithm) pair is censored at some n, larger n
/// are recorded as censored without running.
BenchResult runtime_grid(const GridRequest& request);

struct SweepRequest {
  std::size_t n = 100000;
  std::vector<std::size_t> segment_counts;
  std::vector<std::size_t> p_values;
  std::vector<AlgorithmSpec> algorithms;
  std::optional<std::size_t> affected_dims;
  double amplitude = 1.0;
  std::size_t replicates = 3;
  double time_cap = 180.0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

BenchResult segments_sweep(const SweepRequest& request);

/// Median of a non-empty list.
double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// Output

/// One long-format CSV per (p, algorithm): `{experiment}_{p}_{algorithm}.csv`.
/// Returns the written paths; unwritable paths raise OutputError.
std::vector<std::string> write_trace_csv(const TraceTable& table, const std::string& dir,
                                         const std::string& experiment);
std::vector<std::string> write_bench_csv(const BenchResult& result, const std::string& dir);
/// `{experiment}_summary.json`.
std::string write_trace_summary(const TraceTable& table, const TraceRequest& request,
                                const std::string& dir, const std::string& experiment);
std::string write_bench_summary(const BenchResult& result, const std::string& dir);

}  // namespace geomseg
