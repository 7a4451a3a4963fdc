#include "geomseg/simbench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "geomseg/errors.hpp"

namespace geomseg {

namespace {

using Clock = std::chrono::steady_clock;

// Runs task(0..count-1) on up to `jobs` threads. Tasks write to their own slots.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t k = 0; k < count; ++k) task(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = next++; k < count; k = next++) task(k);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw OutputError("cannot write " + path);
  out.precision(17);
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw OutputError("cannot create output directory " + dir);
  }
}

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

}  // namespace

std::vector<std::size_t> true_boundaries(std::size_t n, std::size_t segments) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k < segments; ++k) out.push_back(k * n / segments);
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t replicate) {
  return splitmix(splitmix(splitmix(base) ^ cell) ^ replicate);
}

SimData generate(const SimSpec& spec) {
  if (spec.p == 0) throw std::invalid_argument("generate: p must be positive");
  if (spec.segments == 0) throw std::invalid_argument("generate: segments must be at least 1");
  if (spec.segments > spec.n) {
    throw std::invalid_argument("generate: more segments (" + std::to_string(spec.segments) +
                                ") than observations (" + std::to_string(spec.n) + ")");
  }
  if (spec.changed_dims() > spec.p) throw std::invalid_argument("generate: affected_dims > p");
  if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude)) {
    throw std::invalid_argument("generate: amplitude must be finite and nonnegative");
  }

  const std::vector<std::size_t> cps = true_boundaries(spec.n, spec.segments);
  std::mt19937_64 rng(spec.seed);
  std::vector<double> values(spec.n * spec.p);
  std::size_t seg = 0;  // zero-based, so seg odd means an even (shifted) segment
  const std::size_t k_changed = spec.changed_dims();
  for (std::size_t t = 0; t < spec.n; ++t) {
    while (seg < cps.size() && t >= cps[seg]) ++seg;
    const bool shifted = seg % 2 == 1;
    for (std::size_t k = 0; k < spec.p; ++k) {
      const double shift = (shifted && k < k_changed) ? spec.amplitude : 0.0;
      double y = 0.0;
      switch (spec.model.kind()) {
        case ModelKind::Gaussian:
          y = shift + std::normal_distribution<double>(0.0, 1.0)(rng);
          break;
        case ModelKind::Poisson:
          y = static_cast<double>(std::poisson_distribution<long long>(1.0 + shift)(rng));
          break;
        case ModelKind::NegBin: {
          // Gamma-Poisson mixture with mean 1 + shift and dispersion phi.
          const double phi = spec.model.phi();
          const double mu = 1.0 + shift;
          const double lambda = std::gamma_distribution<double>(phi, mu / phi)(rng);
          y = lambda > 0.0
                  ? static_cast<double>(std::poisson_distribution<long long>(lambda)(rng))
                  : 0.0;
          break;
        }
      }
      values[t * spec.p + k] = y;
    }
  }
  return {TimeSeriesMatrix(spec.n, spec.p, std::move(values), spec.model), cps};
}

std::string AlgorithmSpec::id() const {
  switch (solver) {
    case SolverKind::Op: return "op";
    case SolverKind::Pelt: return "pelt";
    case SolverKind::Geom: return geom.name();
  }
  return "?";
}

std::string AlgorithmSpec::file_id() const {
  std::string s = id();
  std::replace(s.begin(), s.end(), ':', '_');
  return s;
}

AlgorithmSpec parse_algorithm(const std::string& id) {
  AlgorithmSpec a;
  if (id == "op") {
    a.solver = SolverKind::Op;
    return a;
  }
  if (id == "pelt") {
    a.solver = SolverKind::Pelt;
    return a;
  }
  a.solver = SolverKind::Geom;
  const auto first = id.find(':');
  a.geom.kind = parse_pruning_kind(id.substr(0, first));
  if (first == std::string::npos) return a;
  const auto second = id.find(':', first + 1);
  if (second == std::string::npos) {
    throw std::invalid_argument("algorithm '" + id + "' needs the form kind:future:past");
  }
  a.geom.future = parse_future_select(id.substr(first + 1, second - first - 1));
  a.geom.past = parse_past_select(id.substr(second + 1));
  return a;
}

AlgorithmRun run_algorithm(const AlgorithmSpec& algo, const TimeSeriesMatrix& data, double beta,
                           std::uint64_t seed, const SolveOptions& options) {
  AlgorithmRun run;
  const auto start = Clock::now();
  switch (algo.solver) {
    case SolverKind::Op:
      run.solve.segmentation = op_solve(data, beta);
      break;
    case SolverKind::Pelt:
      run.solve = pelt_solve(data, beta, options);
      break;
    case SolverKind::Geom: {
      PruningConfig cfg = algo.geom;
      cfg.seed = seed;
      GeomOptions gopt;
      gopt.base = options;
      GeomSolveResult r = geomfpop_solve(data, beta, cfg, gopt);
      for (std::size_t v : r.diagnostics.inter_ops) run.inter_ops += v;
      for (std::size_t v : r.diagnostics.excl_ops) run.excl_ops += v;
      run.solve = std::move(r.solve);
      run.diagnostics = std::move(r.diagnostics);
      break;
    }
  }
  run.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  return run;
}

double simulation_penalty(const SimSpec& spec) {
  return default_penalty(static_cast<double>(spec.n), spec.p, 1.0);
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<std::size_t> log_grid(std::size_t n, std::size_t points_per_decade) {
  std::vector<std::size_t> grid;
  if (n == 0) return grid;
  const double step = 1.0 / static_cast<double>(std::max<std::size_t>(points_per_decade, 1));
  for (double e = 0.0;; e += step) {
    const auto t = static_cast<std::size_t>(std::llround(std::pow(10.0, e)));
    if (t >= n) break;
    if (grid.empty() || grid.back() != t) grid.push_back(t);
  }
  grid.push_back(n);
  return grid;
}

TraceTable candidate_trace_experiment(const TraceRequest& request) {
  TraceTable table;
  table.t_grid = log_grid(request.n, request.points_per_decade);
  const std::size_t n_alg = request.algorithms.size();
  const std::size_t n_p = request.p_values.size();
  const std::size_t reps = request.replicates;

  struct Slot {
    std::vector<double> percent;  // at grid points
    SolveTrace trace;
    std::string error;
  };
  std::vector<Slot> slots(n_p * reps * n_alg);

  parallel_for(n_p * reps, request.jobs, [&](std::size_t task) {
    const std::size_t pi = task / reps;
    const std::size_t r = task % reps;
    SimSpec spec;
    spec.n = request.n;
    spec.p = request.p_values[pi];
    spec.seed = derive_seed(request.seed, spec.p, r);
    const SimData sim = generate(spec);
    const double beta = simulation_penalty(spec);
    for (std::size_t a = 0; a < n_alg; ++a) {
      Slot& slot = slots[task * n_alg + a];
      try {
        AlgorithmRun run = run_algorithm(request.algorithms[a], sim.data, beta, spec.seed);
        const SolveTrace& tr = run.solve.trace;
        if (tr.live_counts.empty()) {
          throw std::invalid_argument(request.algorithms[a].id() + " records no candidate trace");
        }
        for (std::size_t t : table.t_grid) {
          slot.percent.push_back(100.0 * static_cast<double>(tr.live_counts[t]) /
                                 static_cast<double>(t));
        }
        if (request.keep_runs) slot.trace = std::move(run.solve.trace);
      } catch (const std::exception& e) {
        slot.error = e.what();
      }
    }
  });

  for (std::size_t pi = 0; pi < n_p; ++pi) {
    for (std::size_t a = 0; a < n_alg; ++a) {
      TraceSeries series;
      series.p = request.p_values[pi];
      series.algorithm = request.algorithms[a].id();
      series.mean_percent.assign(table.t_grid.size(), 0.0);
      std::size_t ok = 0;
      for (std::size_t r = 0; r < reps; ++r) {
        Slot& slot = slots[(pi * reps + r) * n_alg + a];
        if (!slot.error.empty()) {
          series.errors.push_back("replicate " + std::to_string(r) + ": " + slot.error);
          continue;
        }
        ++ok;
        for (std::size_t g = 0; g < table.t_grid.size(); ++g) series.mean_percent[g] += slot.percent[g];
        if (request.keep_runs) {
          table.runs.push_back({series.p, series.algorithm, r, std::move(slot.trace)});
        }
      }
      for (double& v : series.mean_percent) v = ok > 0 ? v / static_cast<double>(ok) : NAN;
      table.series.push_back(std::move(series));
    }
  }
  return table;
}

namespace {

BenchRecord timed_record(const AlgorithmSpec& algo, const SimSpec& spec, double time_cap,
                         std::size_t replicate) {
  BenchRecord rec;
  rec.n = spec.n;
  rec.p = spec.p;
  rec.segments = spec.segments;
  rec.affected_dims = spec.changed_dims();
  rec.algorithm = algo.id();
  rec.replicate = replicate;
  try {
    const SimData sim = generate(spec);
    SolveOptions opt;
    opt.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(time_cap));
    const AlgorithmRun run = run_algorithm(algo, sim.data, simulation_penalty(spec), spec.seed, opt);
    rec.wall_time = run.wall_time;
    rec.censored = run.wall_time > time_cap;
    if (!run.solve.trace.live_counts.empty()) rec.final_live = run.solve.trace.live_counts.back();
    rec.changepoint_count = run.solve.segmentation.changepoints.size();
    rec.total_cost = run.solve.segmentation.total_cost;
    rec.inter_ops = run.inter_ops;
    rec.excl_ops = run.excl_ops;
  } catch (const TimeCapExceeded&) {
    rec.wall_time = time_cap;
    rec.censored = true;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

BenchCell summarize(const std::vector<BenchRecord>& recs) {
  BenchCell cell;
  const BenchRecord& first = recs.front();
  cell.n = first.n;
  cell.p = first.p;
  cell.segments = first.segments;
  cell.affected_dims = first.affected_dims;
  cell.algorithm = first.algorithm;
  std::vector<double> times;
  for (const BenchRecord& r : recs) {
    if (r.censored) cell.censored = true;
    if (r.error.empty()) times.push_back(r.wall_time);
  }
  cell.median_time = times.empty() ? NAN : median(times);
  return cell;
}

// Discarded run so that first-touch costs do not land in the first cell.
void warm_up(const std::vector<AlgorithmSpec>& algorithms, std::size_t p) {
  SimSpec spec;
  spec.n = 512;
  spec.p = std::max<std::size_t>(p, 1);
  const SimData sim = generate(spec);
  for (const AlgorithmSpec& a : algorithms) {
    try {
      run_algorithm(a, sim.data, simulation_penalty(spec), 0);
    } catch (const std::exception&) {
      // failures surface in the real cells
    }
  }
}

}  // namespace

BenchResult runtime_grid(const GridRequest& request) {
  if (!(request.time_cap > 0.0)) throw std::invalid_argument("runtime_grid: time cap must be > 0");
  BenchResult result;
  result.experiment = "bench";
  std::vector<std::size_t> ns = request.n_values;
  std::sort(ns.begin(), ns.end());
  const std::size_t reps = std::max<std::size_t>(request.replicates, 1);
  if (!request.p_values.empty()) warm_up(request.algorithms, request.p_values.front());

  // One series per (p, algorithm); within a series n grows and censoring propagates.
  const std::size_t n_series = request.p_values.size() * request.algorithms.size();
  std::vector<std::vector<BenchRecord>> per_series(n_series);
  parallel_for(n_series, request.jobs, [&](std::size_t s) {
    const std::size_t p = request.p_values[s / request.algorithms.size()];
    const AlgorithmSpec& algo = request.algorithms[s % request.algorithms.size()];
    bool censored = false;
    for (std::size_t n : ns) {
      for (std::size_t r = 0; r < reps; ++r) {
        SimSpec spec;
        spec.n = n;
        spec.p = p;
        spec.seed = derive_seed(request.seed, n * 1000 + p, r);
        BenchRecord rec;
        if (censored) {
          rec.n = n;
          rec.p = p;
          rec.affected_dims = p;
          rec.algorithm = algo.id();
          rec.replicate = r;
          rec.wall_time = request.time_cap;
          rec.censored = true;
          rec.skipped = true;
        } else {
          rec = timed_record(algo, spec, request.time_cap, r);
        }
        rec.experiment = result.experiment;
        per_series[s].push_back(std::move(rec));
      }
      const std::size_t base = per_series[s].size() - reps;
      for (std::size_t r = 0; r < reps; ++r) censored = censored || per_series[s][base + r].censored;
    }
  });

  for (auto& series : per_series) {
    for (std::size_t k = 0; k < series.size(); k += reps) {
      std::vector<BenchRecord> block(series.begin() + static_cast<std::ptrdiff_t>(k),
                                     series.begin() + static_cast<std::ptrdiff_t>(k + reps));
      result.cells.push_back(summarize(block));
    }
    for (auto& rec : series) result.records.push_back(std::move(rec));
  }
  return result;
}

BenchResult segments_sweep(const SweepRequest& request) {
  if (!(request.time_cap > 0.0)) throw std::invalid_argument("segments_sweep: time cap must be > 0");
  BenchResult result;
  result.experiment = "segments";
  const std::size_t reps = std::max<std::size_t>(request.replicates, 1);
  if (!request.p_values.empty()) warm_up(request.algorithms, request.p_values.front());

  const std::size_t n_alg = request.algorithms.size();
  const std::size_t n_seg = request.segment_counts.size();
  const std::size_t n_cells = request.p_values.size() * n_seg * n_alg;
  std::vector<std::vector<BenchRecord>> per_cell(n_cells);
  parallel_for(n_cells, request.jobs, [&](std::size_t c) {
    const std::size_t p = request.p_values[c / (n_seg * n_alg)];
    const std::size_t segments = request.segment_counts[(c / n_alg) % n_seg];
    const AlgorithmSpec& algo = request.algorithms[c % n_alg];
    for (std::size_t r = 0; r < reps; ++r) {
      SimSpec spec;
      spec.n = request.n;
      spec.p = p;
      spec.segments = segments;
      spec.amplitude = request.amplitude;
      spec.affected_dims = request.affected_dims;
      spec.seed = derive_seed(request.seed, segments * 1000 + p, r);
      BenchRecord rec = timed_record(algo, spec, request.time_cap, r);
      rec.experiment = result.experiment;
      per_cell[c].push_back(std::move(rec));
    }
  });

  for (auto& block : per_cell) {
    result.cells.push_back(summarize(block));
    for (auto& rec : block) result.records.push_back(std::move(rec));
  }
  return result;
}

std::vector<std::string> write_trace_csv(const TraceTable& table, const std::string& dir,
                                         const std::string& experiment) {
  ensure_dir(dir);
  std::vector<std::string> paths;
  for (const TraceSeries& s : table.series) {
    std::string file_id = s.algorithm;
    std::replace(file_id.begin(), file_id.end(), ':', '_');
    const std::string path =
        join_path(dir, experiment + "_" + std::to_string(s.p) + "_" + file_id + ".csv");
    std::ofstream out = open_output(path);
    out << "experiment,p,algorithm,t,mean_percent\n";
    for (std::size_t g = 0; g < table.t_grid.size(); ++g) {
      out << experiment << ',' << s.p << ',' << s.algorithm << ',' << table.t_grid[g] << ','
          << s.mean_percent[g] << '\n';
    }
    if (!out) throw OutputError("failed while writing " + path);
    paths.push_back(path);
  }
  return paths;
}

std::vector<std::string> write_bench_csv(const BenchResult& result, const std::string& dir) {
  ensure_dir(dir);
  std::map<std::pair<std::size_t, std::string>, std::vector<const BenchRecord*>> groups;
  for (const BenchRecord& r : result.records) groups[{r.p, r.algorithm}].push_back(&r);
  std::vector<std::string> paths;
  for (const auto& [key, recs] : groups) {
    std::string file_id = key.second;
    std::replace(file_id.begin(), file_id.end(), ':', '_');
    const std::string path = join_path(
        dir, result.experiment + "_" + std::to_string(key.first) + "_" + file_id + ".csv");
    std::ofstream out = open_output(path);
    out << "experiment,n,p,segments,affected_dims,algorithm,replicate,wall_time,censored,skipped,"
           "final_live,changepoints,total_cost,inter_ops,excl_ops,error\n";
    for (const BenchRecord* r : recs) {
      std::string err = r->error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::replace(err.begin(), err.end(), '\n', ' ');
      out << r->experiment << ',' << r->n << ',' << r->p << ',' << r->segments << ','
          << r->affected_dims << ',' << r->algorithm << ',' << r->replicate << ',' << r->wall_time
          << ',' << (r->censored ? 1 : 0) << ',' << (r->skipped ? 1 : 0) << ',' << r->final_live
          << ',' << r->changepoint_count << ',' << r->total_cost << ',' << r->inter_ops << ','
          << r->excl_ops << ',' << err << '\n';
    }
    if (!out) throw OutputError("failed while writing " + path);
    paths.push_back(path);
  }
  return paths;
}

std::string write_trace_summary(const TraceTable& table, const TraceRequest& request,
                                const std::string& dir, const std::string& experiment) {
  ensure_dir(dir);
  nlohmann::json j;
  j["schema_version"] = 1;
  j["experiment"] = experiment;
  j["n"] = request.n;
  j["replicates"] = request.replicates;
  j["seed"] = request.seed;
  j["series"] = nlohmann::json::array();
  for (const TraceSeries& s : table.series) {
    nlohmann::json e;
    e["p"] = s.p;
    e["algorithm"] = s.algorithm;
    if (!s.mean_percent.empty()) e["final_mean_percent"] = s.mean_percent.back();
    e["errors"] = s.errors;
    j["series"].push_back(e);
  }
  const std::string path = join_path(dir, experiment + "_summary.json");
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw OutputError("failed while writing " + path);
  return path;
}

std::string write_bench_summary(const BenchResult& result, const std::string& dir) {
  ensure_dir(dir);
  nlohmann::json j;
  j["schema_version"] = 1;
  j["experiment"] = result.experiment;
  j["cells"] = nlohmann::json::array();
  for (const BenchCell& c : result.cells) {
    nlohmann::json e;
    e["n"] = c.n;
    e["p"] = c.p;
    e["segments"] = c.segments;
    e["affected_dims"] = c.affected_dims;
    e["algorithm"] = c.algorithm;
    e["median_time"] = std::isfinite(c.median_time) ? nlohmann::json(c.median_time) : nlohmann::json();
    e["censored"] = c.censored;
    j["cells"].push_back(e);
  }
  std::size_t errors = 0;
  for (const BenchRecord& r : result.records) errors += r.error.empty() ? 0 : 1;
  j["failed_records"] = errors;
  const std::string path = join_path(dir, result.experiment + "_summary.json");
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw OutputError("failed while writing " + path);
  return path;
}

}  // namespace geomseg
