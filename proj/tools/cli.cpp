#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "geomseg/csv_io.hpp"
#include "geomseg/errors.hpp"
#include "geomseg/simbench.hpp"

namespace geomseg {

namespace {

/// Invalid flag value or combination (exit 4).
class FlagError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& s, const std::string& flag) {
  std::vector<std::size_t> out;
  for (const std::string& item : split_list(s)) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    // Accept 1e4 and 2^15 style values as well as plain integers.
    if (pos != item.size() && item.rfind("2^", 0) == 0) {
      try {
        v = std::ldexp(1.0, std::stoi(item.substr(2), &pos));
        pos += 2;
      } catch (const std::exception&) {
        pos = 0;
      }
    }
    if (pos != item.size() || !(v >= 1.0) || v != std::floor(v) || v > 1e12) {
      throw FlagError(flag + ": '" + item + "' is not a positive integer");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw FlagError(flag + " must list at least one value");
  return out;
}

std::vector<AlgorithmSpec> parse_configs(const std::string& s, const CostModel& model) {
  std::vector<AlgorithmSpec> out;
  for (const std::string& item : split_list(s)) {
    out.push_back(parse_algorithm(item));
    if (out.back().solver == SolverKind::Geom && out.back().geom.kind == PruningKind::SType &&
        model.kind() != ModelKind::Gaussian) {
      throw FlagError("geom-s only supports --model gaussian");
    }
  }
  if (out.empty()) throw FlagError("--configs must list at least one algorithm");
  return out;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("GEOMSEG_SEED")) {
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(env, &pos);
      if (pos == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw FlagError(std::string("GEOMSEG_SEED='") + env + "' is not an unsigned integer");
  }
  return 0;
}

struct ModelFlags {
  std::string model = "gaussian";
  double phi = 1.0;

  CostModel resolve() const {
    try {
      return parse_model(model, phi);
    } catch (const std::invalid_argument& e) {
      throw FlagError(e.what());
    }
  }
};

struct DetectFlags {
  std::string input;
  std::string out;
  std::string trace_out;
  ModelFlags model;
  std::optional<double> sigma;
  std::optional<double> beta;
  std::string pruning = "geom-r";
  std::string future = "all";
  std::string past = "all";
  std::optional<std::uint64_t> seed;
};

struct SimulateFlags {
  std::size_t n = 0;
  std::size_t p = 1;
  std::size_t segments = 1;
  ModelFlags model;
  double amplitude = 1.0;
  std::optional<std::size_t> affected_dims;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string truth;
};

struct GridFlags {
  std::string n_list;
  std::string p_list;
  std::string configs = "pelt,geom-r:all:all";
  std::size_t replicates = 0;  // 0 = subcommand default
  double time_cap = 180.0;
  std::size_t jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string segments_list;
  std::optional<std::size_t> affected_dims;
  double amplitude = 1.0;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw OutputError("cannot write " + path);
  f << text;
  if (!f) throw OutputError("failed while writing " + path);
}

int run_detect(const DetectFlags& f, std::ostream& out, std::ostream& err) {
  const CostModel model = f.model.resolve();
  AlgorithmSpec algo;
  if (f.pruning == "op") {
    algo.solver = SolverKind::Op;
  } else if (f.pruning == "pelt") {
    algo.solver = SolverKind::Pelt;
  } else {
    algo.solver = SolverKind::Geom;
    algo.geom.kind = parse_pruning_kind(f.pruning);
    algo.geom.future = parse_future_select(f.future);
    algo.geom.past = parse_past_select(f.past);
    if (algo.geom.kind == PruningKind::SType && model.kind() != ModelKind::Gaussian) {
      throw FlagError("--pruning geom-s needs --model gaussian (S-type ball tests are not defined for " +
                      model.name() + ")");
    }
  }
  if (f.beta && !(*f.beta >= 0.0 && std::isfinite(*f.beta))) {
    throw FlagError("--beta must be finite and nonnegative");
  }
  if (f.sigma && !(*f.sigma > 0.0 && std::isfinite(*f.sigma))) {
    throw FlagError("--sigma must be positive");
  }
  const std::uint64_t seed = resolve_seed(f.seed);

  const TimeSeriesMatrix data = load_time_series(f.input, model);

  double beta = 0.0;
  std::optional<double> sigma_used;
  if (f.beta) {
    if (f.sigma) err << "warning: both --beta and --sigma given; using --beta\n";
    beta = *f.beta;
  } else {
    if (f.sigma) {
      sigma_used = *f.sigma;
    } else if (model.kind() == ModelKind::Gaussian) {
      if (data.n() < 2) throw InputError("a single row cannot estimate sigma; pass --beta");
      try {
        sigma_used = estimate_sigma(data);
      } catch (const ZeroScaleError& e) {
        throw InputError(std::string(e.what()) + "; pass --sigma or --beta");
      }
    } else {
      sigma_used = 1.0;
    }
    if (data.n() < 2) throw InputError("the default penalty needs at least two rows; pass --beta");
    beta = default_penalty(static_cast<double>(data.n()), data.p(), *sigma_used);
  }

  const AlgorithmRun run = run_algorithm(algo, data, beta, seed);
  const Segmentation& seg = run.solve.segmentation;

  nlohmann::json j;
  j["schema_version"] = 1;
  j["changepoints"] = seg.changepoints;
  j["segment_count"] = seg.segment_count;
  j["total_cost"] = seg.total_cost;
  j["beta_used"] = beta;
  j["sigma_used"] = sigma_used ? nlohmann::json(*sigma_used) : nlohmann::json();
  j["algorithm"] = algo.id();
  j["model"] = model.name();
  j["n"] = data.n();
  j["p"] = data.p();
  j["seed"] = seed;
  j["wall_time"] = run.wall_time;
  const std::string text = j.dump(2) + "\n";

  if (!f.trace_out.empty()) {
    std::ostringstream tr;
    tr << "t,live_candidates,inter_ops,excl_ops\n";
    const auto& live = run.solve.trace.live_counts;
    const GeomDiagnostics& d = run.diagnostics;
    for (std::size_t t = 1; t <= data.n(); ++t) {
      tr << t << ',' << (live.empty() ? t : live[t]) << ','
         << (d.inter_ops.empty() ? 0 : d.inter_ops[t]) << ','
         << (d.excl_ops.empty() ? 0 : d.excl_ops[t]) << '\n';
    }
    write_text(f.trace_out, tr.str());
  }
  if (f.out.empty()) {
    out << text;
  } else {
    write_text(f.out, text);
  }
  return kExitOk;
}

int run_simulate(const SimulateFlags& f, std::ostream& out) {
  SimSpec spec;
  spec.n = f.n;
  spec.p = f.p;
  spec.segments = f.segments;
  spec.model = f.model.resolve();
  spec.amplitude = f.amplitude;
  spec.affected_dims = f.affected_dims;
  spec.seed = resolve_seed(f.seed);
  SimData sim = [&] {
    try {
      return generate(spec);
    } catch (const std::invalid_argument& e) {
      throw FlagError(e.what());
    }
  }();

  std::ostringstream data;
  write_matrix_csv(data, sim.data);
  write_text(f.out, data.str());

  std::ostringstream truth;
  truth << "changepoint\n";
  for (std::size_t c : sim.changepoints) truth << c << '\n';
  const std::string truth_path = f.truth.empty() ? f.out + ".truth.csv" : f.truth;
  write_text(truth_path, truth.str());
  out << f.out << '\n' << truth_path << '\n';
  return kExitOk;
}

int run_trace(const GridFlags& f, std::ostream& out, std::ostream& err) {
  const std::vector<std::size_t> ns = parse_counts(f.n_list, "--n-list");
  TraceRequest req;
  req.p_values = parse_counts(f.p_list, "--p-list");
  req.algorithms = parse_configs(f.configs, CostModel::gaussian());
  req.replicates = f.replicates == 0 ? 20 : f.replicates;
  req.seed = resolve_seed(f.seed);
  req.jobs = f.jobs;
  for (std::size_t n : ns) {
    req.n = n;
    const std::string experiment = ns.size() == 1 ? "trace" : "trace-n" + std::to_string(n);
    const TraceTable table = candidate_trace_experiment(req);
    for (const TraceSeries& s : table.series) {
      for (const std::string& e : s.errors) err << "p=" << s.p << ' ' << s.algorithm << ": " << e << '\n';
    }
    for (const std::string& path : write_trace_csv(table, f.out_dir, experiment)) out << path << '\n';
    out << write_trace_summary(table, req, f.out_dir, experiment) << '\n';
  }
  return kExitOk;
}

int run_bench(const GridFlags& f, std::ostream& out, std::ostream& err) {
  const std::vector<std::size_t> ns = parse_counts(f.n_list, "--n-list");
  const std::vector<std::size_t> ps = parse_counts(f.p_list, "--p-list");
  const std::vector<AlgorithmSpec> algos = parse_configs(f.configs, CostModel::gaussian());
  if (!(f.time_cap > 0.0)) throw FlagError("--time-cap must be positive");
  const std::size_t reps = f.replicates == 0 ? 3 : f.replicates;
  const std::uint64_t seed = resolve_seed(f.seed);

  BenchResult result;
  if (!f.segments_list.empty()) {
    if (ns.size() != 1) throw FlagError("a segments sweep takes exactly one value in --n-list");
    SweepRequest req;
    req.n = ns.front();
    req.segment_counts = parse_counts(f.segments_list, "--segments-list");
    req.p_values = ps;
    req.algorithms = algos;
    req.affected_dims = f.affected_dims;
    req.amplitude = f.amplitude;
    req.replicates = reps;
    req.time_cap = f.time_cap;
    req.seed = seed;
    req.jobs = f.jobs;
    for (std::size_t s : req.segment_counts) {
      if (s > req.n) throw FlagError("--segments-list value exceeds n");
    }
    for (std::size_t p : ps) {
      if (f.affected_dims && *f.affected_dims > p) throw FlagError("--affected-dims exceeds p");
    }
    result = segments_sweep(req);
  } else {
    GridRequest req;
    req.n_values = ns;
    req.p_values = ps;
    req.algorithms = algos;
    req.replicates = reps;
    req.time_cap = f.time_cap;
    req.seed = seed;
    req.jobs = f.jobs;
    result = runtime_grid(req);
  }
  for (const BenchRecord& r : result.records) {
    if (!r.error.empty()) {
      err << "n=" << r.n << " p=" << r.p << ' ' << r.algorithm << ": " << r.error << '\n';
    }
  }
  for (const std::string& path : write_bench_csv(result, f.out_dir)) out << path << '\n';
  out << write_bench_summary(result, f.out_dir) << '\n';
  return kExitOk;
}

void add_model_flags(CLI::App* cmd, ModelFlags& m) {
  cmd->add_option("--model", m.model, "gaussian, poisson or negbin")
      ->check(CLI::IsMember({"gaussian", "poisson", "negbin"}));
  cmd->add_option("--phi", m.phi, "negative binomial dispersion");
}

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
  cmd->add_option("--n-list", g.n_list, "comma-separated series lengths (1e4, 2^15 accepted)")
      ->required();
  cmd->add_option("--p-list", g.p_list, "comma-separated dimensions")->required();
  cmd->add_option("--configs", g.configs, "comma-separated algorithm ids");
  cmd->add_option("--replicates", g.replicates);
  cmd->add_option("--time-cap", g.time_cap, "seconds per solve");
  cmd->add_option("--jobs", g.jobs)->check(CLI::PositiveNumber);
  cmd->add_option("--seed", g.seed);
  cmd->add_option("--out-dir", g.out_dir);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multivariate change-point detection with geometric functional pruning"};
  app.name("geomseg");
  app.require_subcommand(1);

  DetectFlags detect;
  CLI::App* detect_cmd = app.add_subcommand("detect", "segment a CSV series");
  detect_cmd->add_option("--input,input", detect.input, "CSV file, one row per time point")
      ->required();
  detect_cmd->add_option("--out", detect.out, "JSON result path (default stdout)");
  detect_cmd->add_option("--trace-out", detect.trace_out, "CSV of live candidates per step");
  add_model_flags(detect_cmd, detect.model);
  detect_cmd->add_option("--sigma", detect.sigma, "noise scale for the default penalty");
  detect_cmd->add_option("--beta", detect.beta, "penalty per segment");
  detect_cmd->add_option("--pruning", detect.pruning)
      ->check(CLI::IsMember({"op", "pelt", "geom-s", "geom-r"}));
  detect_cmd->add_option("--future", detect.future)
      ->check(CLI::IsMember({"all", "last", "last-random"}));
  detect_cmd->add_option("--past", detect.past)->check(CLI::IsMember({"all", "empty", "random"}));
  detect_cmd->add_option("--seed", detect.seed);

  SimulateFlags sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "write a simulated series and its truth");
  sim_cmd->add_option("--n", sim.n)->required()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--p", sim.p)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--segments", sim.segments)->check(CLI::PositiveNumber);
  add_model_flags(sim_cmd, sim.model);
  sim_cmd->add_option("--amplitude", sim.amplitude);
  sim_cmd->add_option("--affected-dims", sim.affected_dims);
  sim_cmd->add_option("--seed", sim.seed);
  sim_cmd->add_option("--out", sim.out, "data CSV path")->required();
  sim_cmd->add_option("--truth", sim.truth, "truth CSV path (default <out>.truth.csv)");

  GridFlags trace;
  CLI::App* trace_cmd = app.add_subcommand("trace", "percentage of stored candidates over time");
  add_grid_flags(trace_cmd, trace);

  GridFlags bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "runtime grid or segments sweep");
  add_grid_flags(bench_cmd, bench);
  bench_cmd->add_option("--segments-list", bench.segments_list,
                        "run a segments sweep at the single n of --n-list");
  bench_cmd->add_option("--affected-dims", bench.affected_dims);
  bench_cmd->add_option("--amplitude", bench.amplitude);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFlags;
  }

  try {
    if (detect_cmd->parsed()) return run_detect(detect, out, err);
    if (sim_cmd->parsed()) return run_simulate(sim, out);
    if (trace_cmd->parsed()) return run_trace(trace, out, err);
    if (bench_cmd->parsed()) return run_bench(bench, out, err);
  } catch (const FlagError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFlags;
  } catch (const DomainError& e) {
    err << "error: " << e.what();
    if (e.row()) err << " (row " << *e.row();
    if (e.column()) err << (e.row() ? ", " : " (") << "column " << *e.column();
    if (e.row() || e.column()) err << ')';
    err << '\n';
    return kExitDomain;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const UnsupportedOperator& e) {
    err << "error: " << e.what() << '\n';
    return kExitFlags;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitFlags;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitFlags;
}

}  // namespace geomseg
