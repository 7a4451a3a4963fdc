#include "geomseg/geomfpop.hpp"

#include <algorithm>
#include <stdexcept>

#include "geomseg/errors.hpp"

namespace geomseg {

std::string to_string(PruningKind kind) {
  return kind == PruningKind::SType ? "geom-s" : "geom-r";
}

std::string to_string(FutureSelect f) {
  switch (f) {
    case FutureSelect::All: return "all";
    case FutureSelect::LastOnly: return "last";
    case FutureSelect::LastPlusRandom: return "last-random";
  }
  return "?";
}

std::string to_string(PastSelect p) {
  switch (p) {
    case PastSelect::All: return "all";
    case PastSelect::Empty: return "empty";
    case PastSelect::Random: return "random";
  }
  return "?";
}

std::string PruningConfig::name() const {
  return to_string(kind) + ":" + to_string(future) + ":" + to_string(past);
}

PruningKind parse_pruning_kind(const std::string& s) {
  if (s == "geom-s" || s == "s") return PruningKind::SType;
  if (s == "geom-r" || s == "r") return PruningKind::RType;
  throw std::invalid_argument("unknown pruning kind '" + s + "' (expected geom-s or geom-r)");
}

FutureSelect parse_future_select(const std::string& s) {
  if (s == "all") return FutureSelect::All;
  if (s == "last") return FutureSelect::LastOnly;
  if (s == "last-random") return FutureSelect::LastPlusRandom;
  throw std::invalid_argument("unknown future selection '" + s +
                              "' (expected all, last or last-random)");
}

PastSelect parse_past_select(const std::string& s) {
  if (s == "all") return PastSelect::All;
  if (s == "empty") return PastSelect::Empty;
  if (s == "random") return PastSelect::Random;
  throw std::invalid_argument("unknown past selection '" + s + "' (expected all, empty or random)");
}

void select_future_indices(std::size_t i, std::size_t horizon,
                           std::span<const std::size_t> live_changes, FutureSelect strategy,
                           SelectRng& rng, std::vector<std::size_t>& out) {
  out.clear();
  out.push_back(horizon);
  if (strategy == FutureSelect::LastOnly) return;
  // Live changes from i-1 on; v = i gives the whole space S^i_i.
  const auto first = std::lower_bound(live_changes.begin(), live_changes.end(), i - 1);
  const std::size_t later = static_cast<std::size_t>(live_changes.end() - first);
  if (strategy == FutureSelect::All) {
    for (auto it = first; it != live_changes.end(); ++it) {
      if (*it + 1 < horizon) out.push_back(*it + 1);
    }
    return;
  }
  // One extra draw among these sets and the newest one (which may repeat).
  const std::size_t pick = rng.uniform(later + 1);
  out.push_back(pick < later ? first[static_cast<std::ptrdiff_t>(pick)] + 1 : horizon);
}

void select_past_indices(std::size_t i, std::span<const std::size_t> live_changes,
                         PastSelect strategy, SelectRng& rng, std::vector<std::size_t>& out) {
  out.clear();
  if (strategy == PastSelect::Empty) return;
  const auto end = std::lower_bound(live_changes.begin(), live_changes.end(), i - 1);
  const std::size_t earlier = static_cast<std::size_t>(end - live_changes.begin());
  if (earlier == 0) return;
  if (strategy == PastSelect::All) {
    for (auto it = live_changes.begin(); it != end; ++it) out.push_back(*it + 1);
    return;
  }
  out.push_back(live_changes[rng.uniform(earlier)] + 1);
}

std::vector<SSet> select_future(const SSetContext& ctx, std::size_t i, std::size_t horizon,
                                std::span<const std::size_t> live_changes,
                                FutureSelect strategy, SelectRng& rng) {
  std::vector<std::size_t> idx;
  select_future_indices(i, horizon, live_changes, strategy, rng, idx);
  std::vector<SSet> out;
  out.reserve(idx.size());
  for (std::size_t v : idx) out.push_back(make_sset(i, v, ctx));
  return out;
}

std::vector<SSet> select_past(const SSetContext& ctx, std::size_t i,
                              std::span<const std::size_t> live_changes, PastSelect strategy,
                              SelectRng& rng) {
  std::vector<std::size_t> idx;
  select_past_indices(i, live_changes, strategy, rng, idx);
  std::vector<SSet> out;
  out.reserve(idx.size());
  for (std::size_t u : idx) out.push_back(make_sset(u, i, ctx));
  return out;
}

Hyperrect update_testing_set(const Hyperrect& box, std::span<const SSet> past,
                             std::span<const SSet> future) {
  Hyperrect out = box;
  GeometryScratch ws;
  for (const SSet& s : future) {
    if (out.is_empty()) return out;
    rect_inter_in_place(out, s, ws);
  }
  for (const SSet& s : past) {
    if (out.is_empty()) return out;
    rect_excl_in_place(out, s, ws);
  }
  return out;
}

STestSet update_testing_set(const STestSet& test, std::span<const SSet> past,
                            std::span<const SSet> future) {
  if (test.is_empty()) return test;
  STestSet out = STestSet::full();
  GeometryScratch ws;
  for (const SSet& s : future) {
    if (out.is_empty()) return out;
    out = sset_inter(out, s, ws);
  }
  for (const SSet& s : past) {
    if (out.is_empty()) return out;
    out = sset_excl(out, s, ws);
  }
  return out;
}

namespace {

struct OpCount {
  std::size_t inter = 0;
  std::size_t excl = 0;
};

// Returns true when the candidate's box became empty.
bool sweep_rtype(Hyperrect& box, std::size_t i, std::span<const std::size_t> past,
                 std::span<const std::size_t> future, const SSetContext& ctx,
                 GeometryScratch& ws, OpCount& ops) {
  for (std::size_t v : future) {
    rect_inter_in_place(box, SSet(ctx, i, v), ws);
    ++ops.inter;
    if (box.is_empty()) return true;
  }
  for (std::size_t u : past) {
    rect_excl_in_place(box, SSet(ctx, u, i), ws);
    ++ops.excl;
    if (box.is_empty()) return true;
  }
  return false;
}

bool sweep_stype(std::size_t i, std::span<const std::size_t> past,
                 std::span<const std::size_t> future, const SSetContext& ctx,
                 GeometryScratch& ws, OpCount& ops) {
  STestSet test = STestSet::full();
  for (std::size_t v : future) {
    test = sset_inter(test, SSet(ctx, i, v), ws);
    ++ops.inter;
    if (test.is_empty()) return true;
  }
  for (std::size_t u : past) {
    test = sset_excl(test, SSet(ctx, u, i), ws);
    ++ops.excl;
    if (test.is_empty()) return true;
  }
  return false;
}

}  // namespace

GeomSolveResult geomfpop_solve(const TimeSeriesMatrix& data, double beta,
                               const PruningConfig& config, const GeomOptions& options) {
  const std::size_t n = data.n();
  if (n == 0) throw std::invalid_argument("geomfpop_solve: empty series");
  const bool stype = config.kind == PruningKind::SType;
  if (stype && data.model().kind() != ModelKind::Gaussian) {
    throw UnsupportedOperator("S-type pruning needs the Gaussian model (got " +
                              data.model().name() + ")");
  }

  RunState state(n, beta);
  SSetContext ctx{&data, std::span<const double>(state.qhat), 0};
  SelectRng rng(config.seed);
  GeometryScratch ws;
  std::vector<Hyperrect> boxes;
  std::vector<std::size_t> future;
  std::vector<std::size_t> past;

  GeomSolveResult out;
  SolveResult& result = out.solve;
  const bool trace = options.base.record_trace;
  if (trace) {
    result.trace.live_counts.assign(n + 1, 0);
    result.trace.pruned_at.assign(n + 1, SolveTrace::kNeverPruned);
    out.diagnostics.inter_ops.assign(n + 1, 0);
    out.diagnostics.excl_ops.assign(n + 1, 0);
  }

  std::vector<std::size_t>& live = state.candidates;
  for (std::size_t t = 1; t <= n; ++t) {
    check_deadline(options.base, t);
    live.push_back(t - 1);
    if (!stype) boxes.push_back(Hyperrect::full(data.model(), data.p()));
    best_cost_best_tau(t, state, data);
    ctx.horizon = t + 1;

    OpCount ops;
    std::size_t idx = 0;
    while (idx < live.size()) {
      const std::size_t c = live[idx];
      const std::size_t i = c + 1;
      select_future_indices(i, t + 1, live, config.future, rng, future);
      select_past_indices(i, live, config.past, rng, past);
      const bool emptied = stype ? sweep_stype(i, past, future, ctx, ws, ops)
                                 : sweep_rtype(boxes[idx], i, past, future, ctx, ws, ops);
      if (emptied) {
        if (trace) result.trace.pruned_at[c] = t;
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(idx));
        if (!stype) boxes.erase(boxes.begin() + static_cast<std::ptrdiff_t>(idx));
      } else {
        ++idx;
      }
    }

    if (trace) {
      result.trace.live_counts[t] = live.size();
      out.diagnostics.inter_ops[t] = ops.inter;
      out.diagnostics.excl_ops[t] = ops.excl;
    }
    if (options.base.observer) options.base.observer(t, live);
    if (options.box_observer && !stype) options.box_observer(t, live, boxes);
  }

  result.segmentation = finish_segmentation(state, data);
  result.qhat = std::move(state.qhat);
  return out;
}

}  // namespace geomseg
