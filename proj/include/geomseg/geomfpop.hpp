#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "geomseg/dp_engine.hpp"
#include "geomseg/sset_geometry.hpp"

namespace geomseg {

/// Testing-set geometry: S-type (carried ball, Gaussian only) or R-type (box).
enum class PruningKind { SType, RType };
/// Which future sets S^i_v (v = i..t) enter the intersection step.
/// Every choice includes the newest set S^i_t.
enum class FutureSelect { All, LastOnly, LastPlusRandom };
/// Which past sets S^u_i (u < i) enter the exclusion step.
enum class PastSelect { All, Empty, Random };

struct PruningConfig {
  PruningKind kind = PruningKind::RType;
  FutureSelect future = FutureSelect::All;
  PastSelect past = PastSelect::All;
  std::uint64_t seed = 0;

  /// "geom-r:all:all", "geom-s:last-random:random", ...
  std::string name() const;
};

std::string to_string(PruningKind kind);
std::string to_string(FutureSelect f);
std::string to_string(PastSelect p);
PruningKind parse_pruning_kind(const std::string& s);   // "geom-s" | "geom-r" | "s" | "r"
FutureSelect parse_future_select(const std::string& s);  // all | last | last-random
PastSelect parse_past_select(const std::string& s);      // all | empty | random

/// Random stream for the select strategies; one per solve.
class SelectRng {
 public:
  explicit SelectRng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on {0, ..., n-1}; n > 0.
  std::size_t uniform(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

// Selection works on the sorted list of live change indices. Candidate i
// (change i-1) sees future sets S^i_v for live changes v-1 >= i-1 plus the
// newest set S^i_horizon, and past sets S^u_i for live changes u-1 < i-1.
// Within one step the newest set is applied first, so horizon = i yields
// only the whole space.

/// End indices v of the chosen future sets, newest (v = horizon) first.
void select_future_indices(std::size_t i, std::size_t horizon,
                           std::span<const std::size_t> live_changes, FutureSelect strategy,
                           SelectRng& rng, std::vector<std::size_t>& out);
/// Start indices u of the chosen past sets.
void select_past_indices(std::size_t i, std::span<const std::size_t> live_changes,
                         PastSelect strategy, SelectRng& rng, std::vector<std::size_t>& out);

std::vector<SSet> select_future(const SSetContext& ctx, std::size_t i, std::size_t horizon,
                                std::span<const std::size_t> live_changes,
                                FutureSelect strategy, SelectRng& rng);
std::vector<SSet> select_past(const SSetContext& ctx, std::size_t i,
                              std::span<const std::size_t> live_changes, PastSelect strategy,
                              SelectRng& rng);

/// Applies every future set with the intersection operator, then every past
/// set with the exclusion operator.
Hyperrect update_testing_set(const Hyperrect& box, std::span<const SSet> past,
                             std::span<const SSet> future);
/// S-type variant. Only emptiness carries over between steps: the result is
/// rebuilt from the full space, so the first future set (the newest one)
/// becomes the carried ball.
STestSet update_testing_set(const STestSet& test, std::span<const SSet> past,
                            std::span<const SSet> future);

struct GeomDiagnostics {
  std::vector<std::size_t> inter_ops;  // per step t
  std::vector<std::size_t> excl_ops;
};

struct GeomSolveResult {
  SolveResult solve;
  GeomDiagnostics diagnostics;
};

struct GeomOptions {
  SolveOptions base;
  /// R-type only: called after the sweep of step t with the live changes and
  /// their testing boxes (same order).
  std::function<void(std::size_t t, std::span<const std::size_t> live,
                     std::span<const Hyperrect> boxes)>
      box_observer;
};

/// Exact penalised segmentation with geometric functional pruning.
/// After Qhat_t is known, each live candidate's testing set is updated against
/// the sets available at horizon t+1 and the candidate is dropped once it empties.
GeomSolveResult geomfpop_solve(const TimeSeriesMatrix& data, double beta,
                               const PruningConfig& config, const GeomOptions& options = {});

}  // namespace geomseg
