#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "merw/model.hpp"
#include "merw/rng.hpp"

namespace merw {

// Full walk state.  `history` is engaged only by the full-history engine;
// the reduced engine keeps O(d) state regardless of the horizon.
struct WalkState {
  std::uint64_t n = 0;
  std::vector<std::int64_t> position;          // S_n
  DirectionCounts counts;                      // sufficient statistic
  std::optional<std::vector<std::uint8_t>> history;  // direction codes, full engine only

  static WalkState initial(int d, bool with_history);
  void record_step(const SignedDirection& dir);
};

enum class Engine { Full, Reduced };

struct RecordPolicy {
  enum class Kind { FinalOnly, Positions, Checkpoints } kind = Kind::FinalOnly;
  std::uint64_t stride = 0;  // Checkpoints only

  static RecordPolicy final_only() { return {Kind::FinalOnly, 0}; }
  static RecordPolicy positions() { return {Kind::Positions, 0}; }
  static RecordPolicy checkpoints(std::uint64_t stride) { return {Kind::Checkpoints, stride}; }
};

// Recorded trajectory.  `steps[i]` is the step index of row i; `positions`
// holds d integers per recorded row.  Positions mode records every step
// 1..horizon, so steps is then simply 1,2,...,horizon.
struct Trajectory {
  int d = 1;
  std::uint64_t horizon = 0;
  std::vector<std::uint64_t> steps;
  std::vector<std::int64_t> positions;  // steps.size() * d, row-major
  WalkState final_state;

  bool has_full_positions() const {
    return steps.size() == horizon && (steps.empty() || (steps.front() == 1 && steps.back() == horizon));
  }
  std::int64_t at(std::size_t row, int axis) const { return positions[row * d + (axis - 1)]; }
};

// Draw the first step.  Uniform: each of the 2d directions with probability
// 1/(2d).  Biased(q): +e1 with probability q, every other direction with
// probability (1-q)/(2d-1).  Exactly one uniform draw.
SignedDirection first_step(const WalkConfig& config, RngStream& rng);

// Literal step law: draws the remembered time k uniformly on {1..n}, then the
// signed permutation matrix (identity with probability p, each of the other
// 2d-1 with probability (1-p)/(2d-1)), and appends matrix * X_k.
// Two draws per step, in that fixed order.  Requires engaged history.
void advance_full(WalkState& state, double p, RngStream& rng);

// Sufficient-statistic step: samples step_distribution(counts, p) by
// inverse CDF over the canonical direction order.  One draw per step.
void advance_reduced(WalkState& state, double p, RngStream& rng);

Trajectory simulate(const WalkConfig& config, Engine engine, RngStream& rng,
                    const RecordPolicy& record);

// Trajectory CSV: header "step,s1,...,sd", one row per recorded step, LF endings.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace merw
