#include "merw/engines.hpp"

#include <ostream>
#include <stdexcept>

namespace merw {

WalkState WalkState::initial(int d, bool with_history) {
  WalkState state;
  state.n = 0;
  state.position.assign(d, 0);
  state.counts = DirectionCounts::zero(d);
  if (with_history) state.history.emplace();
  return state;
}

void WalkState::record_step(const SignedDirection& dir) {
  position[dir.axis - 1] += dir.sign;
  counts.add(dir);
  n += 1;
  if (history) history->push_back(static_cast<std::uint8_t>(dir.code()));
}

SignedDirection first_step(const WalkConfig& config, RngStream& rng) {
  const int d = config.d;
  if (config.first_step.kind == FirstStepLaw::Kind::Uniform) {
    return SignedDirection::from_code(static_cast<int>(rng.uniform_below(2 * d)));
  }
  const double q = config.first_step.q;
  const double u = rng.uniform01();
  if (u < q) return SignedDirection{1, +1};
  // Remaining mass split evenly over the other 2d-1 directions, canonical order.
  int idx = static_cast<int>((u - q) / (1.0 - q) * (2 * d - 1));
  if (idx > 2 * d - 2) idx = 2 * d - 2;
  return SignedDirection::from_code(idx + 1);
}

void advance_full(WalkState& state, double p, RngStream& rng) {
  if (!state.history)
    throw std::logic_error("advance_full: history is required by the full engine");
  if (state.n < 1) throw std::logic_error("advance_full: no steps taken yet");
  const int d = state.counts.d;
  const std::uint64_t k = rng.uniform_below(state.n);  // remembered time k+1
  const SignedDirection recalled = SignedDirection::from_code((*state.history)[k]);

  const double u = rng.uniform01();
  int power = 0;
  int sign = +1;
  if (u >= p) {
    // Non-identity matrices in fixed order: (0,-1), (1,+1), (1,-1), ..., (d-1,+1), (d-1,-1).
    int idx = static_cast<int>((u - p) / (1.0 - p) * (2 * d - 1));
    if (idx > 2 * d - 2) idx = 2 * d - 2;
    if (idx == 0) {
      power = 0;
      sign = -1;
    } else {
      power = (idx + 1) / 2;
      sign = (idx % 2 == 1) ? +1 : -1;
    }
  }
  state.record_step(apply_matrix(power, sign, recalled, d));
}

void advance_reduced(WalkState& state, double p, RngStream& rng) {
  if (state.n < 1) throw std::logic_error("advance_reduced: no steps taken yet");
  const int d = state.counts.d;
  const double n = static_cast<double>(state.n);
  const double off = 1.0 - p;
  const double repeat = p * (2.0 * d - 1.0);
  // Integer-weighted inverse CDF: w_j = p(2d-1) c_j + (1-p)(n - c_j), total (2d-1) n.
  const double target = rng.uniform01() * (2.0 * d - 1.0) * n;
  double acc = 0.0;
  int code = 2 * d - 1;
  for (int j = 0; j < 2 * d; ++j) {
    const double c = static_cast<double>(state.counts.counts[j]);
    acc += repeat * c + off * (n - c);
    if (target < acc) {
      code = j;
      break;
    }
  }
  state.record_step(SignedDirection::from_code(code));
}

Trajectory simulate(const WalkConfig& config, Engine engine, RngStream& rng,
                    const RecordPolicy& record) {
  config.validate();
  if (record.kind == RecordPolicy::Kind::Checkpoints && record.stride == 0)
    throw std::invalid_argument("simulate: checkpoint stride must be >= 1");

  Trajectory traj;
  traj.d = config.d;
  traj.horizon = config.horizon;

  WalkState state = WalkState::initial(config.d, engine == Engine::Full);
  const auto maybe_record = [&](std::uint64_t step) {
    const bool take = record.kind == RecordPolicy::Kind::Positions ||
                      (record.kind == RecordPolicy::Kind::Checkpoints &&
                       (step % record.stride == 0 || step == config.horizon));
    if (!take) return;
    traj.steps.push_back(step);
    traj.positions.insert(traj.positions.end(), state.position.begin(), state.position.end());
  };

  state.record_step(first_step(config, rng));
  maybe_record(1);
  for (std::uint64_t step = 2; step <= config.horizon; ++step) {
    if (engine == Engine::Full) {
      advance_full(state, config.p, rng);
    } else {
      advance_reduced(state, config.p, rng);
    }
    maybe_record(step);
  }
  traj.final_state = std::move(state);
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "step";
  for (int i = 1; i <= traj.d; ++i) out << ",s" << i;
  out << "\n";
  for (std::size_t row = 0; row < traj.steps.size(); ++row) {
    out << traj.steps[row];
    for (int i = 1; i <= traj.d; ++i) out << "," << traj.at(row, i);
    out << "\n";
  }
  if (traj.steps.empty()) {
    out << traj.horizon;
    for (int i = 1; i <= traj.d; ++i) out << "," << traj.final_state.position[i - 1];
    out << "\n";
  }
}

}  // namespace merw
