#include <cmath>
#include <sstream>

#include "cavbell/antenna.hpp"
#include "cavbell/error.hpp"
#include "cavbell/random.hpp"

namespace cavbell::antenna {

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::zero_one: return "zero_one";
    case Outcome::one_zero: return "one_zero";
    case Outcome::none: return "none";
  }
  return "none";
}

std::string to_string(FeedbackAxis axis) {
  switch (axis) {
    case FeedbackAxis::x: return "x";
    case FeedbackAxis::y: return "y";
    case FeedbackAxis::both: return "both";
  }
  return "x";
}

FeedbackAxis feedback_axis_from_string(const std::string& name) {
  if (name == "x") return FeedbackAxis::x;
  if (name == "y") return FeedbackAxis::y;
  if (name == "both") return FeedbackAxis::both;
  throw ConfigError("unknown feedback axis '" + name + "' (expected x, y or both)");
}

void CollapseConfig::validate() const {
  std::ostringstream msg;
  if (!(gain >= 0.0) || gain > max_gain) {
    msg << "collapse gain " << gain << " must lie in [0, " << max_gain << "]";
  } else if (!(noise_sigma >= 0.0)) {
    msg << "collapse noise_sigma must be nonnegative";
  } else if (max_steps < 1) {
    msg << "collapse max_steps must be at least 1";
  } else if (!(threshold > 0.0 && threshold < 1.0)) {
    msg << "collapse threshold " << threshold << " must lie in (0, 1)";
  } else {
    return;
  }
  throw ConfigError(msg.str());
}

namespace {

double parity(const fock::ModeState2D& s, fock::Axis axis) {
  return fock::axis_reduced_expectation(s, fock::parity_op(s.nmax()), axis).real();
}

TrajectoryPoint observe(const fock::ModeState2D& s, int step, bool tie) {
  return {step,
          parity(s, fock::Axis::x),
          parity(s, fock::Axis::y),
          std::norm(s(0, 1)),
          std::norm(s(1, 0)),
          tie};
}

bool settled(const TrajectoryPoint& p, FeedbackAxis axis, double threshold) {
  switch (axis) {
    case FeedbackAxis::x: return std::abs(p.parity_x) >= threshold;
    case FeedbackAxis::y: return std::abs(p.parity_y) >= threshold;
    case FeedbackAxis::both:
      return std::abs(p.parity_x) >= threshold && std::abs(p.parity_y) >= threshold;
  }
  return false;
}

// exp(g Pi) is diag(e^{+g}, e^{-g}, e^{+g}, ...) on one axis.
void apply_gain(Eigen::MatrixXcd& c, double g, fock::Axis axis) {
  for (int n = 0; n < c.rows(); ++n) {
    const double w = std::exp(n % 2 == 0 ? g : -g);
    if (axis == fock::Axis::x) {
      c.row(n) *= w;
    } else {
      c.col(n) *= w;
    }
  }
}

}  // namespace

CollapseRun collapse_run(const fock::ModeState2D& state, const CollapseConfig& config) {
  config.validate();
  if (state.nmax() < 1) throw ConfigError("collapse needs nmax >= 1");
  for (int nx = 0; nx <= state.nmax(); ++nx) {
    for (int ny = 0; ny <= state.nmax(); ++ny) {
      if ((nx > 1 || ny > 1) && std::abs(state(nx, ny)) > 1e-12) {
        throw ConfigError("collapse state must be supported on n <= 1 on each axis");
      }
    }
  }

  CollapseRun run;
  fock::ModeState2D current = state.normalized();
  RandomStream rng(config.seed);
  run.trajectory.push_back(observe(current, 0, false));

  for (int step = 1; step <= config.max_steps; ++step) {
    if (settled(run.trajectory.back(), config.axis, config.threshold)) break;
    Eigen::MatrixXcd c = current.coeffs();
    bool tie = false;
    const auto feed = [&](fock::Axis axis) {
      const double reading = parity(current, axis) + config.noise_sigma * rng.normal();
      if (reading == 0.0) tie = true;
      apply_gain(c, reading >= 0.0 ? config.gain : -config.gain, axis);
    };
    if (config.axis != FeedbackAxis::y) feed(fock::Axis::x);
    if (config.axis != FeedbackAxis::x) feed(fock::Axis::y);
    current = fock::ModeState2D(std::move(c)).normalized();
    run.trajectory.push_back(observe(current, step, tie));
  }

  const TrajectoryPoint& last = run.trajectory.back();
  if (settled(last, config.axis, config.threshold)) {
    run.outcome = last.parity_x > 0.0 ? Outcome::zero_one
                  : last.parity_x < 0.0 ? Outcome::one_zero
                                        : Outcome::none;
  }
  run.final_state = current;
  return run;
}

CollapseStatistics collapse_statistics(const fock::ModeState2D& state, const CollapseConfig& config,
                                       int runs) {
  if (runs < 1) throw ConfigError("collapse statistics need at least one run");
  CollapseStatistics stats;
  stats.runs.reserve(runs);
  int zero_one = 0;
  int one_zero = 0;
  for (int k = 0; k < runs; ++k) {
    CollapseConfig cfg = config;
    cfg.seed = derive_seed(config.seed, static_cast<std::uint64_t>(k));
    CollapseRun r = collapse_run(state, cfg);
    if (r.outcome == Outcome::zero_one) ++zero_one;
    if (r.outcome == Outcome::one_zero) ++one_zero;
    stats.runs.push_back(std::move(r));
  }
  stats.fraction_zero_one = double(zero_one) / runs;
  stats.fraction_one_zero = double(one_zero) / runs;
  stats.fraction_none = double(runs - zero_one - one_zero) / runs;
  return stats;
}

}  // namespace cavbell::antenna
