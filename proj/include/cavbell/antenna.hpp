#pragma once

// Discrete-site field measurement: sampling plans, noisy readings,
// least-squares mode reconstruction and CHSH estimation from samples.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cavbell/field.hpp"
#include "cavbell/fock.hpp"

namespace cavbell::antenna {

using fock::cplx;

enum class Layout { uniform_grid, random_uniform, halton, explicit_sites };

std::string to_string(Layout layout);
/// Throws ConfigError for an unknown name.
Layout layout_from_string(const std::string& name);

struct Site {
  double x = 0.0;
  double y = 0.0;
};

struct SamplePlan {
  std::vector<Site> sites;
  Layout layout = Layout::explicit_sites;
  std::uint64_t seed = 0;

  int count() const noexcept { return static_cast<int>(sites.size()); }
  std::string describe() const;
};

/// Generates M sites inside [-aperture, aperture]^2 snapped to nodes of
/// `grid`. uniform_grid needs M to be a perfect square.
SamplePlan make_plan(Layout layout, int M, double aperture, std::uint64_t seed,
                     const modes::Grid1D& grid);

struct AntennaReading {
  Site site;
  cplx value;
  double noise_sigma = 0.0;
};

/// Bilinear field value at each site plus complex Gaussian noise with
/// independent real and imaginary parts of std noise_sigma, drawn from a
/// stream seeded by plan.seed.
std::vector<AntennaReading> sample(const field::FieldGrid& field, const SamplePlan& plan,
                                   double noise_sigma);

struct Reconstruction {
  fock::ModeState2D state;  // normalised
  double condition_number = 0.0;
};

inline constexpr double kMaxConditionNumber = 1e8;

/// Least-squares fit of mode coefficients to the readings. Throws
/// ConfigError when M < (nmax+1)^2 and IllPosedError when the design
/// matrix condition number exceeds 1e8.
Reconstruction reconstruct(const std::vector<AntennaReading>& readings, int nmax,
                           const std::string& plan_name = "explicit");

/// Reconstruct, then evaluate fock::chsh_value.
double chsh_from_samples(const std::vector<AntennaReading>& readings, int nmax,
                         const fock::ChshSettings& settings);

struct StudyOptions {
  Layout layout = Layout::uniform_grid;
  double aperture = 4.0;
  int nmax = 3;
  std::uint64_t seed = 1;
  fock::ChshSettings settings;
};

struct ConvergenceRow {
  int M = 0;
  int trials = 0;
  double mean_error = 0.0;
  std::optional<double> std_error;  // absent for a single trial
  double mean_condition = 0.0;
};

struct ConvergenceReport {
  double oracle = 0.0;
  double noise_sigma = 0.0;
  std::vector<ConvergenceRow> rows;
  std::optional<double> slope;  // log-log fit of mean_error vs M
};

/// For each M, mean and std of |CHSH_est - CHSH_oracle| over `trials`
/// seeded trials. M_list must be ascending; the oracle is chsh_value on the
/// field's projection at options.nmax.
ConvergenceReport convergence_study(const field::FieldGrid& field, const std::vector<int>& M_list,
                                    double noise_sigma, int trials, const StudyOptions& options);

struct ViolationStudy {
  std::vector<double> estimates;  // one per seed, seed order
  double mean = 0.0;
  double percentile05 = 0.0;
};

ViolationStudy violation_study(const field::FieldGrid& field, int M, double noise_sigma, int seeds,
                               const StudyOptions& options);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Parity-feedback collapse ---------------------------------------------------

enum class Outcome { zero_one, one_zero, none };
enum class FeedbackAxis { x, y, both };

std::string to_string(Outcome outcome);
std::string to_string(FeedbackAxis axis);
FeedbackAxis feedback_axis_from_string(const std::string& name);

struct CollapseConfig {
  double gain = 0.1;
  double noise_sigma = 0.05;
  int max_steps = 10000;
  double threshold = 0.999;
  std::uint64_t seed = 1;
  FeedbackAxis axis = FeedbackAxis::x;
  double max_gain = 0.2;

  /// Throws ConfigError naming the violated bound.
  void validate() const;
};

struct TrajectoryPoint {
  int step = 0;
  double parity_x = 0.0;
  double parity_y = 0.0;
  double fidelity_01 = 0.0;  // |<0_x 1_y|psi>|^2
  double fidelity_10 = 0.0;  // |<1_x 0_y|psi>|^2
  bool tie = false;          // feedback sign taken from an exact zero signal
};

struct CollapseRun {
  std::vector<TrajectoryPoint> trajectory;
  Outcome outcome = Outcome::none;
  fock::ModeState2D final_state{1};
};

/// Repeats: read <Pi> on the feedback axis plus Gaussian noise, multiply by
/// exp(gain sign(reading) Pi) on that axis, renormalise. Stops once
/// |<Pi>| >= threshold on the feedback axis (both axes for `both`). The
/// outcome is zero_one when <Pi_x> > 0 at termination, one_zero when < 0.
/// sign(0) = +1 and the point is flagged as a tie.
CollapseRun collapse_run(const fock::ModeState2D& state, const CollapseConfig& config);

struct CollapseStatistics {
  double fraction_zero_one = 0.0;
  double fraction_one_zero = 0.0;
  double fraction_none = 0.0;
  std::vector<CollapseRun> runs;  // run k seeded with derive_seed(config.seed, k)
};

CollapseStatistics collapse_statistics(const fock::ModeState2D& state, const CollapseConfig& config,
                                       int runs);

}  // namespace cavbell::antenna
