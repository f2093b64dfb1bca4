#include <doctest.h>

#include <cmath>

#include "cavbell/antenna.hpp"
#include "cavbell/error.hpp"

using namespace cavbell;
using namespace cavbell::antenna;

TEST_CASE("product state is a fixed point") {
  const CollapseRun r = collapse_run(fock::basis_state(1, 0, 1), {});
  CHECK(r.outcome == Outcome::zero_one);
  CHECK(r.trajectory.back().step <= 2);
  for (const TrajectoryPoint& p : r.trajectory) CHECK(p.parity_x == 1.0);
}

TEST_CASE("entangled state collapses onto a product branch") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    CollapseConfig cfg;
    cfg.seed = seed;
    const CollapseRun r = collapse_run(fock::beamsplitter_state(1), cfg);
    REQUIRE(r.outcome != Outcome::none);
    const TrajectoryPoint& last = r.trajectory.back();
    CHECK(std::max(last.fidelity_01, last.fidelity_10) > 0.999);
    CHECK(last.parity_x * last.parity_y < 0.0);
    CHECK((r.outcome == Outcome::zero_one) == (last.parity_x > 0));
    CHECK(r.final_state.norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("zero gain leaves parities unchanged") {
  CollapseConfig cfg;
  cfg.gain = 0.0;
  cfg.max_steps = 50;
  const CollapseRun r = collapse_run(fock::beamsplitter_state(1), cfg);
  CHECK(r.outcome == Outcome::none);
  CHECK(r.trajectory.size() == 51);
  for (const TrajectoryPoint& p : r.trajectory) CHECK(std::abs(p.parity_x) <= 1e-15);
}

TEST_CASE("tie at exact zero parity without noise") {
  CollapseConfig cfg;
  cfg.noise_sigma = 0.0;
  const CollapseRun r = collapse_run(fock::beamsplitter_state(1), cfg);
  CHECK(r.trajectory[1].tie);
  CHECK(r.outcome == Outcome::zero_one);
  CHECK_FALSE(r.trajectory.back().tie);
}

TEST_CASE("collapse is monotone once committed at low noise") {
  CollapseConfig cfg;
  cfg.noise_sigma = 0.005;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    cfg.seed = seed;
    const CollapseRun r = collapse_run(fock::beamsplitter_state(1), cfg);
    std::size_t start = 1;
    while (start < r.trajectory.size() && std::abs(r.trajectory[start].parity_x) < 0.05) ++start;
    for (std::size_t k = start + 1; k < r.trajectory.size(); ++k)
      CHECK(std::abs(r.trajectory[k].parity_x) >= std::abs(r.trajectory[k - 1].parity_x) - 1e-15);
  }
}

TEST_CASE("collapse statistics") {
  const CollapseStatistics s = collapse_statistics(fock::beamsplitter_state(1), {}, 200);
  CHECK(s.fraction_none == 0.0);
  CHECK(s.fraction_zero_one >= 0.4);
  CHECK(s.fraction_zero_one <= 0.6);
  CHECK(s.fraction_one_zero >= 0.4);
  CHECK(s.fraction_one_zero <= 0.6);
  CHECK(s.runs.size() == 200);

  const CollapseStatistics fixed = collapse_statistics(fock::basis_state(1, 0, 1), {}, 20);
  CHECK(fixed.fraction_zero_one == 1.0);

  const CollapseStatistics again = collapse_statistics(fock::beamsplitter_state(1), {}, 200);
  for (std::size_t k = 0; k < s.runs.size(); ++k) {
    REQUIRE(s.runs[k].trajectory.size() == again.runs[k].trajectory.size());
    for (std::size_t j = 0; j < s.runs[k].trajectory.size(); ++j)
      CHECK(s.runs[k].trajectory[j].parity_x == again.runs[k].trajectory[j].parity_x);
  }
}

TEST_CASE("feedback on both axes") {
  CollapseConfig cfg;
  cfg.axis = FeedbackAxis::both;
  const CollapseRun r = collapse_run(fock::beamsplitter_state(1), cfg);
  REQUIRE(r.outcome != Outcome::none);
  CHECK(std::abs(r.trajectory.back().parity_y) >= 0.999);
  CHECK(feedback_axis_from_string("both") == FeedbackAxis::both);
}

TEST_CASE("collapse preconditions") {
  CollapseConfig cfg;
  cfg.gain = 0.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.threshold = 1.0;
  CHECK_THROWS_AS(collapse_run(fock::beamsplitter_state(1), cfg), ConfigError);
  CHECK_THROWS_AS(collapse_run(fock::basis_state(2, 2, 0), {}), ConfigError);
  CHECK_THROWS_AS(collapse_statistics(fock::beamsplitter_state(1), {}, 0), ConfigError);
  CHECK_THROWS_AS(feedback_axis_from_string("z"), ConfigError);
}
