#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cavbell/cavity.hpp"
#include "cavbell/error.hpp"
#include "oracle.hpp"

using namespace cavbell;
using namespace cavbell::cavity;
using fock::cplx;
using modes::Grid1D;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMicron = 1e-6;

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

field::FieldGrid entangled_field(const Grid1D& g = modes::default_grid()) {
  return field::synthesize(fock::beamsplitter_state(8), g);
}

double period_error(double dt) {
  const field::FieldGrid f = entangled_field();
  const int steps = static_cast<int>(std::lround(2 * kPi / dt));
  const field::FieldGrid out = evolve_splitstep(f, {dt, steps});
  const fock::ModeState2D exact = evolve_modes(fock::beamsplitter_state(8), dt * steps);
  return max_abs(field::project(out, 8).state.coeffs() - exact.coeffs());
}

double energy(const field::FieldGrid& f) {
  return (field::expect_grid(f, field::hamiltonian_form(), field::identity_form()).value +
          field::expect_grid(f, field::identity_form(), field::hamiltonian_form()).value)
      .real();
}

}  // namespace

TEST_CASE("cavity parameter mapping") {
  const CavityParams p = derive_params(2 * kMicron, 0.01 / kMicron, 1);
  CHECK(p.omega_tilde == doctest::Approx(0.1 * kSpeedOfLight / kMicron).epsilon(1e-12));
  CHECK(p.frequency_ratio() == doctest::Approx(0.2 / kPi).epsilon(1e-12));
  CHECK(p.frequency_ratio() == doctest::Approx(0.0637).epsilon(1e-3));
  CHECK(p.omega0 == doctest::Approx(kPi * kSpeedOfLight / (2 * kMicron)));

  const CavityParams flat = derive_params(2 * kMicron, 1e-12, 1);
  CHECK(flat.omega_tilde < 1e-3 * p.omega_tilde);

  const CavityParams doubled = derive_params(2 * kMicron, 0.01 / kMicron, 2);
  CHECK(doubled.omega0 == doctest::Approx(2 * p.omega0));
  CHECK(doubled.omega_tilde == p.omega_tilde);

  CHECK_THROWS_AS(derive_params(-1.0, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(derive_params(1e-6, 0.0, 1), ConfigError);
  // omega_tilde/omega0 = 0.3 needs sqrt(2 b L0) = 0.3 pi
  CHECK_THROWS_WITH_AS(derive_params(1e-6, std::pow(0.3 * kPi, 2) / 2e-6, 1),
                       doctest::Contains("omega_tilde/omega0"), ConfigError);
}

TEST_CASE("SVEA and parabolic checks") {
  const Grid1D g = modes::default_grid();
  const CavityParams p = derive_params(5 * kMicron, 1e-4 / kMicron, 10);
  const SveaReport r = svea_check(p, g);
  CHECK(r.svea_ok);
  CHECK(r.parabolic_ok);
  CHECK(r.aperture_half_width == doctest::Approx(8 * p.osc_length));
  CHECK(r.max_parabolic_ratio ==
        doctest::Approx(2 * p.b * std::pow(8 * p.osc_length, 2) / p.L0).epsilon(1e-12));

  // half extent chosen so that 2 b x^2 / L0 = 0.5 at the edge
  const double edge = std::sqrt(0.5 * p.L0 / (2 * p.b)) / p.osc_length;
  const SveaReport wide = svea_check(p, Grid1D(edge, 64));
  CHECK(wide.max_parabolic_ratio == doctest::Approx(0.5));
  CHECK_FALSE(wide.parabolic_ok);

  CavityParams fast = p;
  fast.omega_tilde = 0.3 * p.omega0;
  CHECK_FALSE(svea_check(fast, g).svea_ok);
}

TEST_CASE("mode propagator") {
  std::mt19937_64 rng(8);
  const fock::ModeState2D s = oracle::random_state(rng, 5, 5);
  CHECK(max_abs(evolve_modes(s, 2 * kPi).coeffs() - s.coeffs()) <= 1e-13);
  const fock::ModeState2D later = evolve_modes(s, 1.234);
  CHECK(max_abs(later.coeffs().cwiseAbs() - s.coeffs().cwiseAbs()) <= 1e-15);

  const fock::ModeState2D ent = fock::beamsplitter_state(3);
  const double t = 0.77;
  CHECK(max_abs(evolve_modes(ent, t).coeffs() - std::polar(1.0, -2 * t) * ent.coeffs()) <= 1e-15);
  const fock::ModeState2D g0 = fock::basis_state(3, 0, 0);
  CHECK(std::abs(std::abs(evolve_modes(g0, t)(0, 0)) - 1.0) <= 1e-15);
}

TEST_CASE("split-step over one period") {
  CHECK(period_error(2 * kPi / 2000) < 1e-5);
}

TEST_CASE("split-step keeps the ground state stationary") {
  const field::FieldGrid f = field::synthesize(fock::basis_state(0, 0, 0), modes::default_grid());
  const field::FieldGrid out = evolve_splitstep(f, {2 * kPi / 2000, 1000});
  CHECK((out.values().cwiseAbs() - f.values().cwiseAbs()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("split-step norm and energy conservation") {
  const field::FieldGrid f = field::synthesize(
      [] {
        std::mt19937_64 rng(4);
        return oracle::random_state(rng, 4, 4);
      }(),
      modes::default_grid());
  const double e0 = energy(f);
  double worst_energy = 0.0;
  field::FieldGrid cur = f;
  for (int block = 0; block < 3; ++block) {
    const field::FieldGrid next = evolve_splitstep(cur, {2 * kPi / 2000, 1000});
    CHECK(std::abs(field::norm(next) - field::norm(cur)) < 1e-10);
    worst_energy = std::max(worst_energy, std::abs(energy(next) - e0));
    cur = next;
  }
  CHECK(worst_energy < 1e-6);
}

TEST_CASE("split-step mode magnitudes over a period") {
  std::mt19937_64 rng(6);
  const fock::ModeState2D s = oracle::random_state(rng, 4, 4);
  const field::FieldGrid out =
      evolve_splitstep(field::synthesize(s, modes::default_grid()), {2 * kPi / 2000, 2000});
  const fock::ModeState2D p = field::project(out, 4).state;
  CHECK(max_abs(p.coeffs().cwiseAbs().cast<cplx>() - s.coeffs().cwiseAbs().cast<cplx>()) < 1e-6);
}

TEST_CASE("Strang splitting is second order") {
  const double coarse = period_error(2 * kPi / 200);
  const double fine = period_error(2 * kPi / 400);
  const double ratio = coarse / fine;
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("displaced Gaussian follows the classical orbit") {
  const Grid1D g = modes::default_grid();
  const double x0 = 1.5;
  Eigen::MatrixXcd v(g.count(), g.count());
  for (int i = 0; i < g.count(); ++i)
    for (int j = 0; j < g.count(); ++j)
      v(i, j) = modes::hg_mode(0, g.point(i) - x0) * modes::hg_mode(0, g.point(j));
  const field::FieldGrid f(g, v);
  const double dt = 2 * kPi / 2000;
  const double h2 = g.spacing() * g.spacing();
  double worst = 0.0;
  evolve_splitstep(f, {dt, 2000}, [&](int step, double t, const Eigen::MatrixXcd& psi) {
    if (step % 125) return;
    double mean_x = 0.0;
    for (int i = 0; i < g.count(); ++i) mean_x += g.point(i) * psi.row(i).squaredNorm();
    worst = std::max(worst, std::abs(h2 * mean_x - x0 * std::cos(t)));
  });
  CHECK(worst < 1e-5);  // Strang error at this dt is a few 1e-6
}

TEST_CASE("propagator guards") {
  const field::FieldGrid f = entangled_field();
  CHECK_THROWS_AS(evolve_splitstep(f, {0.2, 1}), ConfigError);
  CHECK_NOTHROW(evolve_splitstep(f, {0.2, 1, Scheme::split_step, true}));
  CHECK_THROWS_AS(evolve_splitstep(f, {-0.01, 1}), ConfigError);
  const field::FieldGrid m = evolve(f, {0.05, 10, Scheme::mode_exact}, 8);
  const fock::ModeState2D exact = evolve_modes(fock::beamsplitter_state(8), 0.5);
  CHECK(max_abs(field::project(m, 8).state.coeffs() - exact.coeffs()) <= 1e-10);
}

TEST_CASE("nodal line rotation") {
  const Grid1D g = modes::default_grid();
  const fock::ModeState2D s = fock::beamsplitter_state(1);
  std::vector<field::FieldGrid> frames;
  std::vector<double> times;
  for (int k = 0; k < 32; ++k) {
    times.push_back(k * 4 * kPi / 31);
    frames.push_back(field::synthesize(evolve_modes(s, times.back()), g));
  }
  // Re psi = (y cos 2t + x sin 2t) e^{-r^2/2}/sqrt(pi): nodal line along x at t = 0
  CHECK(nodal_angle(frames[0]) == doctest::Approx(0.0));
  const RotationFit fit = measure_rotation_rate(frames, times);
  CHECK(fit.rate == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(fit.residual < 1e-3);

  std::vector<field::FieldGrid> rev(frames.rbegin(), frames.rend());
  CHECK(measure_rotation_rate(rev, times).rate == doctest::Approx(2.0).epsilon(1e-10));

  // split-step frames rotate at the same rate
  std::vector<field::FieldGrid> ss{frames[0]};
  std::vector<double> ts{0.0};
  const double span = 4 * kPi / 31;
  const int per = 20;
  evolve_splitstep(field::synthesize(s, g), {span / per, per * 31},
                   [&](int step, double, const Eigen::MatrixXcd& psi) {
                     if (step % per == 0) {
                       ss.emplace_back(g, psi);
                       ts.push_back((step / per) * span);
                     }
                   });
  const RotationFit ssfit = measure_rotation_rate(ss, ts);
  CHECK(std::abs(ssfit.rate / fit.rate - 1.0) < 1e-3);

  std::vector<field::FieldGrid> ground(4, field::synthesize(fock::basis_state(1, 0, 0), g));
  CHECK_THROWS_AS(measure_rotation_rate(ground, {0, 1, 2, 3}), NumericError);
  CHECK_THROWS_AS(measure_rotation_rate({frames[0], frames[1]}, {0, 1}), ConfigError);
}

TEST_CASE("rotated frames coincide") {
  const Grid1D fine(4.0, 512);
  const fock::ModeState2D s = fock::beamsplitter_state(1);
  const field::FieldGrid f0 = field::synthesize(s, fine);
  for (double phase : {kPi / 4, 3 * kPi / 4, 5 * kPi / 4}) {
    const field::FieldGrid ft = field::synthesize(evolve_modes(s, phase / 2), fine);
    CHECK(rotation_mismatch(f0, ft, -phase, fine.last()) < 1e-4);
  }
  // the wrong sense of rotation is far off
  const field::FieldGrid quarter = field::synthesize(evolve_modes(s, kPi / 8), fine);
  CHECK(rotation_mismatch(f0, quarter, kPi / 4, fine.last()) > 1e-2);
}
