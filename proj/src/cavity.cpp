#include "cavbell/cavity.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "cavbell/error.hpp"

namespace cavbell::cavity {

using fock::cplx;

CavityParams derive_params(double L0, double b, int N_long, double c) {
  if (!(L0 > 0.0) || !(b > 0.0) || N_long <= 0 || !(c > 0.0)) {
    throw ConfigError("cavity parameters L0, b, N_long, c must all be positive");
  }
  CavityParams p;
  p.L0 = L0;
  p.b = b;
  p.N_long = N_long;
  p.c = c;
  // omega0^2 / c^2 = N^2 pi^2 / L0^2, so omega0 carries the factor c.
  p.omega0 = N_long * std::numbers::pi * c / L0;
  p.omega_tilde = c * std::sqrt(2.0 * b / L0);
  p.m_eff = kHbar * p.omega0 / (c * c);
  p.gamma_eff = 2.0 * kHbar * p.omega0 * b / L0;
  p.osc_length = std::sqrt(kHbar / (p.m_eff * p.omega_tilde));
  if (!(p.frequency_ratio() < kSveaLimit)) {
    std::ostringstream msg;
    msg << "slowly varying envelope condition violated: omega_tilde/omega0 = "
        << p.frequency_ratio() << " must be < " << kSveaLimit;
    throw ConfigError(msg.str());
  }
  return p;
}

SveaReport svea_check(const CavityParams& params, const modes::Grid1D& grid) {
  SveaReport r;
  r.frequency_ratio = params.frequency_ratio();
  r.aperture_half_width = grid.half_extent() * params.osc_length;
  r.max_parabolic_ratio =
      2.0 * params.b * r.aperture_half_width * r.aperture_half_width / params.L0;
  r.svea_ok = r.frequency_ratio < kSveaLimit;
  r.parabolic_ok = r.max_parabolic_ratio < kParabolicLimit;
  return r;
}

fock::ModeState2D evolve_modes(const fock::ModeState2D& state, double t) {
  Eigen::MatrixXcd c = state.coeffs();
  for (int nx = 0; nx <= state.nmax(); ++nx) {
    for (int ny = 0; ny <= state.nmax(); ++ny) {
      c(nx, ny) *= std::polar(1.0, -(nx + ny + 1) * t);
    }
  }
  return fock::ModeState2D(std::move(c));
}

SplitStepPropagator::SplitStepPropagator(const modes::Grid1D& grid, double dt)
    : fft_(&field::fft_for(grid.count())), dt_(dt) {
  const int n = grid.count();
  const Eigen::VectorXd x = grid.points();
  const Eigen::VectorXd k = grid.wavenumbers();
  const double scale = 1.0 / (double(n) * n);
  half_potential_.resize(n, n);
  kinetic_.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double v = 0.5 * (x[i] * x[i] + x[j] * x[j]);
      const double kin = 0.5 * (k[i] * k[i] + k[j] * k[j]);
      half_potential_(i, j) = std::polar(1.0, -0.5 * dt * v);
      kinetic_(i, j) = std::polar(scale, -dt * kin);
    }
  }
}

void SplitStepPropagator::step(Eigen::MatrixXcd& psi) const {
  psi.array() *= half_potential_.array();
  fft_->forward2d(psi);
  psi.array() *= kinetic_.array();
  fft_->backward2d(psi);
  psi.array() *= half_potential_.array();
}

field::FieldGrid evolve_splitstep(const field::FieldGrid& field, const PropagatorConfig& config,
                                  const StepObserver& observer) {
  if (!(config.dt > 0.0)) throw ConfigError("propagator dt must be positive");
  if (config.steps < 0) throw ConfigError("propagator steps must be nonnegative");
  if (config.dt > kMaxDefaultDt && !config.allow_large_dt) {
    std::ostringstream msg;
    msg << "propagator dt = " << config.dt << " exceeds " << kMaxDefaultDt
        << " (in units of 1/omega_tilde); set allow_large_dt to override";
    throw ConfigError(msg.str());
  }
  const SplitStepPropagator prop(field.grid(), config.dt);
  const double initial = field::norm(field);
  Eigen::MatrixXcd psi = field.values();
  const double h = field.grid().spacing();
  for (int s = 1; s <= config.steps; ++s) {
    prop.step(psi);
    if (observer) observer(s, s * config.dt, psi);
    if (s % 100 == 0 || s == config.steps) {
      const double current = h * psi.norm();
      if (!std::isfinite(current) || std::abs(current - initial) > kNormFailure * initial) {
        std::ostringstream msg;
        msg << "split-step integrator failure: norm drifted from " << initial << " to " << current
            << " after " << s << " steps";
        throw NumericError(msg.str());
      }
    }
  }
  return field::FieldGrid(field.grid(), std::move(psi));
}

field::FieldGrid evolve(const field::FieldGrid& field, const PropagatorConfig& config, int nmax) {
  if (config.scheme == Scheme::split_step) return evolve_splitstep(field, config);
  const field::Projection proj = field::project(field, nmax);
  return field::synthesize(evolve_modes(proj.state, config.dt * config.steps), field.grid());
}

}  // namespace cavbell::cavity
