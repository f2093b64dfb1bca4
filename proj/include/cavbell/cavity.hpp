#pragma once

// Physical cavity mapping and time evolution of the envelope equation
//   i dpsi/dt = -1/2 lap psi + 1/2 (x^2 + y^2) psi
// in oscillator units (time in 1/omega_tilde, length in oscillator lengths).

#include <functional>
#include <string>
#include <vector>

#include "cavbell/field.hpp"
#include "cavbell/fock.hpp"

namespace cavbell::cavity {

inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kSpeedOfLight = 299792458.0;   // m/s
inline constexpr double kSveaLimit = 0.2;              // omega_tilde / omega0
inline constexpr double kParabolicLimit = 0.1;         // 2 b x^2 / L0

/// Cavity of thickness L(x) = L0 - b x^2 on longitudinal order N_long.
struct CavityParams {
  double L0 = 0.0;          // m
  double b = 0.0;           // 1/m
  int N_long = 1;
  double c = kSpeedOfLight; // m/s

  double omega0 = 0.0;       // N pi c / L0, rad/s
  double omega_tilde = 0.0;  // c sqrt(2 b / L0), rad/s
  double m_eff = 0.0;        // hbar omega0 / c^2, kg
  double gamma_eff = 0.0;    // 2 hbar omega0 b / L0, kg/s^2
  double osc_length = 0.0;   // sqrt(hbar / (m_eff omega_tilde)), m

  double frequency_ratio() const { return omega_tilde / omega0; }
};

/// Throws ConfigError for nonpositive inputs or omega_tilde/omega0 >= 0.2.
CavityParams derive_params(double L0, double b, int N_long, double c = kSpeedOfLight);

struct SveaReport {
  double frequency_ratio = 0.0;     // omega_tilde / omega0
  double max_parabolic_ratio = 0.0; // max over the aperture of 2 b x^2 / L0
  bool svea_ok = false;             // frequency_ratio < 0.2
  bool parabolic_ok = false;        // max_parabolic_ratio < 0.1
  double aperture_half_width = 0.0; // m
};

/// Evaluates both approximations over the grid aperture (grid in oscillator lengths).
SveaReport svea_check(const CavityParams& params, const modes::Grid1D& grid);

/// c[nx][ny] <- c exp(-i (nx + ny + 1) t).
fock::ModeState2D evolve_modes(const fock::ModeState2D& state, double t);

enum class Scheme { mode_exact, split_step };

struct PropagatorConfig {
  double dt = 2.0 * 3.14159265358979323846 / 2000.0;
  int steps = 2000;
  Scheme scheme = Scheme::split_step;
  bool allow_large_dt = false;  // lift the dt <= 0.1 guard
};

inline constexpr double kMaxDefaultDt = 0.1;
inline constexpr double kNormFailure = 1e-6;

/// Strang splitting: half potential phase, kinetic phase in k-space, half
/// potential phase. Holds FFT plans and phase tables for one grid and dt.
class SplitStepPropagator {
 public:
  SplitStepPropagator(const modes::Grid1D& grid, double dt);

  double dt() const noexcept { return dt_; }
  void step(Eigen::MatrixXcd& psi) const;

 private:
  const spectral::SquareFft* fft_;
  double dt_;
  Eigen::MatrixXcd half_potential_;
  Eigen::MatrixXcd kinetic_;  // includes the 1/count^2 transform scaling
};

/// Called after each step with (step index starting at 1, time, field values).
using StepObserver = std::function<void(int, double, const Eigen::MatrixXcd&)>;

/// Integrates config.steps steps of size config.dt. Throws ConfigError for
/// dt > 0.1 without allow_large_dt, NumericError on norm drift > 1e-6.
field::FieldGrid evolve_splitstep(const field::FieldGrid& field, const PropagatorConfig& config,
                                  const StepObserver& observer = {});

/// Evolve by config.scheme: mode_exact projects onto nmax modes, advances
/// phases and resynthesises; split_step integrates on the grid.
field::FieldGrid evolve(const field::FieldGrid& field, const PropagatorConfig& config, int nmax);

// Nodal-line rotation -------------------------------------------------------

/// Orientation of the nodal line of Re psi near the origin, in [0, pi).
/// Fits Re psi ~ a + b x + c y over grid points within `radius`; the zero
/// set of the fitted plane is the nodal line. Throws NumericError when no
/// nodal line passes within `radius` of the origin.
double nodal_angle(const field::FieldGrid& frame, double radius = 2.0);

struct RotationFit {
  double rate = 0.0;       // rad per unit time, counter-clockwise positive
  double offset = 0.0;     // rad
  double residual = 0.0;   // rms of angle - (rate t + offset)
  std::vector<double> angles;  // unwrapped
};

/// Needs >= 4 frames; consecutive frames must rotate by less than pi/2.
RotationFit measure_rotation_rate(const std::vector<field::FieldGrid>& frames,
                                  const std::vector<double>& times, double radius = 2.0);

/// Max |g(p) - f(R(angle)^-1 p)| over grid points p with |p| <= radius,
/// f resampled bilinearly.
double rotation_mismatch(const field::FieldGrid& f, const field::FieldGrid& g, double angle,
                         double radius);

}  // namespace cavbell::cavity
