#pragma once

// Hermite polynomials and harmonic-oscillator eigenfunctions in oscillator
// units (hbar = m = omega = 1), so the scaled coordinate is just x.

#include <Eigen/Dense>

namespace cavbell::modes {

/// Uniform cell-centred grid on [-half_extent, half_extent):
/// x_i = -half_extent + (i + 1/2) * spacing. Index i and count-1-i are
/// mirror images, so parity is an exact index reflection.
class Grid1D {
 public:
  /// Throws ConfigError unless half_extent > 0 and count is positive and even.
  Grid1D(double half_extent, int count);

  double half_extent() const noexcept { return half_extent_; }
  int count() const noexcept { return count_; }
  double spacing() const noexcept { return 2.0 * half_extent_ / count_; }
  double point(int i) const noexcept { return -half_extent_ + (i + 0.5) * spacing(); }
  double first() const noexcept { return point(0); }
  double last() const noexcept { return point(count_ - 1); }

  Eigen::VectorXd points() const;

  /// Angular wavenumbers in FFT order (0, 1, ..., n/2-1, -n/2, ..., -1) * 2pi/length.
  Eigen::VectorXd wavenumbers() const;

  bool operator==(const Grid1D&) const = default;

 private:
  double half_extent_;
  int count_;
};

/// Default numeric domain: +-8 oscillator lengths, 256 points.
inline Grid1D default_grid() { return Grid1D(8.0, 256); }

/// Above this order hg_mode switches from the factorial-normalised
/// polynomial to the normalised three-term recurrence.
inline constexpr int kDirectModeLimit = 64;

/// Physicists' Hermite polynomial H_n(x) by H_{n+1} = 2x H_n - 2n H_{n-1}.
double hermite(int n, double x);

/// psi_n(x) = pi^(-1/4) (2^n n!)^(-1/2) H_n(x) exp(-x^2/2).
/// Throws NumericError if the result is not finite.
double hg_mode(int n, double x, int direct_limit = kDirectModeLimit);

/// count x (nmax+1) matrix; column j is psi_j sampled on the grid.
Eigen::MatrixXd eval_basis(int nmax, const Grid1D& grid);

}  // namespace cavbell::modes
