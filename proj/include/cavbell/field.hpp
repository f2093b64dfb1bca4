#pragma once

// Envelope sampled on a square grid: synthesis from mode space, projection
// back, spectral differential operators and plane-integral expectations.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "cavbell/fock.hpp"
#include "cavbell/modes.hpp"
#include "cavbell/spectral.hpp"

namespace cavbell::field {

using fock::Axis;
using fock::cplx;
using modes::Grid1D;

/// psi(x_i, y_j) on a square grid shared by both axes.
class FieldGrid {
 public:
  FieldGrid(Grid1D grid, Eigen::MatrixXcd values);

  const Grid1D& grid() const noexcept { return grid_; }
  const Eigen::MatrixXcd& values() const noexcept { return values_; }
  cplx operator()(int i, int j) const { return values_(i, j); }

 private:
  Grid1D grid_;
  Eigen::MatrixXcd values_;
};

/// Shared FFT plan for a grid size; plans live for the process lifetime.
const spectral::SquareFft& fft_for(int count);

/// One term x^x_power d^d_order, derivative applied first.
struct DiffTerm {
  int x_power = 0;
  int d_order = 0;
  cplx coefficient{1.0, 0.0};
};

/// Sum of DiffTerms, polynomial in (x, d/dx) along one axis.
class DiffOpSpec {
 public:
  static constexpr int kMaxOrder = 3;

  /// Throws ConfigError for an empty list, negative powers or d_order > 3.
  explicit DiffOpSpec(std::vector<DiffTerm> terms);

  const std::vector<DiffTerm>& terms() const noexcept { return terms_; }

  DiffOpSpec scaled(cplx factor) const;
  DiffOpSpec operator+(const DiffOpSpec& other) const;

 private:
  std::vector<DiffTerm> terms_;
};

DiffOpSpec identity_form();
/// 2a+a - 1 = x^2 - d^2 - 2.
DiffOpSpec sz_form();
/// a+(1 - a+a) + a = (7x - x^3 + (x^2 - 1)d + x d^2 - d^3) / (2 sqrt2).
DiffOpSpec sx_form();
/// i(a+(1 - a+a) - a) = i(3x - x^3 + (x^2 - 5)d + x d^2 - d^3) / (2 sqrt2).
DiffOpSpec sy_form();
/// a+a = (x^2 - d^2 - 1) / 2.
DiffOpSpec number_form();
/// (x^2 - d^2) / 2, one axis of the oscillator Hamiltonian.
DiffOpSpec hamiltonian_form();
/// cos(theta) Sz + sin(theta)(cos(phi) Sx + sin(phi) Sy).
DiffOpSpec observable_form(const fock::BlochAngles& angles);

/// Edge amplitude above which spectral derivatives are flagged.
inline constexpr double kBoundaryTolerance = 1e-8;

struct AppliedField {
  FieldGrid field;
  bool boundary_warning = false;
};

struct GridExpectation {
  cplx value;
  bool boundary_warning = false;
};

struct Projection {
  fock::ModeState2D state;
  double truncation_loss = 0.0;  // 1 - sum|c|^2 / <psi|psi>
};

/// Minimum grid count for a cutoff: 4 (nmax + 1).
int min_count_for(int nmax);

/// psi(x_i, y_j) = sum c[nx][ny] psi_nx(x_i) psi_ny(y_j).
/// Throws ConfigError when the grid is too coarse for nmax.
FieldGrid synthesize(const fock::ModeState2D& state, const Grid1D& grid);

/// c[nx][ny] = h^2 sum_ij psi_nx(x_i) psi_ny(y_j) psi(x_i, y_j).
Projection project(const FieldGrid& field, int nmax);

/// Largest |psi| on the outermost ring of grid points.
double boundary_amplitude(const FieldGrid& field);

AppliedField apply_diff_op(const FieldGrid& field, const DiffOpSpec& spec, Axis axis);

/// h^2 sum conj(psi) (O_x O_y psi).
GridExpectation expect_grid(const FieldGrid& field, const DiffOpSpec& spec_x,
                            const DiffOpSpec& spec_y);

/// Grid CHSH estimator: the four correlators of `settings` by expect_grid.
GridExpectation chsh_grid(const FieldGrid& field, const fock::ChshSettings& settings);

/// h^2 sum conj(f) g. Grids must match.
cplx inner(const FieldGrid& f, const FieldGrid& g);
double norm(const FieldGrid& f);
/// Throws ConfigError for a zero field.
FieldGrid normalize(const FieldGrid& f);

/// Bilinear interpolation at (x, y); throws ConfigError outside the node hull.
cplx interpolate(const FieldGrid& f, double x, double y);

/// Nearest-node index on a grid for a coordinate inside the node hull.
int nearest_node(const Grid1D& grid, double x);

}  // namespace cavbell::field
