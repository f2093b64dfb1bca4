#pragma once

// Exact truncated mode-space algebra for two transverse axes. Index n of a
// basis vector is its excitation number; states hold c[nx][ny].

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string_view>
#include <utility>

namespace cavbell::fock {

using cplx = std::complex<double>;

enum class Axis { x, y };

class ModeState2D {
 public:
  /// All-zero coefficients; nmax must be nonnegative.
  explicit ModeState2D(int nmax);
  /// Square coefficient matrix; throws ConfigError on non-finite entries.
  explicit ModeState2D(Eigen::MatrixXcd coeffs);

  int nmax() const noexcept { return static_cast<int>(coeffs_.rows()) - 1; }
  int dim() const noexcept { return static_cast<int>(coeffs_.rows()); }
  const Eigen::MatrixXcd& coeffs() const noexcept { return coeffs_; }
  cplx operator()(int nx, int ny) const { return coeffs_(nx, ny); }

  double norm() const { return coeffs_.norm(); }
  /// Throws ConfigError for a zero state.
  ModeState2D normalized() const;
  /// Zero-pads or truncates to a new cutoff.
  ModeState2D resized(int nmax) const;

 private:
  Eigen::MatrixXcd coeffs_;
};

/// |nx>|ny> at the given cutoff.
ModeState2D basis_state(int nmax, int nx, int ny);

/// Kronecker product of two single-axis amplitude vectors of equal length.
ModeState2D product_state(const Eigen::VectorXcd& x_amps, const Eigen::VectorXcd& y_amps);

enum class OpLabel { a, adag, number, parity, sx, sy, sz, identity, custom };

std::string_view to_string(OpLabel label);

/// Dense one-axis operator in the truncated basis.
struct OperatorMatrix {
  OpLabel label = OpLabel::custom;
  Eigen::MatrixXcd entries;

  int nmax() const noexcept { return static_cast<int>(entries.rows()) - 1; }
};

/// Lowering and raising operators, a[n-1][n] = sqrt(n). nmax >= 1.
std::pair<OperatorMatrix, OperatorMatrix> ladder(int nmax);

/// [a, a+] - I. Zero except the (nmax, nmax) truncation corner.
Eigen::MatrixXcd commutator_defect(int nmax);

OperatorMatrix identity_op(int nmax);
/// N = a+ a.
OperatorMatrix number_op(int nmax);
/// Diagonal (-1)^n.
OperatorMatrix parity_op(int nmax);

struct SpinOps {
  OperatorMatrix sx;  // a+(1 - a+a) + a
  OperatorMatrix sy;  // i(a+(1 - a+a) - a)
  OperatorMatrix sz;  // 2 a+a - 1
};

/// Pauli-like operators acting on the {|0>, |1>} block. Sz|0> = -|0>.
/// The triple obeys Sx Sy = -i Sz on the block.
SpinOps spin_ops(int nmax);

/// 50-50 beamsplitter (1/sqrt2)[[1, i], [i, 1]].
Eigen::Matrix2cd beamsplitter_matrix();

/// Beamsplitter output for one excitation entering port x:
/// (|0>|1> + i|1>|0>)/sqrt2, i.e. c[0][1] = 1/sqrt2, c[1][0] = i/sqrt2.
/// Amplitude vector component 0 maps to c[0][1], component 1 to c[1][0];
/// `passes` applies the matrix repeatedly to the input (1, 0).
ModeState2D beamsplitter_state(int nmax, int passes = 1);

/// <psi| op_x (x) op_y |psi>.
cplx expect(const ModeState2D& state, const OperatorMatrix& op_x, const OperatorMatrix& op_y);

/// <psi| op (x) I |psi> for axis x, <psi| I (x) op |psi> for axis y.
cplx axis_reduced_expectation(const ModeState2D& state, const OperatorMatrix& op, Axis axis);

/// Qubit observable cos(theta) Sz + sin(theta)(cos(phi) Sx + sin(phi) Sy).
struct BlochAngles {
  double theta = 0.0;
  double phi = 0.0;

  Eigen::Vector3d direction() const;  // (x, y, z) components
  static BlochAngles from_direction(const Eigen::Vector3d& n);
};

struct ChshSettings {
  BlochAngles x_a;
  BlochAngles x_b;
  BlochAngles y_a;
  BlochAngles y_b;

  /// Settings with every observable equal to Sz.
  static ChshSettings identity() { return {}; }
  /// x: Sz, Sx. y: -(Sz + Sx)/sqrt2, (Sz - Sx)/sqrt2.
  static ChshSettings paper();
  /// The paper quadruple with Sy in place of Sx on the y-axis.
  static ChshSettings paper_sy_variant();
};

OperatorMatrix observable(int nmax, const BlochAngles& angles);

/// <AaBa> + <AaBb> + <AbBa> - <AbBb>.
double chsh_value(const ModeState2D& state, const ChshSettings& settings);

/// T[i][j] = Re <S_i (x) S_j>, i, j over (x, y, z).
Eigen::Matrix3d correlation_matrix(const ModeState2D& state);

struct ChshOptimum {
  ChshSettings settings;
  double value = 0.0;          // 2 sqrt(t1^2 + t2^2)
  double direct_value = 0.0;   // chsh_value at the recovered settings
  Eigen::Vector3d singular_values = Eigen::Vector3d::Zero();
  bool degenerate = false;
};

/// Maximum CHSH value over qubit observables on each axis, from the
/// singular values of the correlation matrix. A degenerate T (all singular
/// values below 1e-12) yields value 0 with identity settings.
ChshOptimum chsh_optimize(const ModeState2D& state);

}  // namespace cavbell::fock
