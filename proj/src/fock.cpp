#include "cavbell/fock.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cavbell/error.hpp"

namespace cavbell::fock {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_ladder_cutoff(int nmax) {
  if (nmax < 1) {
    throw ConfigError("nmax must be at least 1 for ladder operators, got " + std::to_string(nmax));
  }
}

void require_shape(const ModeState2D& state, const OperatorMatrix& op, const char* name) {
  if (op.entries.rows() != state.dim() || op.entries.cols() != state.dim()) {
    throw ConfigError(std::string("operator ") + name + " has shape " +
                      std::to_string(op.entries.rows()) + "x" + std::to_string(op.entries.cols()) +
                      ", state needs " + std::to_string(state.dim()));
  }
}

}  // namespace

ModeState2D::ModeState2D(int nmax) {
  if (nmax < 0) throw ConfigError("nmax must be nonnegative, got " + std::to_string(nmax));
  coeffs_ = Eigen::MatrixXcd::Zero(nmax + 1, nmax + 1);
}

ModeState2D::ModeState2D(Eigen::MatrixXcd coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.rows() == 0 || coeffs_.rows() != coeffs_.cols()) {
    throw ConfigError("mode coefficients must form a nonempty square matrix");
  }
  if (!coeffs_.allFinite()) throw ConfigError("mode coefficients must be finite");
}

ModeState2D ModeState2D::normalized() const {
  const double n = norm();
  if (!(n > 0.0)) throw ConfigError("cannot normalize a zero state");
  return ModeState2D(Eigen::MatrixXcd(coeffs_ / n));
}

ModeState2D ModeState2D::resized(int nmax) const {
  ModeState2D out(nmax);
  const int keep = std::min(dim(), nmax + 1);
  out.coeffs_.topLeftCorner(keep, keep) = coeffs_.topLeftCorner(keep, keep);
  return out;
}

ModeState2D basis_state(int nmax, int nx, int ny) {
  if (nx < 0 || ny < 0 || nx > nmax || ny > nmax) {
    throw ConfigError("basis index outside cutoff");
  }
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(nmax + 1, nmax + 1);
  c(nx, ny) = 1.0;
  return ModeState2D(std::move(c));
}

ModeState2D product_state(const Eigen::VectorXcd& x_amps, const Eigen::VectorXcd& y_amps) {
  if (x_amps.size() != y_amps.size()) throw ConfigError("axis amplitude vectors differ in length");
  return ModeState2D(Eigen::MatrixXcd(x_amps * y_amps.transpose()));
}

std::string_view to_string(OpLabel label) {
  switch (label) {
    case OpLabel::a: return "a";
    case OpLabel::adag: return "adag";
    case OpLabel::number: return "N";
    case OpLabel::parity: return "parity";
    case OpLabel::sx: return "Sx";
    case OpLabel::sy: return "Sy";
    case OpLabel::sz: return "Sz";
    case OpLabel::identity: return "I";
    case OpLabel::custom: return "custom";
  }
  return "custom";
}

std::pair<OperatorMatrix, OperatorMatrix> ladder(int nmax) {
  require_ladder_cutoff(nmax);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(nmax + 1, nmax + 1);
  for (int n = 1; n <= nmax; ++n) a(n - 1, n) = std::sqrt(double(n));
  Eigen::MatrixXcd adag = a.adjoint();
  return {OperatorMatrix{OpLabel::a, std::move(a)}, OperatorMatrix{OpLabel::adag, std::move(adag)}};
}

Eigen::MatrixXcd commutator_defect(int nmax) {
  const auto [a, adag] = ladder(nmax);
  return a.entries * adag.entries - adag.entries * a.entries -
         Eigen::MatrixXcd::Identity(nmax + 1, nmax + 1);
}

OperatorMatrix identity_op(int nmax) {
  if (nmax < 0) throw ConfigError("nmax must be nonnegative");
  return {OpLabel::identity, Eigen::MatrixXcd::Identity(nmax + 1, nmax + 1)};
}

OperatorMatrix number_op(int nmax) {
  if (nmax < 0) throw ConfigError("nmax must be nonnegative");
  Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(nmax + 1, nmax + 1);
  for (int k = 0; k <= nmax; ++k) n(k, k) = double(k);
  return {OpLabel::number, std::move(n)};
}

OperatorMatrix parity_op(int nmax) {
  if (nmax < 0) throw ConfigError("nmax must be nonnegative");
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(nmax + 1, nmax + 1);
  for (int k = 0; k <= nmax; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return {OpLabel::parity, std::move(p)};
}

SpinOps spin_ops(int nmax) {
  const auto [a, adag] = ladder(nmax);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(nmax + 1, nmax + 1);
  const Eigen::MatrixXcd number = adag.entries * a.entries;
  const Eigen::MatrixXcd raise_block = adag.entries * (id - number);
  return {
      OperatorMatrix{OpLabel::sx, raise_block + a.entries},
      OperatorMatrix{OpLabel::sy, kI * (raise_block - a.entries)},
      OperatorMatrix{OpLabel::sz, 2.0 * number - id},
  };
}

Eigen::Matrix2cd beamsplitter_matrix() {
  Eigen::Matrix2cd m;
  m << 1.0, kI, kI, 1.0;
  return m / std::numbers::sqrt2;
}

ModeState2D beamsplitter_state(int nmax, int passes) {
  require_ladder_cutoff(nmax);
  if (passes < 0) throw ConfigError("beamsplitter passes must be nonnegative");
  // Single-excitation amplitudes: component 0 is "excitation on y", component
  // 1 is "excitation on x"; the input (1, 0) enters from one port.
  Eigen::Vector2cd out(1.0, 0.0);
  for (int k = 0; k < passes; ++k) out = beamsplitter_matrix() * out;
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(nmax + 1, nmax + 1);
  c(0, 1) = out[0];
  c(1, 0) = out[1];
  return ModeState2D(std::move(c));
}

cplx expect(const ModeState2D& state, const OperatorMatrix& op_x, const OperatorMatrix& op_y) {
  require_shape(state, op_x, "op_x");
  require_shape(state, op_y, "op_y");
  const Eigen::MatrixXcd& c = state.coeffs();
  const Eigen::MatrixXcd applied = op_x.entries * c * op_y.entries.transpose();
  return c.conjugate().cwiseProduct(applied).sum();
}

cplx axis_reduced_expectation(const ModeState2D& state, const OperatorMatrix& op, Axis axis) {
  const OperatorMatrix id = identity_op(state.nmax());
  return axis == Axis::x ? expect(state, op, id) : expect(state, id, op);
}

Eigen::Vector3d BlochAngles::direction() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

BlochAngles BlochAngles::from_direction(const Eigen::Vector3d& n) {
  const Eigen::Vector3d u = n.normalized();
  return {std::acos(std::clamp(u.z(), -1.0, 1.0)), std::atan2(u.y(), u.x())};
}

ChshSettings ChshSettings::paper() {
  const double pi = std::numbers::pi;
  // -(Sz + Sx)/sqrt2 -> direction (-1, 0, -1)/sqrt2; (Sz - Sx)/sqrt2 -> (-1, 0, 1)/sqrt2.
  return {{0.0, 0.0}, {pi / 2, 0.0}, {3 * pi / 4, pi}, {pi / 4, pi}};
}

ChshSettings ChshSettings::paper_sy_variant() {
  const double pi = std::numbers::pi;
  // -(Sz + Sy)/sqrt2 -> (0, -1, -1)/sqrt2; (Sy - Sz)/sqrt2 -> (0, 1, -1)/sqrt2.
  return {{0.0, 0.0}, {pi / 2, 0.0}, {3 * pi / 4, -pi / 2}, {3 * pi / 4, pi / 2}};
}

OperatorMatrix observable(int nmax, const BlochAngles& angles) {
  const SpinOps s = spin_ops(nmax);
  const Eigen::Vector3d n = angles.direction();
  return {OpLabel::custom, n.x() * s.sx.entries + n.y() * s.sy.entries + n.z() * s.sz.entries};
}

double chsh_value(const ModeState2D& state, const ChshSettings& settings) {
  const int nmax = state.nmax();
  const OperatorMatrix xa = observable(nmax, settings.x_a);
  const OperatorMatrix xb = observable(nmax, settings.x_b);
  const OperatorMatrix ya = observable(nmax, settings.y_a);
  const OperatorMatrix yb = observable(nmax, settings.y_b);
  return (expect(state, xa, ya) + expect(state, xa, yb) + expect(state, xb, ya) -
          expect(state, xb, yb))
      .real();
}

Eigen::Matrix3d correlation_matrix(const ModeState2D& state) {
  const SpinOps s = spin_ops(state.nmax());
  const std::array<const OperatorMatrix*, 3> ops{&s.sx, &s.sy, &s.sz};
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) t(i, j) = expect(state, *ops[i], *ops[j]).real();
  }
  return t;
}

ChshOptimum chsh_optimize(const ModeState2D& state) {
  const Eigen::Matrix3d t = correlation_matrix(state);
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ChshOptimum best;
  best.singular_values = svd.singularValues();
  if (best.singular_values[0] < 1e-12) {
    best.degenerate = true;
    best.settings = ChshSettings::identity();
    best.value = 0.0;
    best.direct_value = chsh_value(state, best.settings);
    return best;
  }
  const double t1 = best.singular_values[0];
  const double t2 = best.singular_values[1];
  const Eigen::Vector3d u1 = svd.matrixU().col(0);
  const Eigen::Vector3d u2 = svd.matrixU().col(1);
  const Eigen::Vector3d v1 = svd.matrixV().col(0);
  const Eigen::Vector3d v2 = svd.matrixV().col(1);
  // b +- b' = 2 cos(alpha) v1, 2 sin(alpha) v2 with tan(alpha) = t2/t1.
  const double alpha = std::atan2(t2, t1);
  best.settings.x_a = BlochAngles::from_direction(u1);
  best.settings.x_b = BlochAngles::from_direction(u2);
  best.settings.y_a = BlochAngles::from_direction(std::cos(alpha) * v1 + std::sin(alpha) * v2);
  best.settings.y_b = BlochAngles::from_direction(std::cos(alpha) * v1 - std::sin(alpha) * v2);
  best.value = 2.0 * std::hypot(t1, t2);
  best.direct_value = chsh_value(state, best.settings);
  return best;
}

}  // namespace cavbell::fock
