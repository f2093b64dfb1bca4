#include "cavbell/field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>

#include "cavbell/error.hpp"

namespace cavbell::field {

FieldGrid::FieldGrid(Grid1D grid, Eigen::MatrixXcd values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.rows() != grid_.count() || values_.cols() != grid_.count()) {
    throw ConfigError("field values must be " + std::to_string(grid_.count()) + "x" +
                      std::to_string(grid_.count()));
  }
  if (!values_.allFinite()) throw NumericError("field contains non-finite values");
}

const spectral::SquareFft& fft_for(int count) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<spectral::SquareFft>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[count];
  if (!slot) slot = std::make_unique<spectral::SquareFft>(count);
  return *slot;
}

DiffOpSpec::DiffOpSpec(std::vector<DiffTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw ConfigError("differential operator needs at least one term");
  for (const DiffTerm& t : terms_) {
    if (t.x_power < 0 || t.d_order < 0) {
      throw ConfigError("differential operator powers must be nonnegative");
    }
    if (t.d_order > kMaxOrder) {
      throw ConfigError("derivative order " + std::to_string(t.d_order) + " exceeds " +
                        std::to_string(kMaxOrder));
    }
  }
}

DiffOpSpec DiffOpSpec::scaled(cplx factor) const {
  std::vector<DiffTerm> out = terms_;
  for (DiffTerm& t : out) t.coefficient *= factor;
  return DiffOpSpec(std::move(out));
}

DiffOpSpec DiffOpSpec::operator+(const DiffOpSpec& other) const {
  std::vector<DiffTerm> out = terms_;
  out.insert(out.end(), other.terms_.begin(), other.terms_.end());
  return DiffOpSpec(std::move(out));
}

DiffOpSpec identity_form() { return DiffOpSpec({{0, 0, 1.0}}); }

DiffOpSpec sz_form() { return DiffOpSpec({{2, 0, 1.0}, {0, 2, -1.0}, {0, 0, -2.0}}); }

DiffOpSpec sx_form() {
  const double k = 1.0 / (2.0 * std::numbers::sqrt2);
  return DiffOpSpec({{1, 0, 7 * k}, {3, 0, -k}, {2, 1, k}, {0, 1, -k}, {1, 2, k}, {0, 3, -k}});
}

DiffOpSpec sy_form() {
  const cplx k{0.0, 1.0 / (2.0 * std::numbers::sqrt2)};
  return DiffOpSpec(
      {{1, 0, 3.0 * k}, {3, 0, -k}, {2, 1, k}, {0, 1, -5.0 * k}, {1, 2, k}, {0, 3, -k}});
}

DiffOpSpec number_form() { return DiffOpSpec({{2, 0, 0.5}, {0, 2, -0.5}, {0, 0, -0.5}}); }

DiffOpSpec hamiltonian_form() { return DiffOpSpec({{2, 0, 0.5}, {0, 2, -0.5}}); }

DiffOpSpec observable_form(const fock::BlochAngles& angles) {
  const Eigen::Vector3d n = angles.direction();
  return sx_form().scaled(n.x()) + sy_form().scaled(n.y()) + sz_form().scaled(n.z());
}

int min_count_for(int nmax) { return 4 * (nmax + 1); }

FieldGrid synthesize(const fock::ModeState2D& state, const Grid1D& grid) {
  if (grid.count() < min_count_for(state.nmax())) {
    throw ConfigError("grid count " + std::to_string(grid.count()) + " cannot resolve nmax " +
                      std::to_string(state.nmax()) + " (needs >= " +
                      std::to_string(min_count_for(state.nmax())) + ")");
  }
  const Eigen::MatrixXcd basis = modes::eval_basis(state.nmax(), grid).cast<cplx>();
  return FieldGrid(grid, basis * state.coeffs() * basis.transpose());
}

Projection project(const FieldGrid& field, int nmax) {
  const Grid1D& grid = field.grid();
  const double h = grid.spacing();
  const Eigen::MatrixXcd basis = modes::eval_basis(nmax, grid).cast<cplx>();
  Eigen::MatrixXcd c = (h * h) * (basis.transpose() * field.values() * basis);
  const double total = std::pow(norm(field), 2);
  fock::ModeState2D state(std::move(c));
  const double kept = std::pow(state.norm(), 2);
  return {std::move(state), total > 0.0 ? std::max(0.0, 1.0 - kept / total) : 0.0};
}

double boundary_amplitude(const FieldGrid& field) {
  const Eigen::MatrixXcd& v = field.values();
  const Eigen::Index n = v.rows() - 1;
  return std::max({v.row(0).cwiseAbs().maxCoeff(), v.row(n).cwiseAbs().maxCoeff(),
                   v.col(0).cwiseAbs().maxCoeff(), v.col(n).cwiseAbs().maxCoeff()});
}

AppliedField apply_diff_op(const FieldGrid& field, const DiffOpSpec& spec, Axis axis) {
  const Grid1D& grid = field.grid();
  const spectral::SquareFft& fft = fft_for(grid.count());
  const Eigen::VectorXd k = grid.wavenumbers();
  const Eigen::VectorXd x = grid.points();

  std::array<std::optional<Eigen::MatrixXcd>, DiffOpSpec::kMaxOrder + 1> derivs;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(grid.count(), grid.count());
  for (const DiffTerm& term : spec.terms()) {
    auto& d = derivs[term.d_order];
    if (!d) d = spectral::derivative(fft, k, field.values(), term.d_order, axis);
    Eigen::VectorXcd weight(grid.count());
    for (int i = 0; i < grid.count(); ++i) {
      weight[i] = term.coefficient * std::pow(x[i], term.x_power);
    }
    if (axis == Axis::x) {
      out += weight.asDiagonal() * *d;
    } else {
      out += *d * weight.asDiagonal();
    }
  }
  const bool warn = boundary_amplitude(field) > kBoundaryTolerance;
  return {FieldGrid(grid, std::move(out)), warn};
}

GridExpectation expect_grid(const FieldGrid& field, const DiffOpSpec& spec_x,
                            const DiffOpSpec& spec_y) {
  const AppliedField along_y = apply_diff_op(field, spec_y, Axis::y);
  const AppliedField both = apply_diff_op(along_y.field, spec_x, Axis::x);
  return {inner(field, both.field), along_y.boundary_warning || both.boundary_warning};
}

GridExpectation chsh_grid(const FieldGrid& field, const fock::ChshSettings& settings) {
  const DiffOpSpec xa = observable_form(settings.x_a);
  const DiffOpSpec xb = observable_form(settings.x_b);
  const DiffOpSpec ya = observable_form(settings.y_a);
  const DiffOpSpec yb = observable_form(settings.y_b);
  GridExpectation total{cplx{}, false};
  const auto add = [&](const DiffOpSpec& ox, const DiffOpSpec& oy, double sign) {
    const GridExpectation e = expect_grid(field, ox, oy);
    total.value += sign * e.value;
    total.boundary_warning = total.boundary_warning || e.boundary_warning;
  };
  add(xa, ya, 1.0);
  add(xa, yb, 1.0);
  add(xb, ya, 1.0);
  add(xb, yb, -1.0);
  return total;
}

cplx inner(const FieldGrid& f, const FieldGrid& g) {
  if (!(f.grid() == g.grid())) throw ConfigError("inner product of fields on different grids");
  const double h = f.grid().spacing();
  // Column-by-column accumulation keeps the reduction order fixed.
  cplx sum{};
  for (Eigen::Index j = 0; j < f.values().cols(); ++j) {
    sum += f.values().col(j).dot(g.values().col(j));
  }
  return h * h * sum;
}

double norm(const FieldGrid& f) { return std::sqrt(inner(f, f).real()); }

FieldGrid normalize(const FieldGrid& f) {
  const double n = norm(f);
  if (!(n > 0.0)) throw ConfigError("cannot normalize a zero field");
  return FieldGrid(f.grid(), f.values() / n);
}

int nearest_node(const Grid1D& grid, double x) {
  const double s = (x - grid.first()) / grid.spacing();
  return std::clamp(static_cast<int>(std::lround(s)), 0, grid.count() - 1);
}

cplx interpolate(const FieldGrid& f, double x, double y) {
  const Grid1D& g = f.grid();
  const auto inside = [&](double v) { return v >= g.first() && v <= g.last(); };
  if (!inside(x) || !inside(y)) {
    throw ConfigError("site (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") lies outside the field domain");
  }
  const double sx = (x - g.first()) / g.spacing();
  const double sy = (y - g.first()) / g.spacing();
  const int i = std::min(static_cast<int>(std::floor(sx)), g.count() - 2);
  const int j = std::min(static_cast<int>(std::floor(sy)), g.count() - 2);
  const double tx = sx - i;
  const double ty = sy - j;
  const Eigen::MatrixXcd& v = f.values();
  return (1 - tx) * (1 - ty) * v(i, j) + tx * (1 - ty) * v(i + 1, j) + (1 - tx) * ty * v(i, j + 1) +
         tx * ty * v(i + 1, j + 1);
}

}  // namespace cavbell::field
