#include "cavbell/modes.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cavbell/error.hpp"

namespace cavbell::modes {

Grid1D::Grid1D(double half_extent, int count) : half_extent_(half_extent), count_(count) {
  if (!(half_extent > 0.0) || !std::isfinite(half_extent)) {
    throw ConfigError("grid half_extent must be positive and finite, got " +
                      std::to_string(half_extent));
  }
  if (count <= 0 || count % 2 != 0) {
    throw ConfigError("grid count must be a positive even integer, got " + std::to_string(count));
  }
}

Eigen::VectorXd Grid1D::points() const {
  Eigen::VectorXd x(count_);
  for (int i = 0; i < count_; ++i) x[i] = point(i);
  return x;
}

Eigen::VectorXd Grid1D::wavenumbers() const {
  Eigen::VectorXd k(count_);
  const double dk = std::numbers::pi / half_extent_;
  for (int i = 0; i < count_; ++i) {
    k[i] = (i < count_ / 2 ? i : i - count_) * dk;
  }
  return k;
}

double hermite(int n, double x) {
  if (n < 0) throw ConfigError("hermite order must be nonnegative");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

const double kPiQuarter = std::pow(std::numbers::pi, -0.25);

// psi_{k+1} = sqrt(2/(k+1)) x psi_k - sqrt(k/(k+1)) psi_{k-1}; every term is
// O(1), so nothing overflows for large n.
double scaled_recurrence(int n, double x) {
  double prev = kPiQuarter * std::exp(-0.5 * x * x);
  if (n == 0) return prev;
  double cur = std::numbers::sqrt2 * x * prev;
  for (int k = 1; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace

double hg_mode(int n, double x, int direct_limit) {
  if (n < 0) throw ConfigError("mode index must be nonnegative");
  double value;
  if (n <= direct_limit) {
    const double log_norm = 0.5 * (n * std::log(2.0) + std::lgamma(n + 1.0));
    value = kPiQuarter * hermite(n, x) * std::exp(-0.5 * x * x - log_norm);
  } else {
    value = scaled_recurrence(n, x);
  }
  if (!std::isfinite(value)) {
    throw NumericError("hg_mode(" + std::to_string(n) + ", " + std::to_string(x) +
                       ") is not finite");
  }
  return value;
}

Eigen::MatrixXd eval_basis(int nmax, const Grid1D& grid) {
  if (nmax < 0) throw ConfigError("nmax must be nonnegative");
  Eigen::MatrixXd basis(grid.count(), nmax + 1);
  for (int i = 0; i < grid.count(); ++i) {
    const double x = grid.point(i);
    for (int n = 0; n <= nmax; ++n) basis(i, n) = hg_mode(n, x);
  }
  return basis;
}

}  // namespace cavbell::modes
