#include "cavbell/spectral.hpp"

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <string>

#include "cavbell/error.hpp"

namespace cavbell::spectral {

namespace {

// The FFTW planner is not reentrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Eigen::MatrixXcd& data) {
  return reinterpret_cast<fftw_complex*>(data.data());
}

}  // namespace

struct SquareFft::Plans {
  fftw_plan x_fwd = nullptr;
  fftw_plan x_bwd = nullptr;
  fftw_plan y_fwd = nullptr;
  fftw_plan y_bwd = nullptr;
  fftw_plan fwd2 = nullptr;
  fftw_plan bwd2 = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    for (fftw_plan p : {x_fwd, x_bwd, y_fwd, y_bwd, fwd2, bwd2}) {
      if (p) fftw_destroy_plan(p);
    }
  }
};

SquareFft::SquareFft(int count) : count_(count), plans_(std::make_unique<Plans>()) {
  if (count <= 0) throw ConfigError("FFT size must be positive");
  Eigen::MatrixXcd scratch(count, count);
  fftw_complex* buf = as_fftw(scratch);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  const int n[] = {count};
  std::lock_guard lock(planner_mutex());
  // Column-major: x (row index) is contiguous, y has stride `count`.
  plans_->x_fwd = fftw_plan_many_dft(1, n, count, buf, nullptr, 1, count, buf, nullptr, 1, count,
                                     FFTW_FORWARD, flags);
  plans_->x_bwd = fftw_plan_many_dft(1, n, count, buf, nullptr, 1, count, buf, nullptr, 1, count,
                                     FFTW_BACKWARD, flags);
  plans_->y_fwd = fftw_plan_many_dft(1, n, count, buf, nullptr, count, 1, buf, nullptr, count, 1,
                                     FFTW_FORWARD, flags);
  plans_->y_bwd = fftw_plan_many_dft(1, n, count, buf, nullptr, count, 1, buf, nullptr, count, 1,
                                     FFTW_BACKWARD, flags);
  plans_->fwd2 = fftw_plan_dft_2d(count, count, buf, buf, FFTW_FORWARD, flags);
  plans_->bwd2 = fftw_plan_dft_2d(count, count, buf, buf, FFTW_BACKWARD, flags);
  for (fftw_plan p : {plans_->x_fwd, plans_->x_bwd, plans_->y_fwd, plans_->y_bwd, plans_->fwd2,
                      plans_->bwd2}) {
    if (!p) throw NumericError("FFTW failed to create a plan of size " + std::to_string(count));
  }
}

SquareFft::~SquareFft() = default;
SquareFft::SquareFft(SquareFft&&) noexcept = default;
SquareFft& SquareFft::operator=(SquareFft&&) noexcept = default;

void SquareFft::check(const Eigen::MatrixXcd& data) const {
  if (data.rows() != count_ || data.cols() != count_) {
    throw ConfigError("FFT input shape does not match plan size " + std::to_string(count_));
  }
}

void SquareFft::forward(Eigen::MatrixXcd& data, fock::Axis axis) const {
  check(data);
  fftw_execute_dft(axis == fock::Axis::x ? plans_->x_fwd : plans_->y_fwd, as_fftw(data),
                   as_fftw(data));
}

void SquareFft::backward(Eigen::MatrixXcd& data, fock::Axis axis) const {
  check(data);
  fftw_execute_dft(axis == fock::Axis::x ? plans_->x_bwd : plans_->y_bwd, as_fftw(data),
                   as_fftw(data));
}

void SquareFft::forward2d(Eigen::MatrixXcd& data) const {
  check(data);
  fftw_execute_dft(plans_->fwd2, as_fftw(data), as_fftw(data));
}

void SquareFft::backward2d(Eigen::MatrixXcd& data) const {
  check(data);
  fftw_execute_dft(plans_->bwd2, as_fftw(data), as_fftw(data));
}

Eigen::MatrixXcd derivative(const SquareFft& fft, const Eigen::VectorXd& wavenumbers,
                            const Eigen::MatrixXcd& data, int order, fock::Axis axis) {
  if (order < 0) throw ConfigError("derivative order must be nonnegative");
  if (order == 0) return data;
  const int n = fft.count();
  // i^order, exact.
  static constexpr std::complex<double> kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Eigen::VectorXcd factor(n);
  for (int i = 0; i < n; ++i) {
    factor[i] = kIPow[order % 4] * (std::pow(wavenumbers[i], order) / double(n));
  }
  if (order % 2 == 1) factor[n / 2] = 0.0;

  Eigen::MatrixXcd out = data;
  fft.forward(out, axis);
  if (axis == fock::Axis::x) {
    out = factor.asDiagonal() * out;
  } else {
    out = out * factor.asDiagonal();
  }
  fft.backward(out, axis);
  return out;
}

}  // namespace cavbell::spectral
