#pragma once

// Thin RAII layer over FFTW for square count x count complex grids stored
// column-major (Eigen default), entry (i, j) = f(x_i, y_j).

#include <Eigen/Dense>
#include <memory>

#include "cavbell/fock.hpp"

namespace cavbell::spectral {

class SquareFft {
 public:
  explicit SquareFft(int count);
  ~SquareFft();
  SquareFft(SquareFft&&) noexcept;
  SquareFft& operator=(SquareFft&&) noexcept;
  SquareFft(const SquareFft&) = delete;
  SquareFft& operator=(const SquareFft&) = delete;

  int count() const noexcept { return count_; }

  // Unnormalised; backward(forward(f)) = count * f per transformed axis.
  void forward(Eigen::MatrixXcd& data, fock::Axis axis) const;
  void backward(Eigen::MatrixXcd& data, fock::Axis axis) const;
  void forward2d(Eigen::MatrixXcd& data) const;
  void backward2d(Eigen::MatrixXcd& data) const;

 private:
  struct Plans;
  void check(const Eigen::MatrixXcd& data) const;

  int count_;
  std::unique_ptr<Plans> plans_;
};

/// d^order/dx^order along one axis by multiplying the transform with
/// (ik)^order. The Nyquist component is dropped for odd orders.
Eigen::MatrixXcd derivative(const SquareFft& fft, const Eigen::VectorXd& wavenumbers,
                            const Eigen::MatrixXcd& data, int order, fock::Axis axis);

}  // namespace cavbell::spectral
