#include <cmath>
#include <numbers>
#include <numeric>

#include "cavbell/cavity.hpp"
#include "cavbell/error.hpp"

namespace cavbell::cavity {

double nodal_angle(const field::FieldGrid& frame, double radius) {
  const modes::Grid1D& g = frame.grid();
  // Normal equations for Re psi ~ a + b x + c y.
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  for (int j = 0; j < g.count(); ++j) {
    const double y = g.point(j);
    for (int i = 0; i < g.count(); ++i) {
      const double x = g.point(i);
      if (x * x + y * y > radius * radius) continue;
      const Eigen::Vector3d row(1.0, x, y);
      ata += row * row.transpose();
      atb += row * frame(i, j).real();
    }
  }
  if (ata(0, 0) < 3) throw ConfigError("nodal fit radius covers fewer than 3 grid points");
  const Eigen::Vector3d coef = ata.ldlt().solve(atb);
  const double grad = std::hypot(coef[1], coef[2]);
  // Distance from the origin to the fitted zero line.
  if (!(grad > 0.0) || std::abs(coef[0]) / grad > radius) {
    throw NumericError("frame has no nodal line within radius " + std::to_string(radius) +
                       " of the origin");
  }
  // The line is perpendicular to the gradient (b, c).
  double angle = std::atan2(-coef[1], coef[2]);
  angle = std::fmod(angle, std::numbers::pi);
  if (angle < 0) angle += std::numbers::pi;
  return angle;
}

RotationFit measure_rotation_rate(const std::vector<field::FieldGrid>& frames,
                                  const std::vector<double>& times, double radius) {
  if (frames.size() < 4) throw ConfigError("rotation fit needs at least 4 frames");
  if (frames.size() != times.size()) throw ConfigError("one time per frame required");

  RotationFit fit;
  fit.angles.reserve(frames.size());
  for (const field::FieldGrid& f : frames) {
    const double a = nodal_angle(f, radius);
    if (fit.angles.empty()) {
      fit.angles.push_back(a);
      continue;
    }
    // Orientations are defined mod pi; take the nearest branch.
    fit.angles.push_back(fit.angles.back() + std::remainder(a - fit.angles.back(), std::numbers::pi));
  }

  const double n = double(times.size());
  const double tm = std::accumulate(times.begin(), times.end(), 0.0) / n;
  const double am = std::accumulate(fit.angles.begin(), fit.angles.end(), 0.0) / n;
  double stt = 0.0;
  double sta = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    stt += (times[k] - tm) * (times[k] - tm);
    sta += (times[k] - tm) * (fit.angles[k] - am);
  }
  if (!(stt > 0.0)) throw ConfigError("rotation fit needs distinct frame times");
  fit.rate = sta / stt;
  fit.offset = am - fit.rate * tm;
  double ss = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double r = fit.angles[k] - (fit.rate * times[k] + fit.offset);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

double rotation_mismatch(const field::FieldGrid& f, const field::FieldGrid& g, double angle,
                         double radius) {
  const modes::Grid1D& grid = g.grid();
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  double worst = 0.0;
  for (int j = 0; j < grid.count(); ++j) {
    const double y = grid.point(j);
    for (int i = 0; i < grid.count(); ++i) {
      const double x = grid.point(i);
      if (x * x + y * y > radius * radius) continue;
      // Preimage under a counter-clockwise rotation by `angle`.
      const double px = c * x + s * y;
      const double py = -s * x + c * y;
      worst = std::max(worst, std::abs(g(i, j) - field::interpolate(f, px, py)));
    }
  }
  return worst;
}

}  // namespace cavbell::cavity
