#include "cavbell/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cavbell/error.hpp"
#include "cavbell/random.hpp"

namespace cavbell::antenna {

std::string to_string(Layout layout) {
  switch (layout) {
    case Layout::uniform_grid: return "uniform_grid";
    case Layout::random_uniform: return "random_uniform";
    case Layout::halton: return "halton";
    case Layout::explicit_sites: return "explicit";
  }
  return "explicit";
}

Layout layout_from_string(const std::string& name) {
  if (name == "uniform_grid") return Layout::uniform_grid;
  if (name == "random_uniform") return Layout::random_uniform;
  if (name == "halton") return Layout::halton;
  if (name == "explicit") return Layout::explicit_sites;
  throw ConfigError("unknown sampling layout '" + name + "'");
}

std::string SamplePlan::describe() const {
  std::ostringstream s;
  s << to_string(layout) << "(M=" << count() << ", seed=" << seed << ")";
  return s.str();
}

namespace {

double radical_inverse(int index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * (index % base);
    index /= base;
    f /= base;
  }
  return result;
}

}  // namespace

SamplePlan make_plan(Layout layout, int M, double aperture, std::uint64_t seed,
                     const modes::Grid1D& grid) {
  if (M <= 0) throw ConfigError("sample count M must be positive");
  if (!(aperture > 0.0) || aperture > grid.last()) {
    throw ConfigError("sampling aperture must lie inside the field grid");
  }
  SamplePlan plan;
  plan.layout = layout;
  plan.seed = seed;
  plan.sites.reserve(M);
  // Nearest node, stepping inward if rounding left the aperture.
  const auto snap = [&](double v) {
    int i = field::nearest_node(grid, v);
    if (grid.point(i) > aperture) --i;
    if (grid.point(i) < -aperture) ++i;
    return grid.point(i);
  };
  const auto add = [&](double x, double y) { plan.sites.push_back({snap(x), snap(y)}); };

  switch (layout) {
    case Layout::uniform_grid: {
      const int k = static_cast<int>(std::lround(std::sqrt(double(M))));
      if (k * k != M) throw ConfigError("uniform_grid layout needs a perfect-square M");
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          const double u = k == 1 ? 0.0 : -aperture + 2.0 * aperture * i / (k - 1);
          const double v = k == 1 ? 0.0 : -aperture + 2.0 * aperture * j / (k - 1);
          add(u, v);
        }
      }
      break;
    }
    case Layout::random_uniform: {
      RandomStream rng(derive_seed(seed, 0x5175));
      for (int m = 0; m < M; ++m) {
        const double u = rng.uniform(-aperture, aperture);
        add(u, rng.uniform(-aperture, aperture));
      }
      break;
    }
    case Layout::halton: {
      for (int m = 1; m <= M; ++m) {
        add(-aperture + 2.0 * aperture * radical_inverse(m, 2),
            -aperture + 2.0 * aperture * radical_inverse(m, 3));
      }
      break;
    }
    case Layout::explicit_sites:
      throw ConfigError("explicit plans are built from a site list, not generated");
  }
  return plan;
}

std::vector<AntennaReading> sample(const field::FieldGrid& field, const SamplePlan& plan,
                                   double noise_sigma) {
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be nonnegative");
  RandomStream rng(plan.seed);
  std::vector<AntennaReading> out;
  out.reserve(plan.sites.size());
  for (const Site& s : plan.sites) {
    cplx v = field::interpolate(field, s.x, s.y);
    if (noise_sigma > 0.0) {
      const double re = rng.normal();
      const double im = rng.normal();
      v += noise_sigma * cplx(re, im);
    }
    out.push_back({s, v, noise_sigma});
  }
  return out;
}

Reconstruction reconstruct(const std::vector<AntennaReading>& readings, int nmax,
                           const std::string& plan_name) {
  if (nmax < 0) throw ConfigError("nmax must be nonnegative");
  const int dim = nmax + 1;
  const int unknowns = dim * dim;
  const int M = static_cast<int>(readings.size());
  if (M < unknowns) {
    throw ConfigError("reconstruction at nmax " + std::to_string(nmax) + " needs at least " +
                      std::to_string(unknowns) + " readings, got " + std::to_string(M));
  }
  Eigen::MatrixXd design(M, unknowns);
  Eigen::MatrixXd rhs(M, 2);
  for (int r = 0; r < M; ++r) {
    const AntennaReading& a = readings[r];
    if (!std::isfinite(a.value.real()) || !std::isfinite(a.value.imag())) {
      throw NumericError("antenna reading " + std::to_string(r) + " is not finite");
    }
    Eigen::VectorXd px(dim);
    Eigen::VectorXd py(dim);
    for (int n = 0; n < dim; ++n) {
      px[n] = modes::hg_mode(n, a.site.x);
      py[n] = modes::hg_mode(n, a.site.y);
    }
    for (int nx = 0; nx < dim; ++nx) {
      for (int ny = 0; ny < dim; ++ny) design(r, nx * dim + ny) = px[nx] * py[ny];
    }
    rhs(r, 0) = a.value.real();
    rhs(r, 1) = a.value.imag();
  }

  const Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cond = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1]
                                              : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxConditionNumber)) {
    std::ostringstream msg;
    msg << "sampling plan " << plan_name << " is ill-posed for nmax " << nmax
        << ": design condition number " << cond << " exceeds " << kMaxConditionNumber;
    throw IllPosedError(msg.str());
  }
  const Eigen::MatrixXd sol = svd.solve(rhs);
  Eigen::MatrixXcd c(dim, dim);
  for (int nx = 0; nx < dim; ++nx) {
    for (int ny = 0; ny < dim; ++ny) {
      c(nx, ny) = cplx(sol(nx * dim + ny, 0), sol(nx * dim + ny, 1));
    }
  }
  return {fock::ModeState2D(std::move(c)).normalized(), cond};
}

double chsh_from_samples(const std::vector<AntennaReading>& readings, int nmax,
                         const fock::ChshSettings& settings) {
  return fock::chsh_value(reconstruct(readings, nmax).state, settings);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ConfigError("slope fit needs at least two paired points");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw NumericError("log-log fit needs positive data");
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= double(x.size());
  my /= double(x.size());
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[k]) - my);
  }
  return sxy / sxx;
}

namespace {

// Trial t at sample count M draws its sites and noise from one stream.
std::uint64_t trial_seed(std::uint64_t master, int M, int trial) {
  return derive_seed(derive_seed(master, static_cast<std::uint64_t>(M)),
                     static_cast<std::uint64_t>(trial));
}

}  // namespace

ConvergenceReport convergence_study(const field::FieldGrid& field, const std::vector<int>& M_list,
                                    double noise_sigma, int trials, const StudyOptions& options) {
  if (M_list.empty()) throw ConfigError("convergence study needs at least one M");
  if (!std::is_sorted(M_list.begin(), M_list.end())) {
    throw ConfigError("convergence study M list must be ascending");
  }
  if (trials < 1) throw ConfigError("convergence study needs at least one trial");

  ConvergenceReport report;
  report.noise_sigma = noise_sigma;
  report.oracle = fock::chsh_value(field::project(field, options.nmax).state.normalized(),
                                   options.settings);
  for (int M : M_list) {
    ConvergenceRow row;
    row.M = M;
    row.trials = trials;
    std::vector<double> errors;
    errors.reserve(trials);
    double cond_sum = 0.0;
    for (int t = 0; t < trials; ++t) {
      const SamplePlan plan =
          make_plan(options.layout, M, options.aperture, trial_seed(options.seed, M, t),
                    field.grid());
      const auto readings = sample(field, plan, noise_sigma);
      const Reconstruction rec = reconstruct(readings, options.nmax, plan.describe());
      cond_sum += rec.condition_number;
      errors.push_back(std::abs(fock::chsh_value(rec.state, options.settings) - report.oracle));
    }
    double mean = 0.0;
    for (double e : errors) mean += e;
    mean /= trials;
    row.mean_error = mean;
    row.mean_condition = cond_sum / trials;
    if (trials > 1) {
      double ss = 0.0;
      for (double e : errors) ss += (e - mean) * (e - mean);
      row.std_error = std::sqrt(ss / (trials - 1));
    }
    report.rows.push_back(row);
  }

  std::vector<double> ms;
  std::vector<double> errs;
  for (const ConvergenceRow& r : report.rows) {
    if (r.mean_error > 0.0) {
      ms.push_back(r.M);
      errs.push_back(r.mean_error);
    }
  }
  if (ms.size() >= 2 && ms.size() == report.rows.size()) report.slope = loglog_slope(ms, errs);
  return report;
}

ViolationStudy violation_study(const field::FieldGrid& field, int M, double noise_sigma, int seeds,
                               const StudyOptions& options) {
  if (seeds < 1) throw ConfigError("violation study needs at least one seed");
  ViolationStudy study;
  study.estimates.reserve(seeds);
  for (int s = 0; s < seeds; ++s) {
    const SamplePlan plan = make_plan(options.layout, M, options.aperture,
                                      trial_seed(options.seed, M, s), field.grid());
    const auto readings = sample(field, plan, noise_sigma);
    study.estimates.push_back(
        fock::chsh_value(reconstruct(readings, options.nmax, plan.describe()).state,
                         options.settings));
  }
  double sum = 0.0;
  for (double v : study.estimates) sum += v;
  study.mean = sum / seeds;
  std::vector<double> sorted = study.estimates;
  std::sort(sorted.begin(), sorted.end());
  // Linear interpolation between order statistics.
  const double pos = 0.05 * (seeds - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  study.percentile05 = sorted[lo] + (pos - double(lo)) * (sorted[hi] - sorted[lo]);
  return study;
}

}  // namespace cavbell::antenna
