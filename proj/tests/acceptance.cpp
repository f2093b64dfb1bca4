// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "cavbell/antenna.hpp"
#include "cavbell/cavity.hpp"
#include "cavbell/cli/commands.hpp"
#include "cavbell/field.hpp"
#include "cavbell/fock.hpp"
#include "cavbell/modes.hpp"
#include "oracle.hpp"

using namespace cavbell;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
const double kTsirelson = 2.0 * std::numbers::sqrt2;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cavbell_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

// Runs the CLI in-process, returning (exit code, seconds).
std::pair<int, double> timed_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const auto t0 = std::chrono::steady_clock::now();
  const int code = cli::run(args, out, err);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (code != 0) std::cerr << err.str();
  return {code, secs};
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

field::FieldGrid entangled_field() {
  return field::synthesize(fock::beamsplitter_state(8), modes::default_grid());
}

// ---------------------------------------------------------------------------

Verdict chsh_maximum() {
  const fs::path dir = scratch("chsh");
  const auto [code, secs] = timed_cli({"chsh", "--out", dir.string()});
  if (code != 0) return {false, "cavbell chsh exited with " + std::to_string(code)};
  const json m = json::parse(slurp(dir / "chsh.json"));
  const double mode = m["optimized"]["value"];
  const double grid = m["optimized"]["grid"];
  const double mode_err = std::abs(mode - kTsirelson);
  const double grid_err = std::abs(grid - mode);
  fs::remove_all(dir);
  return {mode_err <= 1e-9 && grid_err <= 1e-6 && secs < 5.0,
          "optimum " + num(mode) + ", |mode-2sqrt2| " + num(mode_err) + " (tol 1e-9), |grid-mode| " +
              num(grid_err) + " (tol 1e-6), runtime " + num(secs) + " s (limit 5)"};
}

Verdict paper_quadruple() {
  const fock::ModeState2D s = fock::beamsplitter_state(8);
  const double independent = oracle::chsh(oracle::qubit_vector(s), fock::ChshSettings::paper());
  const double mode = fock::chsh_value(s, fock::ChshSettings::paper());
  const double grid = field::chsh_grid(entangled_field(), fock::ChshSettings::paper()).value.real();
  const double sy = fock::chsh_value(s, fock::ChshSettings::paper_sy_variant());
  const double dev = std::max(std::abs(independent - grid), std::abs(mode - independent));
  return {dev <= 1e-6, "quadruple value " + num(independent) + ", oracle vs grid " + num(dev) +
                           " (tol 1e-6); Sy variant " + num(sy) + ", optimum " +
                           num(fock::chsh_optimize(s).value)};
}

Verdict joint_excitation() {
  const fock::ModeState2D s = fock::beamsplitter_state(8);
  const fock::OperatorMatrix n = fock::number_op(8);
  const double mode = std::abs(fock::expect(s, n, n));
  const double grid = std::abs(field::expect_grid(entangled_field(), field::number_form(), field::number_form()).value);
  return {mode <= 1e-12 && grid <= 1e-8,
          "mode " + num(mode) + " (tol 1e-12), grid " + num(grid) + " (tol 1e-8)"};
}

Verdict bounds() {
  std::mt19937_64 rng(1729);
  double worst_product = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const fock::ModeState2D s =
        fock::product_state(oracle::random_qubit(rng, 1), oracle::random_qubit(rng, 1));
    worst_product = std::max(worst_product, std::abs(fock::chsh_value(s, oracle::random_settings(rng))));
  }
  double worst_entangled = 0.0;
  for (int k = 0; k < 1000; ++k)
    worst_entangled = std::max(worst_entangled, fock::chsh_optimize(oracle::random_state(rng, 1, 1)).value);
  return {worst_product <= 2.0 + 1e-9 && worst_entangled <= kTsirelson + 1e-9,
          "max |CHSH| over 10^4 product states " + num(worst_product) + " (<= 2), max optimum over 10^3 states " +
              num(worst_entangled) + " (<= 2sqrt2)"};
}

double period_error(double dt) {
  const int steps = static_cast<int>(std::lround(2 * kPi / dt));
  const field::FieldGrid out = cavity::evolve_splitstep(entangled_field(), {dt, steps});
  const fock::ModeState2D exact = cavity::evolve_modes(fock::beamsplitter_state(8), dt * steps);
  return max_abs(field::project(out, 8).state.coeffs() - exact.coeffs());
}

Verdict evolution() {
  const double err = period_error(2 * kPi / 2000);
  const field::FieldGrid f = entangled_field();
  const field::FieldGrid after = cavity::evolve_splitstep(f, {2 * kPi / 2000, 1000});
  const double drift = std::abs(field::norm(after) - field::norm(f));
  const double ratio = period_error(2 * kPi / 200) / period_error(2 * kPi / 400);
  return {err < 1e-5 && drift < 1e-10 && ratio >= 3.5 && ratio <= 4.5,
          "period coefficient error " + num(err) + " (tol 1e-5), norm drift/1000 steps " + num(drift) +
              " (tol 1e-10), dt-halving ratio " + num(ratio) + " (3.5..4.5)"};
}

Verdict figure_one() {
  const fs::path dir = scratch("frames");
  const auto [code, secs] = timed_cli({"frames", "--out", dir.string()});
  if (code != 0) return {false, "cavbell frames exited with " + std::to_string(code)};
  const json m = json::parse(slurp(dir / "frames.json"));
  bool files = m["frames"].size() == 4;
  for (const auto& f : m["frames"]) files = files && fs::exists(dir / f["file"].get<std::string>());
  const double residual = m["rotation"]["residual_rad"];
  const double rate = m["rotation"]["rate"];
  const double mismatch = m["rotation_mismatch"]["pi4"];
  fs::remove_all(dir);
  return {files && residual < 1e-3 && mismatch < 1e-4,
          "rate " + num(rate) + " omega, " + m["rotation"]["direction"].get<std::string>() +
              " (candidates: omega, 2 omega), residual " + num(residual) +
              " rad (tol 1e-3), pi/4 rotation mismatch " + num(mismatch) + " (tol 1e-4), 4 frames " +
              (files ? "written" : "missing")};
}

Verdict sampling() {
  const field::FieldGrid f = entangled_field();
  antenna::StudyOptions opts;
  opts.seed = 20140101;
  opts.settings = fock::chsh_optimize(fock::beamsplitter_state(3)).settings;

  double exact_err = 0.0;
  for (int M : {16, 64, 144, 256}) {
    const antenna::SamplePlan plan = antenna::make_plan(antenna::Layout::uniform_grid, M, 4.0, 1, f.grid());
    const antenna::Reconstruction r = antenna::reconstruct(antenna::sample(f, plan, 0.0), 3, plan.describe());
    exact_err = std::max(exact_err, max_abs(r.state.coeffs() - fock::beamsplitter_state(3).coeffs()));
  }

  const std::vector<int> Ms{64, 144, 256, 576, 1024, 2304};
  const antenna::ConvergenceReport at_optimum = antenna::convergence_study(f, Ms, 0.05, 100, opts);
  antenna::StudyOptions paper = opts;
  paper.settings = fock::ChshSettings::paper();
  const antenna::ConvergenceReport at_paper = antenna::convergence_study(f, Ms, 0.05, 100, paper);
  const double slope = at_paper.slope.value_or(0.0);

  const antenna::ViolationStudy v = antenna::violation_study(f, 400, 0.02, 100, opts);
  return {exact_err <= 1e-8 && std::abs(slope + 0.5) <= 0.1 && v.percentile05 > 2.0,
          "noiseless error " + num(exact_err) + " (tol 1e-8), error slope " + num(slope) +
              " at paper settings (-0.5+-0.1; " + num(at_optimum.slope.value_or(0.0)) +
              " at the optimum, where the estimator is stationary), 5th percentile " + num(v.percentile05) +
              " (> 2)"};
}

Verdict collapse() {
  // the manifest echoes the output directory, so the rerun reuses it
  const fs::path dir = scratch("collapse");
  const auto snapshot = [&] {
    std::vector<std::string> files{slurp(dir / "collapse.json")};
    for (const auto& r : json::parse(files[0])["runs"]) files.push_back(slurp(dir / r["file"].get<std::string>()));
    return files;
  };
  const auto [code, secs] = timed_cli({"collapse", "--out", dir.string()});
  if (code != 0) return {false, "cavbell collapse exited with " + std::to_string(code)};
  const std::vector<std::string> first = snapshot();
  if (timed_cli({"collapse", "--out", dir.string()}).first != 0) return {false, "cavbell collapse rerun failed"};
  const bool identical = snapshot() == first;

  const json m = json::parse(first[0]);
  int settled = 0, anticorrelated = 0;
  for (const auto& r : m["runs"]) {
    settled += std::max(r["fidelity_01"].get<double>(), r["fidelity_10"].get<double>()) > 0.999;
    anticorrelated += r["parity_x"].get<double>() * r["parity_y"].get<double>() < 0.0;
  }
  const int runs = static_cast<int>(m["runs"].size());
  const double f01 = m["fractions"]["zero_one"], f10 = m["fractions"]["one_zero"];
  fs::remove_all(dir);
  const bool split = f01 >= 0.4 && f01 <= 0.6 && f10 >= 0.4 && f10 <= 0.6;
  return {runs == 200 && settled == runs && anticorrelated == runs && split && identical && secs < 30.0,
          std::to_string(settled) + "/" + std::to_string(runs) + " settled, " + std::to_string(anticorrelated) +
              " anticorrelated, split " + num(f01) + "/" + num(f10) + " (0.4..0.6), reruns " +
              (identical ? "byte-identical" : "differ") + ", runtime " + num(secs) + " s (limit 30)"};
}

Verdict invariants() {
  const modes::Grid1D g = modes::default_grid();
  const Eigen::MatrixXd basis = modes::eval_basis(8, g);
  const double ortho =
      (g.spacing() * basis.transpose() * basis - Eigen::MatrixXd::Identity(9, 9)).cwiseAbs().maxCoeff();

  double defect = 0.0;
  for (int nmax = 1; nmax <= 12; ++nmax) {
    Eigen::MatrixXcd d = fock::commutator_defect(nmax);
    defect = std::max(defect, std::abs(d(nmax, nmax) + double(nmax + 1)));
    d(nmax, nmax) = 0.0;
    defect = std::max(defect, max_abs(d));
  }

  const fock::SpinOps s = fock::spin_ops(4);
  const std::array<Eigen::Matrix2cd, 3> m{s.sx.entries.topLeftCorner(2, 2), s.sy.entries.topLeftCorner(2, 2),
                                          s.sz.entries.topLeftCorner(2, 2)};
  double pauli = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Eigen::Matrix2cd expected = (i == j ? 1.0 : 0.0) * Eigen::Matrix2cd::Identity();
      for (int k = 0; k < 3; ++k) expected -= oracle::I * (double((i - j) * (j - k) * (k - i)) / 2.0) * m[k];
      pauli = std::max(pauli, max_abs(m[i] * m[j] - expected));
    }
  }

  std::mt19937_64 rng(50);
  double equiv = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int nmax = 1 + k % 4;
    const fock::ModeState2D st = oracle::random_state(rng, nmax, nmax);
    const field::FieldGrid f = field::synthesize(st, g);
    const fock::SpinOps sp = fock::spin_ops(nmax);
    const fock::OperatorMatrix n = fock::number_op(nmax);
    const std::array<std::pair<const fock::OperatorMatrix*, field::DiffOpSpec>, 3> ops{
        {{&sp.sz, field::sz_form()}, {&sp.sx, field::sx_form()}, {&n, field::number_form()}}};
    for (const auto& [mx, fx] : ops)
      for (const auto& [my, fy] : ops)
        equiv = std::max(equiv, std::abs(fock::expect(st, *mx, *my) - field::expect_grid(f, fx, fy).value));
  }
  return {ortho <= 1e-10 && defect <= 1e-12 && pauli <= 1e-12 && equiv <= 1e-6,
          "orthonormality " + num(ortho) + " (1e-10), commutator defect " + num(defect) + " (1e-12), Pauli algebra " +
              num(pauli) + " (1e-12), oracle equivalence on 50 states " + num(equiv) + " (1e-6)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"CHSH maximum", chsh_maximum},
      {"Quadruple audit", paper_quadruple},
      {"Joint excitation", joint_excitation},
      {"Classical and Tsirelson bounds", bounds},
      {"Evolution fidelity", evolution},
      {"Rotating nodal line", figure_one},
      {"Sampling study", sampling},
      {"Parity-feedback collapse", collapse},
      {"Invariant suite", invariants},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v{false, ""};
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS  " : "FAIL  ") << name << ": " << v.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
