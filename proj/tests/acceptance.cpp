// Acceptance suite: one PASS/FAIL line per criterion. Arguments, when given,
// select criteria by number.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qgrape/errors.hpp"
#include "qgrape/experiments.hpp"
#include "qgrape/fisher.hpp"
#include "qgrape/grape.hpp"
#include "qgrape/oracles.hpp"
#include "support.hpp"

namespace {

using namespace qgrape;
namespace ex = qgrape::experiments;
namespace o = qgrape::oracles;

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "MISS ") + what);
  }
  void note(const std::string& what) { lines.push_back("     " + what); }
};

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}
template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

int workers() { return std::max(1, omp_get_num_procs()); }

Trajectory constant_run(const NoiseModel& noise, double horizon, double vz, double dt) {
  const auto p = qubit_frequency_problem(1.0, xyz_controls(), noise, DensityState::plus(), horizon);
  const auto m = static_cast<Eigen::Index>(std::llround(horizon / dt));
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, 3);
  a.col(2).setConstant(vz);
  return propagate(p, ControlGrid(a, dt));
}

double qfi_at(const Trajectory& traj, std::size_t j) {
  return qfi(traj.states[j], traj.parameter_derivative(j), traj.parameter_second_derivative(j));
}

ex::ScenarioConfig transverse_config(double gamma, double horizon) {
  ex::ScenarioConfig c;
  c.noise = Dephasing{std::numbers::pi / 2, 0.0, gamma};
  c.horizon = horizon;
  c.ascent.seed = 1;
  c.workers = workers();
  return c;
}

// ---------------------------------------------------------------------------

Outcome transverse_closed_form() {
  Outcome r;
  for (double t : {1.0, 5.0, 10.0, 20.0}) {
    const Trajectory traj = constant_run(Dephasing{std::numbers::pi / 2, 0, 0.1}, t, -0.5, 1e-3);
    const double got = Objective::quantum().evaluate(traj);
    const double want = o::transverse_controlled_qfi(0.1, t);
    const double rel = std::abs(got - want) / want;
    r.check(rel <= 1e-3, fmt("T=%-4g numeric %.8f closed form %.8f rel err %.2e", t, got, want, rel));
  }
  return r;
}

// Uncontrolled QFI along one long trajectory, read on a grid of cell `cell`.
void free_decay(Outcome& r, const NoiseModel& noise, double gamma, double t_max,
                const std::function<double(double)>& closed, std::vector<double> probes,
                double t_opt) {
  const double dt = 1e-3, cell = 0.1;
  const Trajectory traj = constant_run(noise, t_max, 0.0, dt);
  const auto stride = static_cast<std::size_t>(std::llround(cell / dt));
  for (double t : probes) {
    const auto j = static_cast<std::size_t>(std::llround(t / dt));
    const double got = qfi_at(traj, j), want = closed(t);
    const double rel = std::abs(got - want) / want;
    r.check(rel <= 1e-3, fmt("t=%-4g numeric %.8f closed form %.8f rel err %.2e", t, got, want, rel));
  }
  double best = -1.0, arg = 0.0;
  for (std::size_t j = stride; j <= traj.steps(); j += stride) {
    const double f = qfi_at(traj, j);
    if (f > best) best = f, arg = static_cast<double>(j) * dt;
  }
  r.check(std::abs(arg - t_opt) <= cell + 1e-9,
          fmt("argmax on %.1f grid: t=%.2f (expected %.2f = %s/gamma, gamma=%.2g)", cell, arg, t_opt,
              t_opt * gamma > 1.5 ? "2" : "1", gamma));
}

Outcome parallel_uncontrolled() {
  Outcome r;
  free_decay(r, Dephasing{0, 0, 0.1}, 0.1, 30.0, [](double t) { return o::parallel_free_qfi(0.1, t); },
             {2.0, 10.0, 20.0}, 10.0);
  return r;
}

Outcome spontaneous_uncontrolled() {
  Outcome r;
  free_decay(r, SpontaneousEmission{0.0, 0.1}, 0.1, 40.0,
             [](double t) { return o::spontaneous_free_qfi(0.0, 0.1, t); }, {2.0, 10.0, 20.0, 30.0},
             20.0);
  return r;
}

Outcome gradient_oracle() {
  Outcome r;
  const std::vector<std::pair<std::string, NoiseModel>> models = {
      {"no dissipation", NoDissipation{}},
      {"transverse dephasing", Dephasing{std::numbers::pi / 2, 0, 0.1}},
      {"parallel dephasing", Dephasing{0, 0, 0.1}},
      {"tilted dephasing", Dephasing{0.7, 0.3, 0.1}},
      {"spontaneous emission", SpontaneousEmission{0.02, 0.1}}};
  std::mt19937_64 rng(2024);
  for (const auto& [name, noise] : models) {
    const auto p = qubit_frequency_problem(1.0, xyz_controls(), noise, DensityState::plus(), 2.0);
    for (const auto& obj : {Objective::quantum(), Objective::classical(Povm::plus_minus())}) {
      std::size_t bad = 0, total = 0;
      double worst = 0.0;
      for (int s = 0; s < 20; ++s) {
        const ControlGrid grid = testing::random_grid(rng, 40, 3, 0.05);
        const GradientTable g = gradient(propagate(p, grid), p, obj);
        const GradientTable fd = finite_difference_gradient(p, grid, obj, 1e-5);
        for (Eigen::Index i = 0; i < g.values.size(); ++i) {
          const double a = g.values.data()[i], b = fd.values.data()[i];
          const double abs_err = std::abs(a - b);
          const double rel_err = abs_err / std::max(std::abs(b), 1e-300);
          ++total;
          if (!(rel_err <= 1e-2 || abs_err <= 1e-6)) ++bad;
          worst = std::max(worst, std::min(rel_err, abs_err / 1e-6 * 1e-2));
        }
      }
      r.check(bad == 0, fmt("%-21s %s: %zu/%zu entries outside tolerance, worst rel err %.1e",
                            name.c_str(), obj.name().c_str(), bad, total, worst));
    }
  }
  return r;
}

double optimized_transverse_qfi(Outcome* r) {
  static std::optional<double> cached;
  if (cached) return *cached;
  const ex::ScenarioConfig c = transverse_config(0.1, 5.0);
  const AscentReport rep = ascend(c.problem(1.0, 5.0), c.ascent_config(), c.make_objective());
  if (rep.error) throw NumericalError(*rep.error);
  cached = rep.final_objective();
  if (r) {
    r->note(fmt("ascent: step %.2g, momentum %.2g, backtracking on, %zu iterations, seed %llu",
                c.ascent.step_size, c.ascent.momentum, rep.iterations_used,
                static_cast<unsigned long long>(c.ascent.seed)));
  }
  return *cached;
}

Outcome grape_recovers_optimum() {
  Outcome r;
  const double target = o::transverse_controlled_qfi(0.1, 5.0);
  const double f = optimized_transverse_qfi(&r);
  r.check(f >= 0.95 * target,
          fmt("random init, T=5, gamma=0.1: final QFI %.4f = %.4f x %.4f", f, f / target, target));
  // the plain update for comparison, same seed and budget
  ex::ScenarioConfig c = transverse_config(0.1, 5.0);
  c.ascent.momentum = 0.0;
  c.ascent.step_size = 0.1;
  const AscentReport plain = ascend(c.problem(1.0, 5.0), c.ascent_config(), c.make_objective());
  r.note(fmt("without momentum (step 0.1, backtracking): %.4f = %.4f x closed form",
             plain.final_objective(), plain.final_objective() / target));
  return r;
}

Outcome monotone_in_horizon() {
  Outcome r;
  const double dt = 0.01;
  const Trajectory traj = constant_run(Dephasing{std::numbers::pi / 2, 0, 0.1}, 30.0, -0.5, dt);
  double prev = -1.0;
  bool increasing = true;
  std::string values;
  for (int t = 1; t <= 30; ++t) {
    const double f = qfi_at(traj, static_cast<std::size_t>(std::llround(t / dt)));
    increasing = increasing && f > prev;
    if (t == 1 || t % 10 == 0) values += fmt("F(%d)=%.3f ", t, f);
    prev = f;
  }
  r.check(increasing, "controlled QFI (V_z = -omega0/2) strictly increasing on T = 1..30: " + values);
  double prev_cf = -1.0;
  bool cf_increasing = true;
  for (int t = 1; t <= 30; ++t) {
    const double f = o::transverse_controlled_qfi(0.1, t);
    cf_increasing = cf_increasing && f > prev_cf;
    prev_cf = f;
  }
  r.check(cf_increasing, "closed form strictly increasing on the same grid");
  return r;
}

Outcome theta_ordering() {
  Outcome r;
  ex::ScenarioConfig c = transverse_config(0.1, 5.0);
  c.sweep = ex::SweepSpec{ex::SweepAxis::Theta, {}, ex::RobustnessMode::Truth};
  for (int i = 0; i <= 10; ++i) c.sweep->values.push_back(std::numbers::pi * i / 10);
  const ex::RunRecord rec = ex::run_theta_sweep(c);
  std::vector<double> ratio;
  std::string row;
  for (const auto& p : rec.points) {
    if (!p.ok) {
      r.check(false, fmt("theta=%.3f failed: %s", p.axis, p.error.c_str()));
      return r;
    }
    ratio.push_back(p.extras[4]);
    row += fmt("%.4f ", p.extras[4]);
  }
  r.note("enhancement by theta/pi = 0, 0.1, .., 1: " + row);
  const auto max_at = std::max_element(ratio.begin(), ratio.end()) - ratio.begin();
  r.check(max_at == 5, fmt("maximum at theta = %.2f pi (ratio %.4f)", max_at / 10.0, ratio[max_at]));
  // theta = 0 and theta = pi are the same dissipator; they tie up to rounding.
  const double others = *std::min_element(ratio.begin() + 1, ratio.end() - 1);
  const double tie = std::abs(ratio.front() - ratio.back()) / ratio.front();
  r.check(ratio.front() <= others && ratio.front() <= ratio.back() * (1 + 1e-9),
          fmt("minimum at theta = 0: %.6f (next lowest interior %.6f, theta = pi %.6f, "
              "relative gap to theta = pi %.1e)",
              ratio.front(), others, ratio.back(), tie));
  return r;
}

Outcome single_pulse_parallel() {
  Outcome r;
  for (double horizon : {15.0, 5.0}) {
    double best = 0.0, arg = 0.0, interior = 0.0;
    const int n = 20000;
    for (int i = 0; i <= n; ++i) {
      const double t0 = horizon * i / n;
      const double f = o::parallel_single_pulse_qfi({t0, horizon, 0.1, 1.0, 1.0});
      if (f > best) best = f, arg = t0;
      if (t0 <= horizon - 0.05) interior = std::max(interior, f);
    }
    r.note(fmt("T=%g: best with t0 <= T - 0.05 is %.4f (a pulse at t0 = T leaves the QFI unchanged)",
               horizon, interior));
    const double free = o::parallel_free_qfi(0.1, horizon);
    if (horizon > 10.0) {
      r.check(best > free, fmt("T=15: max over t0 %.4f (t0=%.3f) > uncontrolled %.4f", best, arg, free));
    } else {
      r.check(best <= free, fmt("T=5: max over t0 %.4f (t0=%.3f) <= uncontrolled %.4f", best, arg, free));
    }
  }
  return r;
}

Outcome cfi_bounded_by_qfi() {
  Outcome r;
  std::mt19937_64 rng(99);
  double worst = -1e300;
  int violations = 0;
  for (int i = 0; i < 200; ++i) {
    const Mat2 rho = testing::matrix_from_bloch(testing::random_in_ball(rng));
    const Mat2 drho = testing::random_traceless_hermitian(rng);
    const Povm povm = testing::random_povm(rng, 2 + i % 4);
    const double gap = cfi(rho, drho, povm) - qfi(rho, drho);
    worst = std::max(worst, gap);
    violations += gap > 1e-9;
  }
  r.check(violations == 0, fmt("200 random triples: max (cfi - qfi) = %.3e", worst));

  ex::ScenarioConfig c = transverse_config(0.1, 5.0);
  c.objective = "cfi";
  const auto p = c.problem(1.0, 5.0);
  const AscentReport rep = ascend(p, c.ascent_config(), c.make_objective());
  if (rep.error) throw NumericalError(*rep.error);
  const Trajectory traj = propagate(p, rep.final_grid);
  const double f_c = rep.final_objective();
  const double f_q_same = Objective::quantum().evaluate(traj);
  const double f_q_opt = optimized_transverse_qfi(nullptr);
  const double closed = o::transverse_controlled_qfi(0.1, 5.0);
  r.check(f_c >= 0.98 * f_q_opt,
          fmt("CFI-optimized {|+>,|->}: CFI %.4f vs QFI-optimized QFI %.4f (ratio %.4f)", f_c, f_q_opt,
              f_c / f_q_opt));
  r.check(f_c >= 0.98 * f_q_same,
          fmt("same final state: CFI %.4f vs QFI %.4f (ratio %.4f)", f_c, f_q_same, f_c / f_q_same));
  r.note(fmt("closed-form optimum %.4f; CFI / closed form = %.4f", closed, f_c / closed));
  return r;
}

Outcome robustness() {
  Outcome r;
  ex::ScenarioConfig c = transverse_config(0.2, 20.0);
  c.sweep = ex::SweepSpec{ex::SweepAxis::OmegaHat, {}, ex::RobustnessMode::Truth};
  for (int i = 0; i <= 8; ++i) c.sweep->values.push_back(0.8 + 0.05 * i);
  c.sweep->values.back() = 1.2;
  const ex::RunRecord rec = ex::run_robustness_scan(c);
  bool all = true;
  std::string row;
  for (const auto& p : rec.points) {
    if (!p.ok) {
      r.check(false, fmt("omega=%.3f failed: %s", p.axis, p.error.c_str()));
      return r;
    }
    all = all && p.qfi > p.uncontrolled_qfi;
    row += fmt("%.2f:%.2f/%.2f ", p.axis, p.qfi, p.uncontrolled_qfi);
    if (std::abs(p.axis - 1.0) < 1e-12) {
      r.check(p.qfi >= 10.0 * p.uncontrolled_qfi,
              fmt("at omega0 = 1: controlled %.4f vs uncontrolled %.4f (ratio %.2f)", p.qfi,
                  p.uncontrolled_qfi, p.qfi / p.uncontrolled_qfi));
    }
  }
  r.check(all, "controlled > uncontrolled at all 9 true frequencies in [0.8, 1.2]");
  r.note("true omega0: controlled/uncontrolled  " + row);
  r.note("controls designed once at omega_hat = 1 and evaluated at each true omega0");
  return r;
}

Outcome energy() {
  Outcome r;
  for (double t : {1.0, 5.0, 20.0, 30.0}) {
    for (double dt : {0.05, 1e-3}) {
      const auto m = static_cast<Eigen::Index>(std::llround(t / dt));
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, 3);
      a.col(2).setConstant(-0.5);
      const double e = ex::energy_cost(ControlGrid(a, dt)).back().second;
      r.check(std::abs(e - 0.25 * t) <= 1e-9,
              fmt("constant optimum T=%-4g dt=%-5g: E(T)=%.12f, 0.25 T=%.12f", t, dt, e, 0.25 * t));
    }
  }
  std::mt19937_64 rng(11);
  int non_monotone = 0;
  for (int s = 0; s < 100; ++s) {
    const auto e = ex::energy_cost(testing::random_grid(rng, 200, 3, 0.05, 3.0));
    for (std::size_t i = 1; i < e.size(); ++i) non_monotone += e[i].second < e[i - 1].second;
  }
  r.check(non_monotone == 0, "E(t) nondecreasing for 100 random schedules");
  return r;
}

Outcome normalized_null_result() {
  Outcome r;
  ex::ScenarioConfig c = transverse_config(0.1, 5.0);
  c.noise = Dephasing{0.0, 0.0, 0.1};
  c.sweep = ex::SweepSpec{ex::SweepAxis::Horizon, {2.5, 5.0, 7.5, 10.0, 12.5, 15.0},
                          ex::RobustnessMode::Truth};
  const ex::RunRecord rec = ex::run_time_scan(c);
  double best_c = 0.0, best_u = 0.0;
  std::string row;
  for (const auto& p : rec.points) {
    if (!p.ok) {
      r.check(false, fmt("T=%.2f failed: %s", p.axis, p.error.c_str()));
      return r;
    }
    best_c = std::max(best_c, p.qfi / p.horizon);
    best_u = std::max(best_u, p.uncontrolled_qfi / p.horizon);
    row += fmt("%.1f:%.3f/%.3f ", p.axis, p.qfi / p.horizon, p.uncontrolled_qfi / p.horizon);
  }
  r.check(best_c <= 1.05 * best_u,
          fmt("max F/T optimized %.4f vs uncontrolled %.4f (ratio %.4f)", best_c, best_u, best_c / best_u));
  r.note("T: optimized F/T / uncontrolled F/T  " + row);
  r.note(fmt("uncontrolled max over all T: 5/e = %.4f", 5.0 * std::exp(-1.0)));
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"transverse dephasing closed form", transverse_closed_form},
      {"uncontrolled parallel dephasing", parallel_uncontrolled},
      {"uncontrolled spontaneous emission", spontaneous_uncontrolled},
      {"gradients match finite differences", gradient_oracle},
      {"GRAPE recovers the transverse optimum", grape_recovers_optimum},
      {"controlled transverse QFI increases with T", monotone_in_horizon},
      {"enhancement ordering over theta", theta_ordering},
      {"single-pulse parallel strategy", single_pulse_parallel},
      {"CFI bounded by and reaching QFI", cfi_bounded_by_qfi},
      {"robustness to frequency error", robustness},
      {"energy cost", energy},
      {"normalized QFI not improved", normalized_null_result},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%2d] %s  %s (%.1fs)\n", id, out.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), secs);
    for (const auto& line : out.lines) std::printf("       %s\n", line.c_str());
    std::fflush(stdout);
    failed += !out.pass;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
