#include "core/timestepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/discretization.hpp"
#include "core/errors.hpp"

namespace ks1d {

void StepController::validate() const {
  if (!(dt_min > 0.0) || !(dt_min <= dt_init) || !(dt_init <= dt_max) || !std::isfinite(dt_max))
    fail(ErrorCode::Validation, "step controller needs 0 < dt_min <= dt_init <= dt_max");
  if (!(cfl_safety > 0.0) || !(cfl_safety <= 1.0))
    fail(ErrorCode::Validation, "cfl_safety must lie in (0, 1]");
  if (!(growth_cap > 0.0)) fail(ErrorCode::Validation, "growth_cap must be positive");
  if (!(max_growth_factor >= 1.0)) fail(ErrorCode::Validation, "max_growth_factor must be >= 1");
  if (max_steps == 0) fail(ErrorCode::Validation, "max_steps must be positive");
}

const char* to_string(Outcome::Kind kind) {
  switch (kind) {
    case Outcome::Kind::Bounded: return "Bounded";
    case Outcome::Kind::NumericalBlowup: return "NumericalBlowup";
    case Outcome::Kind::StepLimit: return "StepLimit";
  }
  return "Unknown";
}

namespace {

double max_of(const CellField& f) { return f.empty() ? 0.0 : *std::max_element(f.begin(), f.end()); }

void require_finite(const State& s) {
  for (std::size_t i = 0; i < s.u.size(); ++i)
    if (!std::isfinite(s.u[i])) fail(ErrorCode::NumericState, "u is not finite at index " + std::to_string(i));
  for (std::size_t i = 0; i < s.v.size(); ++i)
    if (!std::isfinite(s.v[i])) fail(ErrorCode::NumericState, "v is not finite at index " + std::to_string(i));
}

}  // namespace

std::pair<State, StepReport> step(const State& state, double dt, const Params& params,
                                  const DiffusionModel& model, const GridSpec& grid) {
  require_field(state.u, grid, "u");
  require_field(state.v, grid, "v");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::InputDomain, "step needs dt > 0");

  StepReport rep;
  rep.dt_used = dt;
  rep.u_max_before = max_of(state.u);
  auto reject = [&](std::string why) {
    rep.accepted = false;
    rep.u_max_after = rep.u_max_before;
    rep.reject_reason = std::move(why);
    return std::pair<State, StepReport>{state, rep};
  };

  const std::size_t n = grid.n_cells();
  const CellField adv = chemotaxis_rates(state, params, grid);
  CellField ustar(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = state.u[i] + dt * adv[i];
    if (x < 0.0) {
      if (x < -kClipLimit) return reject("positivity undershoot in the explicit transport stage");
      x = 0.0;
      ++rep.positivity_clips;
    }
    ustar[i] = x;
  }
  const std::vector<double> coeff_u = face_diffusivity(state.u, model);
  CellField unew = implicit_diffusion_solve(ustar, coeff_u, dt, grid);

  CellField vrhs(n);
  for (std::size_t i = 0; i < n; ++i)
    vrhs[i] = state.v[i] + dt * (state.u[i] - params.mass + params.gamma * state.v[i]) / params.eps;
  const std::vector<double> coeff_v(n - 1, params.D / params.eps);
  CellField vnew = implicit_diffusion_solve(vrhs, coeff_v, dt, grid);

  auto scale = [](const CellField& f) {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    return 1.0 + m;
  };
  const double res_u = implicit_residual(unew, ustar, coeff_u, dt, grid) / scale(ustar);
  const double res_v = implicit_residual(vnew, vrhs, coeff_v, dt, grid) / scale(vrhs);
  rep.solver_residual = std::max(res_u, res_v);

  State next{state.t + dt, std::move(unew), std::move(vnew)};
  require_finite(next);
  if (rep.solver_residual > kSolverTolerance) return reject("implicit solve residual above tolerance");
  for (double& x : next.u) {
    if (x < 0.0) {
      if (x < -kClipLimit) return reject("positivity undershoot after the implicit stage");
      x = 0.0;
      ++rep.positivity_clips;
    }
  }
  // Round-off only: the scheme conserves mass exactly in exact arithmetic.
  {
    double before = 0.0, after = 0.0;
    for (double x : state.u) before += x;
    for (double x : next.u) after += x;
    if (after > 0.0) {
      const double f = before / after;
      if (std::abs(f - 1.0) < 1e-11)
        for (double& x : next.u) x *= f;
    }
  }
  if (params.gamma == 0.0) {
    double s = 0.0;
    for (double x : next.v) s += x;
    const double mean = s / static_cast<double>(n);
    for (double& x : next.v) x -= mean;
  }
  rep.accepted = true;
  rep.u_max_after = max_of(next.u);
  return {std::move(next), rep};
}

double cfl_limit(const State& state, const StepController& controller, const Params& params,
                 const GridSpec& grid) {
  const double speed = max_chemotactic_speed(state.v, params.chi, grid);
  if (speed <= 0.0) return controller.dt_max;
  return std::min(controller.dt_max, controller.cfl_safety * grid.h() / speed);
}

double adapt_dt(const StepReport& report, const StepController& controller, const State& state,
                const Params& params, const GridSpec& grid) {
  const double dt = report.dt_used;
  if (!report.accepted) return std::max(0.5 * dt, controller.dt_min);
  double next = std::min({controller.dt_max, controller.max_growth_factor * dt,
                          cfl_limit(state, controller, params, grid)});
  const double before = report.u_max_before;
  if (before > 0.0) {
    const double rel = std::abs(report.u_max_after - before) / before;
    if (rel > 0.0) next = std::min(next, dt * controller.growth_cap / rel);
  }
  return std::max(next, controller.dt_min);
}

std::optional<Outcome> detect_blowup(const State& state, double dt, const StepController& controller,
                                     const BlowupRule& rule, std::size_t consecutive_rejections,
                                     double mass, const GridSpec& grid) {
  const double umax = max_of(state.u);
  auto flag = [&](std::string why) {
    return Outcome{Outcome::Kind::NumericalBlowup, state.t, umax, std::move(why)};
  };
  if (umax >= rule.threshold) return flag("u_max reached the blowup threshold");
  if (rule.mass_fraction > 0.0 && umax * grid.h() >= rule.mass_fraction * mass)
    return flag("a single cell holds the configured fraction of the mass");
  if (dt <= controller.dt_min && consecutive_rejections >= rule.rejection_run)
    return flag("dt pinned at dt_min with repeated rejected steps");
  return std::nullopt;
}

Trajectory run(const State& initial, const Params& params, const DiffusionModel& model,
               const GridSpec& grid, const StepController& controller, const RunOptions& options) {
  params.validate();
  controller.validate();
  validate_state(initial, grid);
  if (!(options.t_end >= initial.t) || !std::isfinite(options.t_end))
    fail(ErrorCode::Validation, "t_end must be finite and not before the initial time");
  if (!(options.sample_cadence > 0.0)) fail(ErrorCode::Validation, "sample_cadence must be positive");
  const double v0_mean = v_mean(initial, grid);
  if (std::abs(v0_mean) > 1e-10) {
    std::ostringstream os;
    os << "initial v must have zero mean (|h sum v0| = " << std::abs(v0_mean) << " > 1e-10)";
    fail(ErrorCode::Validation, os.str());
  }
  const double m0 = mass(initial, grid);
  if (!(m0 > 0.0)) fail(ErrorCode::Validation, "initial mass must be positive");

  Trajectory traj;
  State state = initial;
  double dt = std::clamp(controller.dt_init, controller.dt_min, controller.dt_max);
  auto& stats = traj.stats;
  stats.min_u = *std::min_element(state.u.begin(), state.u.end());

  auto push_sample = [&](double dt_now) {
    DiagnosticsRecord rec = sample_diagnostics(state, dt_now, options.diagnostics, grid);
    if (!traj.rows.empty()) {
      const auto& prev = traj.rows.back();
      const double vt2 = std::min(prev.vt_l2 * prev.vt_l2, rec.vt_l2 * rec.vt_l2);
      rec.dissipation_residual = (rec.lambda - prev.lambda) / (rec.t - prev.t) + params.eps * vt2;
    }
    traj.rows.push_back(rec);
  };
  push_sample(dt);

  const double t0 = initial.t;
  std::size_t sample_index = 1;
  auto next_sample_time = [&] { return t0 + options.sample_cadence * static_cast<double>(sample_index); };
  std::size_t consecutive_rejections = 0;
  std::optional<Outcome> outcome;

  while (state.t < options.t_end) {
    if (stats.steps >= controller.max_steps) {
      outcome = Outcome{Outcome::Kind::StepLimit, state.t, max_of(state.u), "step limit reached"};
      break;
    }
    double dt_try = std::max(std::min(dt, cfl_limit(state, controller, params, grid)), controller.dt_min);
    const double remaining = options.t_end - state.t;
    const bool last = dt_try >= remaining;
    if (last) dt_try = remaining;

    auto [next, rep] = step(state, dt_try, params, model, grid);
    if (!rep.accepted) {
      ++stats.rejections;
      ++consecutive_rejections;
      dt = adapt_dt(rep, controller, state, params, grid);
      if (auto b = detect_blowup(state, dt, controller, options.blowup, consecutive_rejections, m0, grid)) {
        outcome = *b;
        break;
      }
      continue;
    }
    consecutive_rejections = 0;
    state = std::move(next);
    if (last) state.t = options.t_end;
    ++stats.steps;
    stats.positivity_clips += rep.positivity_clips;
    stats.max_mass_drift = std::max(stats.max_mass_drift, std::abs(mass(state, grid) - m0) / m0);
    stats.max_abs_v_mean = std::max(stats.max_abs_v_mean, std::abs(v_mean(state, grid)));
    stats.min_u = std::min(stats.min_u, *std::min_element(state.u.begin(), state.u.end()));
    dt = adapt_dt(rep, controller, state, params, grid);

    const auto blown = detect_blowup(state, dt, controller, options.blowup, 0, m0, grid);
    if (state.t >= next_sample_time() || state.t >= options.t_end || blown) {
      push_sample(rep.dt_used);
      while (next_sample_time() <= state.t) ++sample_index;
    }
    if (blown) {
      outcome = *blown;
      break;
    }
  }
  if (!outcome) outcome = Outcome{Outcome::Kind::Bounded, state.t, max_of(state.u), "t_end reached"};
  if (traj.rows.back().t < state.t) push_sample(dt);
  traj.final_state = std::move(state);
  traj.outcome = *outcome;
  return traj;
}

}  // namespace ks1d
