#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/model.hpp"

namespace ks1d {

struct StepController {
  double dt_init = 1e-4;
  double dt_min = 1e-12;
  double dt_max = 1e-2;
  double cfl_safety = 0.4;
  double growth_cap = 0.1;  // relative change of u_max per step
  double max_growth_factor = 1.2;
  std::size_t max_steps = 50'000'000;

  void validate() const;
};

struct StepReport {
  double dt_used = 0.0;
  double u_max_before = 0.0;
  double u_max_after = 0.0;
  double solver_residual = 0.0;
  std::size_t positivity_clips = 0;
  bool accepted = false;
  std::string reject_reason;
};

struct Outcome {
  enum class Kind { Bounded, NumericalBlowup, StepLimit };
  Kind kind = Kind::Bounded;
  double t_est = 0.0;  // NumericalBlowup: last accepted time; otherwise the final time
  double u_max_final = 0.0;
  std::string reason;
};

const char* to_string(Outcome::Kind kind);

/// Numerical blowup rules. `mass_fraction` > 0 adds an opt-in
/// grid-concentration rule: a single cell holding that fraction of the total
/// mass. Off by default; it also fires on resolved-but-sharp steady spikes.
struct BlowupRule {
  double threshold = 1e8;
  std::size_t rejection_run = 5;
  double mass_fraction = 0.0;
};

inline constexpr double kSolverTolerance = 1e-10;
inline constexpr double kClipLimit = 1e-13;

/// One linearly implicit IMEX step. Diffusion of both fields is backward Euler
/// with coefficients frozen at the old state; chemotaxis (upwind) and the
/// v-source are explicit. With gamma = 0 the discrete mean of v is projected
/// to zero. Rejected steps return the input state unchanged.
std::pair<State, StepReport> step(const State& state, double dt, const Params& params,
                                  const DiffusionModel& model, const GridSpec& grid);

/// Largest dt allowed by the advective CFL bound on `state`.
double cfl_limit(const State& state, const StepController& controller, const Params& params,
                 const GridSpec& grid);

double adapt_dt(const StepReport& report, const StepController& controller, const State& state,
                const Params& params, const GridSpec& grid);

std::optional<Outcome> detect_blowup(const State& state, double dt, const StepController& controller,
                                     const BlowupRule& rule, std::size_t consecutive_rejections,
                                     double mass, const GridSpec& grid);

struct RunOptions {
  double t_end = 1.0;
  double sample_cadence = 0.05;
  BlowupRule blowup{};
  DiagnosticsContext diagnostics{};
};

struct RunStats {
  std::size_t steps = 0;
  std::size_t rejections = 0;
  std::size_t positivity_clips = 0;
  double max_mass_drift = 0.0;  // relative, over the whole run
  double max_abs_v_mean = 0.0;
  double min_u = 0.0;
};

struct Trajectory {
  std::vector<DiagnosticsRecord> rows;
  State final_state;
  Outcome outcome;
  RunStats stats;
};

/// Validates the inputs (including |h sum v0| <= 1e-10) and advances until
/// t_end, numerical blowup, or the step limit.
Trajectory run(const State& initial, const Params& params, const DiffusionModel& model,
               const GridSpec& grid, const StepController& controller, const RunOptions& options);

}  // namespace ks1d
