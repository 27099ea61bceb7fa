#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "thermoplate/dynamics.hpp"
#include "thermoplate/energy.hpp"

namespace thermoplate {

struct DecayInequalityReport {
  bool applicable = true;
  std::string reason;        // why the check does not apply
  double max_plate_norm = 0;  // max |Laplacian u| along the trajectory
  double c_fd = 0;
  double tolerance = 0;
  double worst_margin = 0;   // min of -M1 E + M2 - L' over checked samples
  double max_violation = 0;  // max of (L' + M1 E - M2 - tolerance)_+
  std::size_t violations = 0;
  std::vector<double> times;
  std::vector<double> margins;
};

/// L' <= -M1 E + M2 with L' from centred differences on the recorded samples.
/// The tolerance at each sample is c_fd h^2, with c_fd from comparing spacings
/// h and 2h around that sample, plus a round-off floor. c_fd and tolerance in
/// the report are the largest values used. Inapplicable outside the r-ball.
DecayInequalityReport verify_decay_inequality(const TrajectoryRecord& trajectory,
                                              const LyapunovConfig& config);

struct EquivalenceReport {
  double worst_lower = 0;  // min of L - (beta3 E - beta4)
  double worst_upper = 0;  // min of beta1 E + beta2 - L
  std::size_t violations = 0;
  std::size_t checked = 0;
};

/// beta3 E - beta4 <= L <= beta1 E + beta2 on every recorded sample.
EquivalenceReport verify_equivalence(const TrajectoryRecord& trajectory,
                                     const LyapunovConfig& config);

/// Same inequality evaluated state by state.
EquivalenceReport verify_equivalence(const std::vector<State>& states, const PhysicalParams& params,
                                     const NonlinearitySpec& f, const LyapunovConfig& config);

struct EnvelopeReport {
  double gamma1 = 0, gamma2 = 0, omega_bar = 0;
  double worst_ratio = 0;  // max of |y|^2 / envelope
  std::size_t violations = 0;
};

/// |y(t)|^2 <= gamma1 exp(-omega_bar (t - tau)) + gamma2 with tau the first sample.
EnvelopeReport decay_envelope_check(const TrajectoryRecord& trajectory,
                                    const LyapunovConfig& config);

/// C1 E + C1' - |y|^2 for one state; negative means the lower energy bound fails.
double energy_lower_bound_slack(const State& state, const PhysicalParams& params,
                                const NonlinearitySpec& f, const LyapunovConfig& config);

}  // namespace thermoplate
