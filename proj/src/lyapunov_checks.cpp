#include "thermoplate/lyapunov_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace thermoplate {

namespace {

bool uniform(const std::vector<double>& t, std::size_t i, std::size_t reach, double h) {
  for (std::size_t j = i - reach; j < i + reach; ++j) {
    if (std::abs((t[j + 1] - t[j]) - h) > 1e-9 * h) return false;
  }
  return true;
}

}  // namespace

DecayInequalityReport verify_decay_inequality(const TrajectoryRecord& tr,
                                              const LyapunovConfig& c) {
  DecayInequalityReport rep;
  const std::size_t n = tr.times.size();
  for (const auto& e : tr.energies) {
    rep.max_plate_norm = std::max(rep.max_plate_norm, std::sqrt(2.0 * e.plate / c.eta));
  }
  if (rep.max_plate_norm > c.radius) {
    std::ostringstream msg;
    msg << "trajectory leaves the ball: max |Laplacian u| = " << rep.max_plate_norm
        << " > r = " << c.radius;
    rep.applicable = false;
    rep.reason = msg.str();
    return rep;
  }
  if (n < 5) {
    rep.applicable = false;
    rep.reason = "need at least 5 samples for centred differences";
    return rep;
  }
  const double h = tr.times[1] - tr.times[0];
  auto L = [&](std::size_t i) { return tr.energies[i].L; };

  // Richardson: D_2h - D_h is about three times the error of D_h.
  std::vector<double> gap(n, 0.0);
  double max_abs_l = 0;
  for (std::size_t i = 0; i < n; ++i) max_abs_l = std::max(max_abs_l, std::abs(L(i)));
  for (std::size_t i = 2; i + 2 < n; ++i) {
    if (!uniform(tr.times, i, 2, h)) continue;
    const double d1 = (L(i + 1) - L(i - 1)) / (2 * h);
    const double d2 = (L(i + 2) - L(i - 2)) / (4 * h);
    gap[i] = std::abs(d2 - d1);
  }
  gap[1] = gap[2];
  gap[n - 2] = gap[n - 3];
  const double roundoff = 4.0 * std::numeric_limits<double>::epsilon() * max_abs_l / h;

  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!uniform(tr.times, i, 1, h)) continue;
    const double local = std::max({gap[i - 1], gap[i], gap[i + 1]});
    const double c_fd = 2.0 * local / (3.0 * h * h);
    const double tol = c_fd * h * h + roundoff;
    rep.c_fd = std::max(rep.c_fd, c_fd);
    rep.tolerance = std::max(rep.tolerance, tol);
    const double deriv = (L(i + 1) - L(i - 1)) / (2 * h);
    const double margin = -c.M1 * tr.energies[i].E + c.M2 - deriv;
    rep.times.push_back(tr.times[i]);
    rep.margins.push_back(margin);
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -tol) {
      ++rep.violations;
      rep.max_violation = std::max(rep.max_violation, -margin - tol);
    }
  }
  return rep;
}

namespace {

void accumulate(EquivalenceReport& rep, double E, double L, const LyapunovConfig& c) {
  const double lower = L - (c.beta3 * E - c.beta4);
  const double upper = c.beta1 * E + c.beta2 - L;
  const double slack = 1e-12 * (std::abs(L) + c.beta1 * std::abs(E) + c.beta2);
  if (rep.checked == 0) {
    rep.worst_lower = lower;
    rep.worst_upper = upper;
  }
  rep.worst_lower = std::min(rep.worst_lower, lower);
  rep.worst_upper = std::min(rep.worst_upper, upper);
  if (lower < -slack || upper < -slack) ++rep.violations;
  ++rep.checked;
}

}  // namespace

EquivalenceReport verify_equivalence(const TrajectoryRecord& tr, const LyapunovConfig& c) {
  EquivalenceReport rep;
  for (const auto& e : tr.energies) accumulate(rep, e.E, e.L, c);
  return rep;
}

EquivalenceReport verify_equivalence(const std::vector<State>& states, const PhysicalParams& params,
                                     const NonlinearitySpec& f, const LyapunovConfig& c) {
  EquivalenceReport rep;
  for (const auto& s : states) {
    const EnergyReport e = energy_E(s, params, f, &c);
    accumulate(rep, e.E, e.L, c);
  }
  return rep;
}

EnvelopeReport decay_envelope_check(const TrajectoryRecord& tr, const LyapunovConfig& c) {
  EnvelopeReport rep;
  if (tr.times.empty()) return rep;
  const Envelope env = decay_envelope(c, tr.energies.front().L);
  rep.gamma1 = env.gamma1;
  rep.gamma2 = env.gamma2;
  rep.omega_bar = env.omega_bar;
  const double tau = tr.times.front();
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const double y2 = tr.y_norms[i] * tr.y_norms[i];
    const double bound = env.gamma1 * std::exp(-env.omega_bar * (tr.times[i] - tau)) + env.gamma2;
    if (bound > 0) rep.worst_ratio = std::max(rep.worst_ratio, y2 / bound);
    if (y2 > bound * (1 + 1e-12) + 1e-300) ++rep.violations;
  }
  return rep;
}

double energy_lower_bound_slack(const State& state, const PhysicalParams& params,
                                const NonlinearitySpec& f, const LyapunovConfig& c) {
  const EnergyReport e = energy_E(state, params, f);
  const double y = y_norm(state);
  return c.C1 * e.E + c.c_eps_prime - y * y;
}

}  // namespace thermoplate
