#include "thermoplate/energy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "thermoplate/error.hpp"

namespace thermoplate {

namespace {

template <class Fn>
double grid_sum(const State& state, Fn&& pointwise) {
  const BoxDomain& domain = state.domain();
  std::vector<double> grid(domain.mode_count());
  domain.inverse(state.u.coeffs, grid);
  double sum = 0;
  for (double g : grid) sum += pointwise(g);
  return domain.cell_volume() * sum;
}

// Max of fn on a uniform grid over [lo, hi], raised by the largest jump
// between neighbours as a cheap bound on what the grid can miss.
double scan_sup(const std::function<double(double)>& fn, double lo, double hi,
                std::size_t points = 200001) {
  double best = -std::numeric_limits<double>::infinity();
  double jump = 0;
  double prev = fn(lo);
  for (std::size_t i = 0; i < points; ++i) {
    const double s = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double value = fn(s);
    best = std::max(best, value);
    jump = std::max(jump, std::abs(value - prev));
    prev = value;
  }
  return best + jump;
}

}  // namespace

double potential(const State& state, const NonlinearitySpec& f) {
  if (f.is_zero()) return 0.0;
  const double t = state.time;
  return grid_sum(state, [&](double s) { return f.antiderivative(t, s); });
}

double potential_rate(const State& state, const NonlinearitySpec& f) {
  if (f.max_abs_modulation_rate() == 0) return 0.0;
  const double t = state.time;
  return grid_sum(state, [&](double s) { return f.dt_antiderivative(t, s); });
}

double phi(const State& state) {
  double sum = 0;
  for (std::size_t k = 0; k < state.u.coeffs.size(); ++k) {
    sum += state.u.coeffs[k] * state.v.coeffs[k];
  }
  return sum;
}

double psi(const State& state) {
  const auto mu = state.domain().mu();
  double sum = 0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    sum += state.v.coeffs[k] * state.theta.coeffs[k] / mu[k];
  }
  return sum;
}

double thermal_dissipation(const State& state, double kappa) {
  const auto mu = state.domain().mu();
  double sum = 0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    sum += mu[k] * state.theta.coeffs[k] * state.theta.coeffs[k];
  }
  return kappa * sum;
}

EnergyReport energy_E(const State& state, const PhysicalParams& params, const NonlinearitySpec& f,
                      const LyapunovConfig* config) {
  EnergyReport r;
  const double v = norm(state.v, NormSpace::L2);
  const double lu = norm(state.u, NormSpace::H2);
  const double th = norm(state.theta, NormSpace::L2);
  r.kinetic = 0.5 * v * v;
  r.plate = 0.5 * params.eta * lu * lu;
  r.thermal = 0.5 * th * th;
  r.potential = potential(state, f);
  r.E = r.kinetic + r.plate + r.thermal - r.potential;
  r.phi = phi(state);
  r.psi = psi(state);
  r.L = config != nullptr ? config->M * r.E + config->delta1 * r.phi + config->delta2 * r.psi
                          : std::numeric_limits<double>::quiet_NaN();
  return r;
}

std::vector<InvariantCheck> check_invariants(const LyapunovConfig& c) {
  std::vector<InvariantCheck> out;
  auto positive = [&](std::string name, double value) {
    out.push_back({std::move(name), value, value > 0 && std::isfinite(value)});
  };
  auto nonnegative = [&](std::string name, double value) {
    out.push_back({std::move(name), value, value >= 0 && std::isfinite(value)});
  };
  positive("delta1 > 0", c.delta1);
  positive("delta2 - delta1 > 0", c.delta2 - c.delta1);
  positive("1 - delta2 > 0", 1.0 - c.delta2);
  positive("M > 0", c.M);
  nonnegative("2 - eta >= 0", 2.0 - c.eta);
  positive("nu > 0", c.nu);
  positive("lambda1 eta / mu1 - nu > 0", c.lambda1 * c.eta / c.mu1 - c.nu);
  positive("C_eta > 0", c.c_eta);
  positive("window lower endpoint > 0", c.window_lo);
  positive("delta1 - window lower endpoint > 0", c.delta1 - c.window_lo);
  positive("a0 delta2 / C_kappa - delta1 > 0", c.a0 * c.delta2 / c.c_kappa - c.delta1);
  positive("M kappa / 2 - eta / 2 - c0 / (2 lambda1) > 0",
           c.M * c.kappa / 2 - c.eta / 2 - c.c0 / (2 * c.lambda1));
  positive("kappa lambda1 M / 2 - a1 / 2 - kappa / (2 delta1) - a1 delta2 > 0",
           c.kappa * c.lambda1 * c.M / 2 - c.a1 / 2 - c.kappa / (2 * c.delta1) - c.a1 * c.delta2);
  positive("M - delta1 Ct1 - delta2 Ct3 > 0", c.M - c.delta1 * c.ct1 - c.delta2 * c.ct3);
  positive("velocity margin > 0", c.margin_v);
  positive("plate margin > 0", c.margin_a);
  positive("thermal margin > 0", c.margin_t);
  positive("M1 > 0", c.M1);
  nonnegative("M2 >= 0", c.M2);
  positive("beta1 > 0", c.beta1);
  nonnegative("beta2 >= 0", c.beta2);
  positive("beta3 > 0", c.beta3);
  nonnegative("beta4 >= 0", c.beta4);
  if (c.linear) {
    out.push_back({"M2 = 0 without nonlinearity", -std::abs(c.M2), c.M2 == 0});
  }
  return out;
}

bool invariants_hold(const LyapunovConfig& config) {
  const auto checks = check_invariants(config);
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

LyapunovConfig choose_constants(const PhysicalParams& params, const NonlinearitySpec& f,
                                const BoxDomain& domain, double r, std::optional<double> delta2) {
  check_params(params);
  if (params.eta > 2) {
    std::ostringstream msg;
    msg << "the Lyapunov decay estimate needs 0 < eta <= 2 (got eta = " << params.eta << ")";
    throw Error(ErrorKind::hypothesis, msg.str());
  }
  if (!(r > 0)) {
    throw Error(ErrorKind::usage, "ball radius r must be positive");
  }

  LyapunovConfig c;
  c.eta = params.eta;
  c.kappa = params.kappa;
  c.a0 = params.a.a0;
  c.a1 = params.a.a1;
  c.lambda1 = domain.lambda1();
  c.volume = domain.volume();
  c.radius = r;
  c.rho = f.rho();
  c.linear = f.is_zero();

  const double l1 = c.lambda1;
  c.mu1 = 1.0 / l1;
  c.c0 = 1.0 / (l1 * l1);
  c.nu = 0.5 * l1 * c.eta / c.mu1;
  c.c_eta = c.eta - c.mu1 * c.nu / l1;
  c.c_kappa = 1.0 + c.kappa / 2.0;
  c.s_max = sup_norm_bound(domain, r);

  const double p_min = f.modulation_range().first;
  const double p_max = f.modulation_range().second;
  const double p_abs = std::max(std::abs(p_min), std::abs(p_max));
  auto over_p = [&](const std::function<double(double, double)>& g) {
    return [&, g](double s) { return std::max(g(p_min, s), g(p_max, s)); };
  };

  // |f(t, s)| <= L |s| on the sup-norm ball, so |f(u)|^2 <= (L / lambda1)^2 |Laplacian u|^2.
  double slope = 0;
  if (!c.linear) {
    slope = scan_sup(over_p([&](double p, double s) {
                       return s == 0 ? std::abs(fs_at(f, p, 0.0)) : std::abs(f_at(f, p, s) / s);
                     }),
                     -c.s_max, c.s_max);
  }
  c.c_bar1 = slope * slope / (l1 * l1);
  c.c_bar2 = 0.0;
  c.c_tilde0 = c.mu1 * c.eta / 2 + c.c_bar1 / 2 + c.a1 / 2;

  const double cap = std::min({1.0, c.a0 * c.c_eta / (c.c_tilde0 * c.c_kappa), c.c_eta / c.c_tilde0});
  c.delta2 = delta2.value_or(0.5 * cap);
  if (!(c.delta2 > 0 && c.delta2 < 1)) {
    throw Error(ErrorKind::infeasible, "delta2 must lie in (0, 1)");
  }
  c.window_lo = c.c_tilde0 / c.c_eta * c.delta2 * c.delta2;
  c.window_hi = std::min(c.a0 / c.c_kappa * c.delta2, c.delta2);
  if (!(c.window_lo < c.window_hi)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "empty delta1 window: lower endpoint " << c.window_lo << " >= upper endpoint "
        << c.window_hi;
    throw Error(ErrorKind::infeasible, msg.str());
  }
  c.delta1 = std::sqrt(c.window_lo * c.window_hi);

  // Energy lower bound: integral of Phi <= eps |u|^2 + C_eps with eps = eta / (4 C0).
  const double C0 = 1.0 / (l1 * l1);
  c.epsilon = c.eta / (4.0 * C0);
  c.C1 = 1.0 / std::min(c.eta / 4.0, 0.5);
  const double gamma_abs = f.kind() == NonlinearitySpec::Kind::soft_cubic ? std::abs(f.gamma()) : 0.0;
  const double reach =
      20.0 + 4.0 * std::sqrt((p_abs + gamma_abs + 1.0) / std::min(c.epsilon, c.nu)) +
      4.0 * std::sqrt(gamma_abs + 1.0);
  double sup_phi_eps = 0;
  double sup_nu = 0;
  double k_phi = 0;
  double phi0 = 0;
  if (!c.linear) {
    sup_phi_eps = scan_sup(over_p([&](double p, double s) { return phi_at(f, p, s) - c.epsilon * s * s; }),
                           -reach, reach);
    sup_nu = scan_sup(over_p([&](double p, double s) { return f_at(f, p, s) * s - c.nu * s * s; }),
                      -reach, reach);
    k_phi = scan_sup(over_p([&](double p, double s) {
                       return s == 0 ? -0.5 * fs_at(f, p, 0.0) : -phi_at(f, p, s) / (s * s);
                     }),
                     -c.s_max, c.s_max);
    if (f.max_abs_modulation_rate() > 0) {
      phi0 = scan_sup([&](double s) { return std::abs(phi_at(f, 1.0, s)); }, -c.s_max, c.s_max);
    }
  }
  c.c_eps = c.volume * std::max(0.0, sup_phi_eps);
  c.c_eps_prime = c.C1 * c.c_eps;
  c.c_nu = c.volume * std::max(0.0, sup_nu);
  k_phi = std::max(0.0, k_phi);

  c.delta0 = 0.5;
  c.c_delta0 = 1.0 / (2.0 * l1 * l1);
  const double m_phi = std::max(0.5, 1.0 / (2.0 * l1 * l1));
  const double m_psi = std::max(c.c_delta0, c.delta0);
  c.ct1 = m_phi * c.C1;
  c.ct2 = m_phi * c.c_eps_prime;
  c.ct3 = m_psi * c.C1;
  c.ct4 = m_psi * c.c_eps_prime;

  c.m_bound_g = (c.eta + c.c0 / l1) / c.kappa;
  c.m_bound_t = (c.a1 + 2 * c.a1 * c.delta2 + c.kappa / c.delta1) / (c.kappa * l1);
  c.m_bound_eq = c.delta1 * c.ct1 + c.delta2 * c.ct3;
  c.M = 2.0 * std::max({c.m_bound_g, c.m_bound_t, c.m_bound_eq});

  c.margin_v = c.delta2 * c.a0 - c.delta1 * (1.0 + c.delta2 * c.kappa / 2.0);
  c.margin_a = c.c_eta * c.delta1 - c.c_tilde0 * c.delta2 * c.delta2;
  c.margin_t = 0.5 * (c.kappa * l1 * c.M - c.a1 - c.kappa / c.delta1 - 2 * c.a1 * c.delta2);
  c.m_bar1 = std::min({2 * c.margin_v, 2 * c.margin_a / c.eta, 2 * c.margin_t});

  const double c_bar = 1.0 + k_phi / (l1 * l1);
  c.d_bar = 1.0 / (c_bar * (1.0 + std::pow(r, c.rho - 1.0)));
  c.M1 = c.m_bar1 * c.eta * c.d_bar / 4.0;
  const double modulation_term =
      c.M * c.volume * f.max_abs_modulation_rate() * phi0;
  c.M2 = c.delta2 * c.delta2 * c.c_bar2 / 2.0 + c.delta1 * c.c_nu + modulation_term;

  c.beta1 = c.M + c.delta1 * c.ct1 + c.delta2 * c.ct3;
  c.beta3 = c.M - c.delta1 * c.ct1 - c.delta2 * c.ct3;
  c.beta2 = c.delta1 * c.ct2 + c.delta2 * c.ct4;
  c.beta4 = c.beta2;

  c.sigma1 = c.M1 / c.beta1;
  c.sigma2 = c.M1 * c.beta2 / c.beta1 + c.M2;
  c.omega_bar = c.sigma1;

  for (const auto& check : check_invariants(c)) {
    if (!check.pass) {
      std::ostringstream msg;
      msg << "chosen constants violate " << check.name << " (value " << check.value << ")";
      throw Error(ErrorKind::infeasible, msg.str());
    }
  }
  return c;
}

double lyapunov_L(const State& state, const PhysicalParams& params, const NonlinearitySpec& f,
                  const LyapunovConfig& config) {
  if (!invariants_hold(config)) {
    throw Error(ErrorKind::config, "Lyapunov constants are not admissible");
  }
  return energy_E(state, params, f, &config).L;
}

Envelope decay_envelope(const LyapunovConfig& c, double L_tau) {
  Envelope env;
  env.omega_bar = c.omega_bar;
  env.gamma1 = c.C1 * std::max(0.0, L_tau) / c.beta3;
  env.gamma2 = c.C1 * (c.sigma2 / c.sigma1 + c.beta4) / c.beta3 + c.c_eps_prime;
  return env;
}

}  // namespace thermoplate
