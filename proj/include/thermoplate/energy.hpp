#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thermoplate/coeffs.hpp"
#include "thermoplate/operators.hpp"
#include "thermoplate/state.hpp"

namespace thermoplate {

struct LyapunovConfig;

struct EnergyReport {
  double kinetic = 0;    // |v|^2 / 2
  double plate = 0;      // eta |Laplacian u|^2 / 2
  double thermal = 0;    // |theta|^2 / 2
  double potential = 0;  // int Phi(t, u) by collocation quadrature
  double E = 0;
  double phi = 0;
  double psi = 0;
  double L = 0;  // M E + delta1 phi + delta2 psi; NaN when no constants were supplied
};

/// Collocation quadrature h^d sum Phi(t, u(x_i)).
double potential(const State& state, const NonlinearitySpec& f);
/// h^d sum dPhi/dt(t, u(x_i)).
double potential_rate(const State& state, const NonlinearitySpec& f);

/// sum u_k v_k
double phi(const State& state);
/// sum v_k theta_k / mu_k
double psi(const State& state);
/// kappa |grad theta|^2 = kappa sum mu_k theta_k^2
double thermal_dissipation(const State& state, double kappa);

EnergyReport energy_E(const State& state, const PhysicalParams& params, const NonlinearitySpec& f,
                      const LyapunovConfig* config = nullptr);

struct LyapunovConfig {
  // Problem data the constants were built for.
  double eta = 0, kappa = 0, a0 = 0, a1 = 0;
  double lambda1 = 0, volume = 0, radius = 0, rho = 1;

  // Embedding constants on the retained modes.
  double mu1 = 0;  // |grad u|^2 <= mu1 |Laplacian u|^2
  double c0 = 0;   // |grad Laplacian^-1 theta|^2 <= c0 |grad theta|^2
  double nu = 0;
  double c_eta = 0, c_kappa = 0, c_tilde0 = 0;
  double c_bar1 = 0, c_bar2 = 0, c_nu = 0;
  double s_max = 0;

  double delta1 = 0, delta2 = 0, M = 0;
  double window_lo = 0, window_hi = 0;
  double m_bound_g = 0, m_bound_t = 0, m_bound_eq = 0;
  double margin_v = 0, margin_a = 0, margin_t = 0;
  double m_bar1 = 0, d_bar = 0;
  double M1 = 0, M2 = 0;

  // State-wise lower bound on the energy: |y|^2 <= C1 E + C1' .
  double epsilon = 0, C1 = 0, c_eps = 0, c_eps_prime = 0;
  double delta0 = 0.5, c_delta0 = 0;
  double ct1 = 0, ct2 = 0, ct3 = 0, ct4 = 0;
  double beta1 = 0, beta2 = 0, beta3 = 0, beta4 = 0;

  double sigma1 = 0, sigma2 = 0, omega_bar = 0;
  bool linear = false;
};

struct InvariantCheck {
  std::string name;
  double value = 0;  // positive means satisfied with this slack
  bool pass = false;
};

/// Every admissibility inequality of a LyapunovConfig, with slacks.
std::vector<InvariantCheck> check_invariants(const LyapunovConfig& config);
bool invariants_hold(const LyapunovConfig& config);

/// Throws hypothesis when eta > 2 and infeasible when the delta1 window is empty.
LyapunovConfig choose_constants(const PhysicalParams& params, const NonlinearitySpec& f,
                                const BoxDomain& domain, double r,
                                std::optional<double> delta2 = std::nullopt);

/// M E + delta1 phi + delta2 psi. Throws config if the constants are inadmissible.
double lyapunov_L(const State& state, const PhysicalParams& params, const NonlinearitySpec& f,
                  const LyapunovConfig& config);

/// gamma1 = C1 L(tau)_+ / beta3 and gamma2 = C1 (sigma2/sigma1 + beta4) / beta3 + C1'.
struct Envelope {
  double gamma1 = 0, gamma2 = 0, omega_bar = 0;
};
Envelope decay_envelope(const LyapunovConfig& config, double L_tau);

}  // namespace thermoplate
