#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "thermoplate/spectral.hpp"

namespace thermoplate {

/// Bounded time profile: constant(c) or base + amplitude * sin(frequency * t + phase).
struct Modulation {
  enum class Kind { constant, sinusoidal };

  static Modulation constant(double value);
  static Modulation sinusoidal(double base, double amplitude, double frequency, double phase);

  double value(double t) const noexcept;
  double derivative(double t) const noexcept;
  double lower() const noexcept;
  double upper() const noexcept;
  double max_abs() const noexcept;
  double max_abs_derivative() const noexcept;

  bool operator==(const Modulation&) const = default;

  Kind kind = Kind::constant;
  double base = 0.0;
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
};

/// Coupling coefficient a(t) with declared bounds [a0, a1] and Hoelder data (C, beta).
struct CoefficientFunction {
  static CoefficientFunction constant(double c);
  /// Declared data default to the sharp values: a0 = base - |amp|,
  /// a1 = base + |amp|, C = |amp * freq|, beta = 1.
  static CoefficientFunction sinusoidal(double base, double amplitude, double frequency,
                                        double phase);

  Modulation shape;
  double a0 = 1.0;
  double a1 = 1.0;
  double hoelder_c = 0.0;
  double hoelder_beta = 1.0;

  bool operator==(const CoefficientFunction&) const = default;
};

/// Throws Error(admissibility) if the declared data are inconsistent
/// (a0 <= 0, a0 > a1, beta outside (0, 1], shape leaving [a0, a1]).
void check_declared(const CoefficientFunction& a);

/// a(t); throws Error(admissibility) when the value leaves [a0, a1].
double eval_a(const CoefficientFunction& a, double t);

struct HoelderWitness {
  double t = 0;
  double s = 0;
  double value = 0;
  std::string what;
};

struct CoefficientReport {
  double a0_emp = 0;
  double a1_emp = 0;
  double c_emp = 0;
  bool pass = false;
  std::vector<HoelderWitness> violations;
};

/// Grid scan of a(t) over [t_begin, t_end]: empirical extrema and Hoelder
/// quotient sup |a(t) - a(s)| / |t - s|^beta against the declared data.
CoefficientReport validate_a(const CoefficientFunction& a, double t_begin, double t_end,
                             double step);

class NonlinearitySpec {
 public:
  enum class Kind { zero, modulated_sine, modulated_saturating, soft_cubic };

  static NonlinearitySpec zero();
  /// p(t) sin(s)
  static NonlinearitySpec modulated_sine(Modulation p);
  /// p(t) s / (1 + s^2)
  static NonlinearitySpec modulated_saturating(Modulation p);
  /// gamma s - cubic s^3 (cubic >= 0; cubic = 0 gives a linear term).
  static NonlinearitySpec soft_cubic(double gamma, double cubic = 1.0);

  Kind kind() const noexcept { return kind_; }
  bool is_zero() const noexcept { return kind_ == Kind::zero; }
  const Modulation& modulation() const noexcept { return p_; }
  double gamma() const noexcept { return gamma_; }
  double cubic() const noexcept { return cubic_; }

  /// Growth exponent in |f_s| <= C (1 + |s|^(rho - 1)).
  double rho() const noexcept;

  double f(double t, double s) const noexcept;
  /// Phi(t, s) = int_0^s f(t, sigma) dsigma
  double antiderivative(double t, double s) const noexcept;
  double ds(double t, double s) const noexcept;
  /// d/dt Phi(t, s)
  double dt_antiderivative(double t, double s) const noexcept;

  /// Range [p_min, p_max] of the modulation; {1, 1} for unmodulated variants.
  std::pair<double, double> modulation_range() const noexcept;
  double max_abs_modulation_rate() const noexcept;

  bool operator==(const NonlinearitySpec&) const = default;

 private:
  Kind kind_ = Kind::zero;
  Modulation p_ = Modulation::constant(0.0);
  double gamma_ = 0.0;
  double cubic_ = 0.0;
};

// Variant formulas at a given modulation value p instead of a time, so sups
// over t can be taken at the extremes of p (every variant is affine in p).
double f_at(const NonlinearitySpec& f, double p, double s);
double phi_at(const NonlinearitySpec& f, double p, double s);
double fs_at(const NonlinearitySpec& f, double p, double s);

double eval_f(const NonlinearitySpec& f, double t, double s);
double eval_antiderivative(const NonlinearitySpec& f, double t, double s);

/// lambda1 - sup f(t, s) / s over |s| in [S/10, S] and sampled t.
/// Throws Error(admissibility) when the margin is not positive.
double dissipativity_margin(const NonlinearitySpec& f, double lambda1, double S = 1e3,
                            double s_step = 0.0);

/// Coefficients of the superposition operator x -> f(t, u(x)).
SpectralField nemytskii(const NonlinearitySpec& f, double t, const SpectralField& u);

/// Scratch-buffer form used by the integrator: writes f(t, u) coefficients to out.
void nemytskii_into(const NonlinearitySpec& f, double t, const BoxDomain& domain,
                    std::span<const double> u, std::span<double> grid_scratch,
                    std::span<double> out);

/// sup |u(x)| over the H^2 ball of radius r: (2/l)^(d/2) sqrt(sum 1/mu_k^2) r.
double sup_norm_bound(const BoxDomain& domain, double r);

struct ScalarBounds {
  double growth_c = 0;   // sup |f_s| / (1 + |s|^(rho-1))
  double lipschitz = 0;  // sup |f_s| for |s| <= s_max
};

/// Grid scan of f_s over |s| <= s_max and the modulation extremes.
ScalarBounds scalar_bounds(const NonlinearitySpec& f, double s_max);

struct LipschitzReport {
  double empirical = 0;      // sup |f(u) - f(w)|_L2 / |u - w|_H2 over sampled pairs
  double scalar_bound = 0;   // sup|f_s| / lambda1 on the ball
  double growth_c = 0;
  double lemma_max_ratio = 0;  // max of |f(s1)-f(s2)| / pointwise bound on sampled scalars
  std::size_t pairs = 0;
};

/// Empirical Lipschitz constant of u -> f(t, u) from H^2 into L^2 over the
/// ball of radius r, with the pointwise two-point bound checked on scalars.
LipschitzReport lipschitz_estimate(const NonlinearitySpec& f, const BoxDomain& domain, double r,
                                   std::size_t samples, std::uint64_t seed = 1, double t = 0.0);

}  // namespace thermoplate
