#include "thermoplate/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "thermoplate/error.hpp"

namespace thermoplate {

Modulation Modulation::constant(double value) {
  Modulation m;
  m.kind = Kind::constant;
  m.base = value;
  return m;
}

Modulation Modulation::sinusoidal(double base, double amplitude, double frequency, double phase) {
  Modulation m;
  m.kind = Kind::sinusoidal;
  m.base = base;
  m.amplitude = amplitude;
  m.frequency = frequency;
  m.phase = phase;
  return m;
}

double Modulation::value(double t) const noexcept {
  if (kind == Kind::constant) return base;
  return base + amplitude * std::sin(frequency * t + phase);
}

double Modulation::derivative(double t) const noexcept {
  if (kind == Kind::constant) return 0.0;
  return amplitude * frequency * std::cos(frequency * t + phase);
}

double Modulation::lower() const noexcept {
  return kind == Kind::constant ? base : base - std::abs(amplitude);
}

double Modulation::upper() const noexcept {
  return kind == Kind::constant ? base : base + std::abs(amplitude);
}

double Modulation::max_abs() const noexcept {
  return std::max(std::abs(lower()), std::abs(upper()));
}

double Modulation::max_abs_derivative() const noexcept {
  return kind == Kind::constant ? 0.0 : std::abs(amplitude * frequency);
}

CoefficientFunction CoefficientFunction::constant(double c) {
  CoefficientFunction a;
  a.shape = Modulation::constant(c);
  a.a0 = c;
  a.a1 = c;
  a.hoelder_c = 0.0;
  a.hoelder_beta = 1.0;
  return a;
}

CoefficientFunction CoefficientFunction::sinusoidal(double base, double amplitude,
                                                    double frequency, double phase) {
  CoefficientFunction a;
  a.shape = Modulation::sinusoidal(base, amplitude, frequency, phase);
  a.a0 = a.shape.lower();
  a.a1 = a.shape.upper();
  a.hoelder_c = a.shape.max_abs_derivative();
  a.hoelder_beta = 1.0;
  return a;
}

void check_declared(const CoefficientFunction& a) {
  std::ostringstream msg;
  if (!(a.a0 > 0)) {
    msg << "coefficient lower bound a0 = " << a.a0 << " must be positive";
  } else if (!(a.a0 <= a.a1)) {
    msg << "coefficient bounds need a0 <= a1 (got " << a.a0 << " > " << a.a1 << ")";
  } else if (!(a.hoelder_beta > 0 && a.hoelder_beta <= 1)) {
    msg << "Hoelder exponent beta = " << a.hoelder_beta << " outside (0, 1]";
  } else if (!(a.hoelder_c >= 0)) {
    msg << "Hoelder constant must be nonnegative";
  } else if (a.shape.lower() < a.a0 - 1e-12 || a.shape.upper() > a.a1 + 1e-12) {
    msg << "coefficient range [" << a.shape.lower() << ", " << a.shape.upper()
        << "] leaves the declared bounds [" << a.a0 << ", " << a.a1 << "]";
  } else {
    return;
  }
  throw Error(ErrorKind::admissibility, msg.str());
}

double eval_a(const CoefficientFunction& a, double t) {
  const double value = a.shape.value(t);
  if (value < a.a0 - 1e-12 || value > a.a1 + 1e-12) {
    std::ostringstream msg;
    msg << "a(" << t << ") = " << value << " outside declared [" << a.a0 << ", " << a.a1 << "]";
    throw Error(ErrorKind::admissibility, msg.str());
  }
  return value;
}

CoefficientReport validate_a(const CoefficientFunction& a, double t_begin, double t_end,
                             double step) {
  if (!(step > 0) || !(t_end >= t_begin)) {
    throw Error(ErrorKind::usage, "validate_a needs step > 0 and t_end >= t_begin");
  }
  const auto count = static_cast<std::size_t>(std::floor((t_end - t_begin) / step)) + 1;
  std::vector<double> ts(count);
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    ts[i] = t_begin + static_cast<double>(i) * step;
    values[i] = a.shape.value(ts[i]);
  }

  CoefficientReport report;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  report.a0_emp = *lo;
  report.a1_emp = *hi;
  if (report.a0_emp < a.a0 - 1e-12) {
    const double t = ts[static_cast<std::size_t>(lo - values.begin())];
    report.violations.push_back({t, t, report.a0_emp, "below declared a0"});
  }
  if (report.a1_emp > a.a1 + 1e-12) {
    const double t = ts[static_cast<std::size_t>(hi - values.begin())];
    report.violations.push_back({t, t, report.a1_emp, "above declared a1"});
  }

  HoelderWitness worst{};
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const double q =
          std::abs(values[j] - values[i]) / std::pow(ts[j] - ts[i], a.hoelder_beta);
      if (q > report.c_emp) {
        report.c_emp = q;
        worst = {ts[i], ts[j], q, "Hoelder quotient above declared C"};
      }
    }
  }
  if (report.c_emp > a.hoelder_c + 1e-9) {
    report.violations.push_back(worst);
  }
  report.pass = report.violations.empty();
  return report;
}

NonlinearitySpec NonlinearitySpec::zero() { return {}; }

NonlinearitySpec NonlinearitySpec::modulated_sine(Modulation p) {
  NonlinearitySpec f;
  f.kind_ = Kind::modulated_sine;
  f.p_ = p;
  return f;
}

NonlinearitySpec NonlinearitySpec::modulated_saturating(Modulation p) {
  NonlinearitySpec f;
  f.kind_ = Kind::modulated_saturating;
  f.p_ = p;
  return f;
}

NonlinearitySpec NonlinearitySpec::soft_cubic(double gamma, double cubic) {
  if (!(cubic >= 0)) {
    throw Error(ErrorKind::admissibility, "soft_cubic needs a nonnegative cubic coefficient");
  }
  NonlinearitySpec f;
  f.kind_ = Kind::soft_cubic;
  f.gamma_ = gamma;
  f.cubic_ = cubic;
  return f;
}

double NonlinearitySpec::rho() const noexcept {
  return (kind_ == Kind::soft_cubic && cubic_ > 0) ? 3.0 : 1.0;
}

double f_at(const NonlinearitySpec& f, double p, double s) {
  switch (f.kind()) {
    case NonlinearitySpec::Kind::zero: return 0.0;
    case NonlinearitySpec::Kind::modulated_sine: return p * std::sin(s);
    case NonlinearitySpec::Kind::modulated_saturating: return p * s / (1.0 + s * s);
    case NonlinearitySpec::Kind::soft_cubic: return f.gamma() * s - f.cubic() * s * s * s;
  }
  return 0.0;
}

double phi_at(const NonlinearitySpec& f, double p, double s) {
  switch (f.kind()) {
    case NonlinearitySpec::Kind::zero: return 0.0;
    case NonlinearitySpec::Kind::modulated_sine: return p * (1.0 - std::cos(s));
    case NonlinearitySpec::Kind::modulated_saturating: return 0.5 * p * std::log1p(s * s);
    case NonlinearitySpec::Kind::soft_cubic:
      return 0.5 * f.gamma() * s * s - 0.25 * f.cubic() * s * s * s * s;
  }
  return 0.0;
}

double fs_at(const NonlinearitySpec& f, double p, double s) {
  switch (f.kind()) {
    case NonlinearitySpec::Kind::zero: return 0.0;
    case NonlinearitySpec::Kind::modulated_sine: return p * std::cos(s);
    case NonlinearitySpec::Kind::modulated_saturating: {
      const double q = 1.0 + s * s;
      return p * (1.0 - s * s) / (q * q);
    }
    case NonlinearitySpec::Kind::soft_cubic: return f.gamma() - 3.0 * f.cubic() * s * s;
  }
  return 0.0;
}

namespace {

bool modulated(const NonlinearitySpec& f) {
  return f.kind() == NonlinearitySpec::Kind::modulated_sine ||
         f.kind() == NonlinearitySpec::Kind::modulated_saturating;
}

double p_of(const NonlinearitySpec& f, double t) {
  return modulated(f) ? f.modulation().value(t) : 1.0;
}

}  // namespace

double NonlinearitySpec::f(double t, double s) const noexcept { return f_at(*this, p_of(*this, t), s); }

double NonlinearitySpec::antiderivative(double t, double s) const noexcept {
  return phi_at(*this, p_of(*this, t), s);
}

double NonlinearitySpec::ds(double t, double s) const noexcept {
  return fs_at(*this, p_of(*this, t), s);
}

double NonlinearitySpec::dt_antiderivative(double t, double s) const noexcept {
  if (!modulated(*this)) return 0.0;
  return phi_at(*this, p_.derivative(t), s);
}

std::pair<double, double> NonlinearitySpec::modulation_range() const noexcept {
  if (!modulated(*this)) return {1.0, 1.0};
  return {p_.lower(), p_.upper()};
}

double NonlinearitySpec::max_abs_modulation_rate() const noexcept {
  return modulated(*this) ? p_.max_abs_derivative() : 0.0;
}

double eval_f(const NonlinearitySpec& f, double t, double s) { return f.f(t, s); }

double eval_antiderivative(const NonlinearitySpec& f, double t, double s) {
  return f.antiderivative(t, s);
}

double dissipativity_margin(const NonlinearitySpec& f, double lambda1, double S, double s_step) {
  if (!(S > 0)) {
    throw Error(ErrorKind::usage, "dissipativity scan needs S > 0");
  }
  const double lo = S / 10.0;
  if (!(s_step > 0)) s_step = (S - lo) / 10000.0;
  const auto count = static_cast<std::size_t>(std::ceil((S - lo) / s_step)) + 1;
  const auto [p_min, p_max] = f.modulation_range();

  double sup = -std::numeric_limits<double>::infinity();
  for (double p : {p_min, p_max}) {
    for (std::size_t i = 0; i < count; ++i) {
      const double s = std::min(S, lo + static_cast<double>(i) * s_step);
      sup = std::max({sup, f_at(f, p, s) / s, f_at(f, p, -s) / -s});
    }
  }
  const double margin = lambda1 - sup;
  if (!(margin > 0)) {
    std::ostringstream msg;
    msg << "nonlinearity is not dissipative: sup f(t,s)/s = " << sup
        << " is not below lambda1 = " << lambda1;
    throw Error(ErrorKind::admissibility, msg.str());
  }
  return margin;
}

void nemytskii_into(const NonlinearitySpec& f, double t, const BoxDomain& domain,
                    std::span<const double> u, std::span<double> grid_scratch,
                    std::span<double> out) {
  if (f.is_zero()) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  domain.inverse(u, grid_scratch);
  const double p = p_of(f, t);
  for (double& g : grid_scratch) {
    g = f_at(f, p, g);
  }
  domain.forward(grid_scratch, out);
}

SpectralField nemytskii(const NonlinearitySpec& f, double t, const SpectralField& u) {
  for (double c : u.coeffs) {
    if (!std::isfinite(c)) {
      throw Error(ErrorKind::domain, "nemytskii applied to a non-finite field");
    }
  }
  SpectralField out(u.domain);
  std::vector<double> scratch(u.domain.mode_count());
  nemytskii_into(f, t, u.domain, u.coeffs, scratch, out.coeffs);
  return out;
}

double sup_norm_bound(const BoxDomain& domain, double r) {
  double sum = 0;
  for (double m : domain.mu()) sum += 1.0 / (m * m);
  return std::pow(2.0 / domain.length(), 0.5 * domain.dimension()) * std::sqrt(sum) * r;
}

ScalarBounds scalar_bounds(const NonlinearitySpec& f, double s_max) {
  ScalarBounds out;
  const auto [p_min, p_max] = f.modulation_range();
  const double wide = std::max(s_max, 100.0);
  constexpr int kPoints = 20001;
  for (double p : {p_min, p_max}) {
    for (int i = 0; i < kPoints; ++i) {
      const double x = -1.0 + 2.0 * i / (kPoints - 1);
      const double s_ball = x * s_max;
      out.lipschitz = std::max(out.lipschitz, std::abs(fs_at(f, p, s_ball)));
      const double s = x * wide;
      const double weight = 1.0 + std::pow(std::abs(s), f.rho() - 1.0);
      out.growth_c = std::max(out.growth_c, std::abs(fs_at(f, p, s)) / weight);
    }
  }
  return out;
}

LipschitzReport lipschitz_estimate(const NonlinearitySpec& f, const BoxDomain& domain, double r,
                                   std::size_t samples, std::uint64_t seed, double t) {
  if (!(r > 0) || samples < 2) {
    throw Error(ErrorKind::usage, "lipschitz_estimate needs r > 0 and at least 2 samples");
  }
  LipschitzReport report;
  const double s_max = sup_norm_bound(domain, r);
  const ScalarBounds bounds = scalar_bounds(f, s_max);
  const double lambda1 = domain.lambda1();
  report.scalar_bound = bounds.lipschitz / lambda1;
  report.growth_c = bounds.growth_c;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const auto mu = domain.mu();
  const std::size_t count = domain.mode_count();

  auto sample = [&] {
    SpectralField u(domain);
    for (std::size_t k = 0; k < count; ++k) u.coeffs[k] = normal(rng) / (mu[k] * mu[k]);
    const double h2 = norm(u, NormSpace::H2);
    const double scale = h2 > 0 ? r * uniform(rng) / h2 : 0.0;
    for (double& c : u.coeffs) c *= scale;
    return u;
  };

  for (std::size_t i = 0; i < samples; ++i) {
    const SpectralField u = sample();
    const SpectralField w = sample();
    SpectralField diff(domain);
    for (std::size_t k = 0; k < count; ++k) diff.coeffs[k] = u.coeffs[k] - w.coeffs[k];
    const double denom = norm(diff, NormSpace::H2);
    if (denom == 0) continue;
    const SpectralField fu = nemytskii(f, t, u);
    const SpectralField fw = nemytskii(f, t, w);
    for (std::size_t k = 0; k < count; ++k) diff.coeffs[k] = fu.coeffs[k] - fw.coeffs[k];
    report.empirical = std::max(report.empirical, norm(diff, NormSpace::L2) / denom);
    ++report.pairs;
  }

  // Pointwise two-point bound on sampled scalars.
  const double rho = f.rho();
  const double pre = std::pow(2.0, rho - 1.0) * bounds.growth_c;
  std::uniform_real_distribution<double> scalar(-s_max, s_max);
  const double tt = t;
  for (std::size_t i = 0; i < 64 * samples; ++i) {
    const double s1 = scalar(rng);
    const double s2 = scalar(rng);
    if (s1 == s2) continue;
    const double lhs = std::abs(f.f(tt, s1) - f.f(tt, s2));
    const double rhs = pre * std::abs(s1 - s2) *
                       (1.0 + std::pow(std::abs(s1), rho - 1.0) + std::pow(std::abs(s2), rho - 1.0));
    if (rhs > 0) report.lemma_max_ratio = std::max(report.lemma_max_ratio, lhs / rhs);
  }
  return report;
}

}  // namespace thermoplate
