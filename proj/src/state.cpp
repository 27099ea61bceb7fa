#include "thermoplate/state.hpp"

#include <cmath>

#include "thermoplate/error.hpp"

namespace thermoplate {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::range: return "range";
    case ErrorKind::shape: return "shape";
    case ErrorKind::domain: return "domain";
    case ErrorKind::usage: return "usage";
    case ErrorKind::admissibility: return "admissibility";
    case ErrorKind::hypothesis: return "hypothesis";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::config: return "config";
    case ErrorKind::blowup: return "blowup";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

State::State(const BoxDomain& domain, double t)
    : u(domain), v(domain), theta(domain), time(t) {}

State::State(SpectralField u_, SpectralField v_, SpectralField theta_, double t)
    : u(std::move(u_)), v(std::move(v_)), theta(std::move(theta_)), time(t) {
  if (!(u.domain == v.domain) || !(u.domain == theta.domain)) {
    throw Error(ErrorKind::shape, "state components live on different domains");
  }
}

double y_norm(const State& state) {
  const auto mu = state.domain().mu();
  double sum = 0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double lu = mu[k] * state.u.coeffs[k];
    sum += lu * lu;
  }
  for (double c : state.v.coeffs) sum += c * c;
  for (double c : state.theta.coeffs) sum += c * c;
  return std::sqrt(sum);
}

double y_distance(const State& a, const State& b) {
  if (!(a.domain() == b.domain())) {
    throw Error(ErrorKind::shape, "y_distance between states on different domains");
  }
  const auto mu = a.domain().mu();
  double sum = 0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double du = mu[k] * (a.u.coeffs[k] - b.u.coeffs[k]);
    const double dv = a.v.coeffs[k] - b.v.coeffs[k];
    const double dt = a.theta.coeffs[k] - b.theta.coeffs[k];
    sum += du * du + dv * dv + dt * dt;
  }
  return std::sqrt(sum);
}

bool all_finite(const State& state) noexcept {
  for (const auto* f : {&state.u, &state.v, &state.theta}) {
    for (double c : f->coeffs) {
      if (!std::isfinite(c)) return false;
    }
  }
  return true;
}

}  // namespace thermoplate
