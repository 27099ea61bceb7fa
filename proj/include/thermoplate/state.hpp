#pragma once

#include <span>

#include "thermoplate/spectral.hpp"

namespace thermoplate {

/// One point (u, v = u_t, theta) of the phase space H^2 x L^2 x L^2.
struct State {
  explicit State(const BoxDomain& domain, double t = 0.0);
  State(SpectralField u_, SpectralField v_, SpectralField theta_, double t = 0.0);

  const BoxDomain& domain() const noexcept { return u.domain; }

  SpectralField u;
  SpectralField v;
  SpectralField theta;
  double time = 0.0;
};

/// sqrt(|Laplacian u|^2 + |v|^2 + |theta|^2)
double y_norm(const State& state);

/// y_norm(a - b); domains must match.
double y_distance(const State& a, const State& b);

bool all_finite(const State& state) noexcept;

}  // namespace thermoplate
