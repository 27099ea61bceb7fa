#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <doctest.h>

#include "thermoplate/error.hpp"
#include "thermoplate/state.hpp"

#define CHECK_ERROR_KIND(expr, expected)                              \
  do {                                                                \
    bool thrown_ = false;                                             \
    try {                                                             \
      (void)(expr);                                                   \
    } catch (const thermoplate::Error& e_) {                          \
      thrown_ = true;                                                 \
      CHECK_MESSAGE(e_.kind() == (expected), e_.what());              \
    }                                                                 \
    CHECK_MESSAGE(thrown_, "no thermoplate::Error from " #expr);      \
  } while (0)

namespace testing_support {

inline std::vector<double> normals(std::size_t count, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<double> out(count);
  for (auto& x : out) x = nd(rng);
  return out;
}

/// State with smooth random coefficients (u decays like mu^-2, v and theta like mu^-1).
inline thermoplate::State smooth_state(const thermoplate::BoxDomain& domain, std::uint64_t seed,
                                       double scale = 1.0) {
  thermoplate::State s(domain);
  const auto mu = domain.mu();
  auto a = normals(domain.mode_count(), seed, scale);
  auto b = normals(domain.mode_count(), seed + 1000, scale);
  auto c = normals(domain.mode_count(), seed + 2000, scale);
  for (std::size_t k = 0; k < domain.mode_count(); ++k) {
    s.u.coeffs[k] = a[k] / (mu[k] * mu[k]);
    s.v.coeffs[k] = b[k] / mu[k];
    s.theta.coeffs[k] = c[k] / mu[k];
  }
  return s;
}

/// smooth_state restricted to the modes with mu <= mu_cut.
inline thermoplate::State low_mode_state(const thermoplate::BoxDomain& domain, std::uint64_t seed,
                                         double mu_cut, double scale = 1.0) {
  thermoplate::State s = smooth_state(domain, seed, scale);
  const auto mu = domain.mu();
  for (std::size_t k = 0; k < domain.mode_count(); ++k) {
    if (mu[k] > mu_cut) s.u.coeffs[k] = s.v.coeffs[k] = s.theta.coeffs[k] = 0.0;
  }
  return s;
}

}  // namespace testing_support
