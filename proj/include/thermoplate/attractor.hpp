#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "thermoplate/dynamics.hpp"
#include "thermoplate/energy.hpp"
#include "thermoplate/state.hpp"

namespace thermoplate {

struct EnsembleSet {
  std::vector<State> members;
  double radius = 0;       // sampling radius R
  std::uint64_t seed = 0;
};

/// m states with y_norm = R U(0,1); coefficients are seeded normals scaled by
/// mu^-2 for u and mu^-1 for v and theta before the rescaling.
EnsembleSet sample_ball(const BoxDomain& domain, double R, std::size_t m, std::uint64_t seed);

/// max over a in A of min over b in B of y_norm(a - b).
double hausdorff_semidist(const EnsembleSet& A, const EnsembleSet& B);

/// max y_norm over the members.
double cloud_radius(const EnsembleSet& set);

/// Share of the squared Y-norm carried by modes with mu > mu_max / 2.
double tail_fraction(const EnsembleSet& set);

struct PullbackRun {
  double target_time = 0;
  std::vector<double> schedule;  // horizons T_n, strictly increasing
  double radius = 1;
  std::size_t members = 1;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  double dt = 1e-2;
};

/// T0 2^n for n = 0 .. levels-1.
std::vector<double> geometric_schedule(double T0, std::size_t levels);

struct PullbackLevel {
  double horizon = 0;
  double tau = 0;
  EnsembleSet cloud;  // evolved to the target time
  double d = 0;       // semidistance to the previous cloud (NaN on the first level)
  double radius = 0;
  double tail = 0;
};

struct PullbackResult {
  std::vector<PullbackLevel> levels;
  bool converged = false;
};

/// Evolves the sampled ball from tau_n = t* - T_n to t* for each horizon and
/// stops once d_n < tol. Throws BlowUpError naming the member.
PullbackResult pullback_iterate(const PullbackRun& run, const BoxDomain& domain,
                                const PhysicalParams& params, const NonlinearitySpec& f,
                                unsigned threads = 1);

/// 1.1 sqrt(gamma2); zero without a nonlinearity.
double absorbing_radius(const LyapunovConfig& config);

}  // namespace thermoplate
