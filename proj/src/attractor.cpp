#include "thermoplate/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "thermoplate/error.hpp"

namespace thermoplate {

EnsembleSet sample_ball(const BoxDomain& domain, double R, std::size_t m, std::uint64_t seed) {
  if (!(R >= 0) || m < 1) {
    throw Error(ErrorKind::usage, "sample_ball needs R >= 0 and at least one member");
  }
  EnsembleSet set;
  set.radius = R;
  set.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const auto mu = domain.mu();
  const std::size_t n = domain.mode_count();
  for (std::size_t i = 0; i < m; ++i) {
    State s(domain, 0.0);
    for (std::size_t k = 0; k < n; ++k) s.u.coeffs[k] = normal(rng) / (mu[k] * mu[k]);
    for (std::size_t k = 0; k < n; ++k) s.v.coeffs[k] = normal(rng) / mu[k];
    for (std::size_t k = 0; k < n; ++k) s.theta.coeffs[k] = normal(rng) / mu[k];
    const double target = R * uniform(rng);
    const double y = y_norm(s);
    const double scale = y > 0 ? target / y : 0.0;
    for (auto* field : {&s.u, &s.v, &s.theta}) {
      for (double& c : field->coeffs) c *= scale;
    }
    set.members.push_back(std::move(s));
  }
  return set;
}

double hausdorff_semidist(const EnsembleSet& A, const EnsembleSet& B) {
  if (A.members.empty() || B.members.empty()) {
    throw Error(ErrorKind::usage, "Hausdorff semidistance of an empty set");
  }
  double sup = 0;
  for (const auto& a : A.members) {
    double inf = std::numeric_limits<double>::infinity();
    for (const auto& b : B.members) inf = std::min(inf, y_distance(a, b));
    sup = std::max(sup, inf);
  }
  return sup;
}

double cloud_radius(const EnsembleSet& set) {
  double r = 0;
  for (const auto& s : set.members) r = std::max(r, y_norm(s));
  return r;
}

double tail_fraction(const EnsembleSet& set) {
  double tail = 0, total = 0;
  for (const auto& s : set.members) {
    const auto mu = s.domain().mu();
    const double cut = 0.5 * s.domain().mu_max();
    for (std::size_t k = 0; k < mu.size(); ++k) {
      const double lu = mu[k] * s.u.coeffs[k];
      const double e = lu * lu + s.v.coeffs[k] * s.v.coeffs[k] + s.theta.coeffs[k] * s.theta.coeffs[k];
      total += e;
      if (mu[k] > cut) tail += e;
    }
  }
  return total > 0 ? tail / total : 0.0;
}

std::vector<double> geometric_schedule(double T0, std::size_t levels) {
  std::vector<double> out;
  for (std::size_t n = 0; n < levels; ++n) out.push_back(T0 * std::ldexp(1.0, static_cast<int>(n)));
  return out;
}

PullbackResult pullback_iterate(const PullbackRun& run, const BoxDomain& domain,
                                const PhysicalParams& params, const NonlinearitySpec& f,
                                unsigned threads) {
  if (run.schedule.empty()) {
    throw Error(ErrorKind::usage, "pullback schedule is empty");
  }
  for (std::size_t i = 0; i < run.schedule.size(); ++i) {
    if (!(run.schedule[i] > 0) || (i > 0 && !(run.schedule[i] > run.schedule[i - 1]))) {
      throw Error(ErrorKind::usage, "pullback schedule must be positive and strictly increasing");
    }
  }
  if (!(run.radius > 0) || run.members < 1) {
    throw Error(ErrorKind::usage, "pullback run needs R > 0 and at least one member");
  }
  const EnsembleSet ball = sample_ball(domain, run.radius, run.members, run.seed);
  PullbackResult result;
  for (double T : run.schedule) {
    PullbackLevel level;
    level.horizon = T;
    level.tau = run.target_time - T;
    level.cloud.radius = run.radius;
    level.cloud.seed = run.seed;
    level.cloud.members =
        evolve_ensemble(ball.members, params, f, level.tau, run.target_time, run.dt, threads);
    level.radius = cloud_radius(level.cloud);
    level.tail = tail_fraction(level.cloud);
    level.d = result.levels.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : hausdorff_semidist(level.cloud, result.levels.back().cloud);
    result.levels.push_back(std::move(level));
    if (result.levels.size() > 1 && result.levels.back().d < run.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

double absorbing_radius(const LyapunovConfig& config) {
  const Envelope env = decay_envelope(config, 0.0);
  return 1.1 * std::sqrt(env.gamma2);
}

}  // namespace thermoplate
