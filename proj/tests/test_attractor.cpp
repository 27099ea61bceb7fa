#include <cmath>
#include <vector>

#include <doctest.h>

#include "helpers.hpp"
#include "thermoplate/attractor.hpp"
#include "thermoplate/dynamics.hpp"

using namespace thermoplate;

namespace {

PhysicalParams sinusoidal_params() {
  PhysicalParams p;
  p.a = CoefficientFunction::sinusoidal(1.0, 0.25, 1.0, 0.0);
  return p;
}

EnsembleSet cloud_of(std::vector<State> members) {
  EnsembleSet set;
  set.members = std::move(members);
  return set;
}

bool same_state(const State& a, const State& b) {
  return a.u.coeffs == b.u.coeffs && a.v.coeffs == b.v.coeffs && a.theta.coeffs == b.theta.coeffs &&
         a.time == b.time;
}

}  // namespace

TEST_CASE("sampling a ball") {
  const BoxDomain d(2, 8);
  const auto zero = sample_ball(d, 0.0, 1, 3);
  REQUIRE(zero.members.size() == 1);
  CHECK(y_norm(zero.members[0]) == 0.0);

  const auto set = sample_ball(d, 5.0, 200, 11);
  CHECK(set.members.size() == 200);
  double largest = 0;
  for (const auto& s : set.members) {
    CHECK(y_norm(s) <= 5.0 + 1e-12);
    largest = std::max(largest, y_norm(s));
  }
  CHECK(largest > 4.0);

  const auto again = sample_ball(d, 5.0, 200, 11);
  for (std::size_t i = 0; i < 200; ++i) CHECK(same_state(set.members[i], again.members[i]));
  const auto other = sample_ball(d, 5.0, 200, 12);
  CHECK_FALSE(same_state(set.members[0], other.members[0]));
}

TEST_CASE("sampling needs a member") {
  CHECK_ERROR_KIND(sample_ball(BoxDomain(2, 4), 1.0, 0, 1), ErrorKind::usage);
}

TEST_CASE("semidistance examples") {
  const BoxDomain d(2, 4);
  const auto a = sample_ball(d, 2.0, 5, 1);
  CHECK(hausdorff_semidist(a, a) == 0.0);

  State s(d);
  s.u.coeffs[0] = 1.0;  // y_norm 2
  CHECK(hausdorff_semidist(cloud_of({s}), cloud_of({State(d)})) == doctest::Approx(2.0));

  State far(d);
  far.v.coeffs[3] = 10.0;
  auto bigger = a.members;
  bigger.push_back(far);
  CHECK(hausdorff_semidist(a, cloud_of(bigger)) == 0.0);
  CHECK(hausdorff_semidist(cloud_of(bigger), a) > 5.0);

  CHECK_ERROR_KIND(hausdorff_semidist(EnsembleSet{}, a), ErrorKind::usage);
}

TEST_CASE("property: semidistance triangle inequality") {
  const BoxDomain d(2, 5);
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto a = sample_ball(d, 3.0, 1 + seed % 5, seed);
    const auto b = sample_ball(d, 3.0, 1 + seed % 3, seed + 100);
    const auto c = sample_ball(d, 3.0, 2 + seed % 4, seed + 200);
    CHECK(hausdorff_semidist(a, c) <= hausdorff_semidist(a, b) + hausdorff_semidist(b, c) + 1e-12);
  }
}

TEST_CASE("cloud radius and tail fraction") {
  const BoxDomain d(2, 4);
  State s(d);
  s.v.coeffs[0] = 3.0;
  State t(d);
  t.v.coeffs[15] = 4.0;  // corner mode, mu = 32 > 16
  const auto set = cloud_of({s, t});
  CHECK(cloud_radius(set) == doctest::Approx(4.0));
  CHECK(tail_fraction(set) == doctest::Approx(16.0 / 25.0));
}

TEST_CASE("geometric schedule") {
  const auto s = geometric_schedule(5.0, 4);
  CHECK(s == std::vector<double>{5, 10, 20, 40});
}

TEST_CASE("linear pullback clouds contract to the origin") {
  const BoxDomain d(2, 6);
  PullbackRun run;
  run.schedule = {5, 10, 20};
  run.radius = 2.0;
  run.members = 6;
  run.seed = 4;
  run.tol = 0.0;
  run.dt = 1e-2;
  const auto res = pullback_iterate(run, d, sinusoidal_params(), NonlinearitySpec::zero());
  REQUIRE(res.levels.size() == 3);
  CHECK(std::isnan(res.levels[0].d));
  CHECK(res.levels[1].radius < res.levels[0].radius);
  CHECK(res.levels[2].radius < res.levels[1].radius);
  CHECK(res.levels[2].d < res.levels[1].d);
  CHECK_FALSE(res.converged);

  // contraction bound with fitted constants, 2x slack
  std::vector<TrajectoryRecord> runs;
  const auto ball = sample_ball(d, run.radius, run.members, run.seed);
  EvolutionConfig cfg;
  cfg.dt = run.dt;
  for (double T : run.schedule) {
    for (const auto& m : ball.members) runs.push_back(evolve(m, sinusoidal_params(), NonlinearitySpec::zero(), -T, 0.0, cfg));
  }
  std::vector<TrajectoryRecord> shifted;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    TrajectoryRecord r = runs[i];
    const double tau = r.times.front();
    for (double& t : r.times) t -= tau;
    shifted.push_back(std::move(r));
  }
  const DecayFit fit = decay_fit(shifted, 0.0, 0.0, 20.0);
  for (std::size_t n = 1; n < res.levels.size(); ++n) {
    const double bound = fit.K * run.radius *
                         (std::exp(-fit.alpha * run.schedule[n]) + std::exp(-fit.alpha * run.schedule[n - 1]));
    CHECK(res.levels[n].d <= 2 * bound);
  }
}

TEST_CASE("two-point pullback bound") {
  const BoxDomain d(2, 6);
  PullbackRun run;
  run.schedule = {10, 20};
  run.radius = 1.0;
  run.members = 1;
  run.seed = 9;
  run.tol = 0.0;
  const auto p = sinusoidal_params();
  const auto res = pullback_iterate(run, d, p, NonlinearitySpec::zero());
  REQUIRE(res.levels.size() == 2);

  const auto ball = sample_ball(d, run.radius, 1, run.seed);
  EvolutionConfig cfg;
  cfg.dt = run.dt;
  std::vector<TrajectoryRecord> runs;
  for (double T : run.schedule) {
    auto r = evolve(ball.members[0], p, NonlinearitySpec::zero(), -T, 0.0, cfg);
    const double tau = r.times.front();
    for (double& t : r.times) t -= tau;
    runs.push_back(std::move(r));
  }
  const DecayFit fit = decay_fit(runs, 0.0, 0.0, 20.0);
  CHECK(res.levels[1].d <= 2 * fit.K * run.radius * std::exp(-fit.alpha * 10.0));
}

TEST_CASE("pullback is deterministic and thread independent") {
  const BoxDomain d(2, 6);
  PullbackRun run;
  run.schedule = {2, 4, 8};
  run.members = 5;
  run.tol = 0.0;
  const auto f = NonlinearitySpec::modulated_sine(Modulation::sinusoidal(0.5, 0.25, 0.5, 0.0));
  const auto a = pullback_iterate(run, d, sinusoidal_params(), f, 1);
  const auto b = pullback_iterate(run, d, sinusoidal_params(), f, 3);
  REQUIRE(a.levels.size() == b.levels.size());
  for (std::size_t n = 1; n < a.levels.size(); ++n) CHECK(a.levels[n].d == b.levels[n].d);
  for (std::size_t i = 0; i < run.members; ++i) {
    CHECK(same_state(a.levels.back().cloud.members[i], b.levels.back().cloud.members[i]));
  }
}

TEST_CASE("invalid schedules are rejected") {
  const BoxDomain d(2, 4);
  PullbackRun run;
  run.schedule = {10, 5};
  CHECK_ERROR_KIND(pullback_iterate(run, d, PhysicalParams{}, NonlinearitySpec::zero()), ErrorKind::usage);
  run.schedule = {};
  CHECK_ERROR_KIND(pullback_iterate(run, d, PhysicalParams{}, NonlinearitySpec::zero()), ErrorKind::usage);
}

TEST_CASE("absorbing radius") {
  const BoxDomain d(2, 8);
  const auto c0 = choose_constants(sinusoidal_params(), NonlinearitySpec::zero(), d, 10.0);
  CHECK(absorbing_radius(c0) == 0.0);
  const auto f = NonlinearitySpec::modulated_sine(Modulation::sinusoidal(0.5, 0.25, 0.5, 0.0));
  const auto c = choose_constants(sinusoidal_params(), f, d, 10.0);
  const double r = absorbing_radius(c);
  CHECK(r == doctest::Approx(1.1 * std::sqrt(decay_envelope(c, 0.0).gamma2)));

  PullbackRun run;
  run.schedule = {10};
  run.members = 20;
  run.radius = 5.0;
  const auto res = pullback_iterate(run, d, sinusoidal_params(), f);
  CHECK(res.levels.back().radius <= r);
}
