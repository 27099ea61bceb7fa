#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "helpers.hpp"
#include "thermoplate/attractor.hpp"
#include "thermoplate/dynamics.hpp"
#include "thermoplate/energy.hpp"
#include "thermoplate/lyapunov_checks.hpp"

using namespace thermoplate;
using testing_support::smooth_state;

namespace {

const double kPi = std::numbers::pi;

PhysicalParams params(double eta = 1.0, bool sinusoidal = true) {
  PhysicalParams p;
  p.eta = eta;
  if (sinusoidal) p.a = CoefficientFunction::sinusoidal(1.0, 0.25, 1.0, 0.0);
  return p;
}

NonlinearitySpec shipped_sine() {
  return NonlinearitySpec::modulated_sine(Modulation::sinusoidal(0.5, 0.25, 0.5, 0.0));
}

}  // namespace

TEST_CASE("energy of simple states") {
  const BoxDomain d(2, 8);
  const auto z = energy_E(State(d), params(), shipped_sine());
  CHECK(z.E == 0.0);
  CHECK(z.kinetic == 0.0);
  CHECK(z.potential == 0.0);
  CHECK(std::isnan(z.L));

  State s(d);
  s.u.coeffs[0] = 1.0;
  const auto e = energy_E(s, params(2.0), NonlinearitySpec::zero());
  CHECK(e.plate == doctest::Approx(4.0));
  CHECK(e.E == doctest::Approx(4.0));
}

TEST_CASE("energy terms compose") {
  const BoxDomain d(2, 6);
  const State s = smooth_state(d, 3);
  const auto f = NonlinearitySpec::soft_cubic(3.0);
  const auto e = energy_E(s, params(0.7), f);
  CHECK(e.kinetic == doctest::Approx(0.5 * std::pow(norm(s.v, NormSpace::L2), 2)).epsilon(1e-14));
  CHECK(e.plate == doctest::Approx(0.35 * std::pow(norm(s.u, NormSpace::H2), 2)).epsilon(1e-14));
  CHECK(e.thermal == doctest::Approx(0.5 * std::pow(norm(s.theta, NormSpace::L2), 2)).epsilon(1e-14));
  CHECK(e.E == doctest::Approx(e.kinetic + e.plate + e.thermal - e.potential).epsilon(1e-14));
}

TEST_CASE("potential against a refined quadrature") {
  const BoxDomain d(2, 24);
  State s(d);
  const int k11[] = {1, 1}, k21[] = {2, 1};
  s.u.coeffs[d.flat_index(k11)] = 1.2;
  s.u.coeffs[d.flat_index(k21)] = -0.5;
  const auto f = shipped_sine();
  const double t = 0.8;
  const double got = potential(State(s.u, s.v, s.theta, t), f);

  const int N = 1000;
  const double h = kPi / N, c = 2.0 / kPi;
  double ref = 0;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const double x = (i + 0.5) * h, y = (j + 0.5) * h;
      const double u = c * (1.2 * std::sin(x) * std::sin(y) - 0.5 * std::sin(2 * x) * std::sin(y));
      ref += f.antiderivative(t, u);
    }
  }
  ref *= h * h;
  CHECK(got == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("phi and psi") {
  const BoxDomain d(2, 4);
  State s = smooth_state(d, 1);
  for (double& v : s.v.coeffs) v = 0.0;
  CHECK(phi(s) == 0.0);
  CHECK(psi(s) == 0.0);

  State one(d);
  one.u.coeffs[5] = 1.0;
  one.v.coeffs[5] = 1.0;
  CHECK(phi(one) == 1.0);

  State m(d);
  m.v.coeffs[0] = 1.0;
  m.theta.coeffs[0] = 1.0;
  CHECK(psi(m) == doctest::Approx(0.5));
  // -int v Laplacian^-1 theta with Laplacian^-1 e_11 = -e_11 / 2, by quadrature.
  const int N = 600;
  const double h = kPi / N, c = 2.0 / kPi;
  double q = 0;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const double e = c * std::sin((i + 0.5) * h) * std::sin((j + 0.5) * h);
      q += -e * (-e / 2.0);
    }
  }
  CHECK(q * h * h == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("thermal dissipation") {
  const BoxDomain d(2, 4);
  State s(d);
  s.theta.coeffs[0] = 2.0;
  CHECK(thermal_dissipation(s, 1.5) == doctest::Approx(1.5 * 2.0 * 4.0));
}

TEST_CASE("constants for unit parameters satisfy every invariant") {
  const BoxDomain d(2, 8);
  const auto c = choose_constants(params(1.0, false), NonlinearitySpec::zero(), d, 1.0);
  for (const auto& inv : check_invariants(c)) CHECK_MESSAGE(inv.pass, inv.name);
  CHECK(c.M2 == 0.0);
  CHECK(c.beta2 == 0.0);
  CHECK(c.beta4 == 0.0);
}

TEST_CASE("delta1 window endpoints in closed form") {
  const BoxDomain d(2, 8);
  const auto c = choose_constants(params(1.0, false), NonlinearitySpec::zero(), d, 1.0);
  // eta = kappa = a = 1, lambda1 = 2, f = 0
  const double l1 = 2.0, mu1 = 1.0 / l1, eta = 1.0, nu = 0.5 * l1 * eta / mu1;
  const double c_eta = eta - mu1 * nu / l1, c_kappa = 1.5, ct0 = mu1 * eta / 2 + 0.5;
  const double delta2 = 0.5 * std::min({1.0, c_eta / (ct0 * c_kappa), c_eta / ct0});
  const double lo = ct0 / c_eta * delta2 * delta2, hi = delta2 / c_kappa;
  CHECK(c.delta2 == doctest::Approx(delta2).epsilon(1e-14));
  CHECK(c.window_lo == doctest::Approx(lo).epsilon(1e-14));
  CHECK(c.window_hi == doctest::Approx(hi).epsilon(1e-14));
  CHECK(lo > 0);
  CHECK(lo < hi);
  CHECK(c.delta1 == doctest::Approx(std::sqrt(lo * hi)).epsilon(1e-14));
}

TEST_CASE("eta above two is a hypothesis error") {
  const BoxDomain d(2, 8);
  CHECK_ERROR_KIND(choose_constants(params(3.0), NonlinearitySpec::zero(), d, 1.0), ErrorKind::hypothesis);
}

TEST_CASE("an oversized delta2 leaves an empty window") {
  const BoxDomain d(2, 8);
  try {
    choose_constants(params(1.0), NonlinearitySpec::zero(), d, 1.0, 0.9);
    FAIL("expected an infeasible window");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::infeasible);
    CHECK(std::string(e.what()).find("lower endpoint") != std::string::npos);
  }
}

TEST_CASE("property: constants pass the invariant suite across parameters") {
  for (int dim : {1, 2}) {
    const BoxDomain d(dim, 8);
    for (double eta : {0.5, 1.0, 2.0}) {
      for (double kappa : {0.3, 1.0, 4.0}) {
        for (const auto& f : {NonlinearitySpec::zero(), shipped_sine(), NonlinearitySpec::soft_cubic(1.5)}) {
          PhysicalParams p = params(eta);
          p.kappa = kappa;
          const auto c = choose_constants(p, f, d, 5.0);
          CHECK(invariants_hold(c));
          CHECK(c.M1 > 0);
        }
      }
    }
  }
}

TEST_CASE("Lyapunov functional composition") {
  const BoxDomain d(2, 6);
  const auto f = shipped_sine();
  const auto c = choose_constants(params(), f, d, 10.0);
  CHECK(lyapunov_L(State(d), params(), f, c) == 0.0);

  State s(d);
  s.u.coeffs[3] = 0.2;  // v = 0 so phi = psi = 0
  CHECK(lyapunov_L(s, params(), f, c) == doctest::Approx(c.M * energy_E(s, params(), f).E).epsilon(1e-14));

  const State r = smooth_state(d, 9);
  const double want = c.M * energy_E(r, params(), f).E + c.delta1 * phi(r) + c.delta2 * psi(r);
  CHECK(lyapunov_L(r, params(), f, c) == doctest::Approx(want).epsilon(1e-14));

  auto broken = c;
  broken.M = -1.0;
  CHECK_ERROR_KIND(lyapunov_L(r, params(), f, broken), ErrorKind::config);
}

TEST_CASE("decay inequality on the zero equilibrium") {
  const BoxDomain d(2, 4);
  const auto c = choose_constants(params(), NonlinearitySpec::zero(), d, 1.0);
  EvolutionConfig cfg;
  cfg.dt = 0.01;
  const auto rec = evolve(State(d), params(), NonlinearitySpec::zero(), 0.0, 1.0, cfg, &c);
  const auto rep = verify_decay_inequality(rec, c);
  CHECK(rep.applicable);
  CHECK(rep.violations == 0);
  CHECK(rep.worst_margin >= c.M2);
}

TEST_CASE("linear runs satisfy the decay inequality without a constant term") {
  const BoxDomain d(2, 8);
  const auto f = NonlinearitySpec::zero();
  const auto c = choose_constants(params(), f, d, 10.0);
  REQUIRE(c.M2 == 0.0);
  EvolutionConfig cfg;
  cfg.dt = 1e-3;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto rec = evolve(smooth_state(d, seed), params(), f, 0.0, 5.0, cfg, &c);
    const auto rep = verify_decay_inequality(rec, c);
    CHECK(rep.applicable);
    CHECK(rep.violations == 0);
    const auto eq = verify_equivalence(rec, c);
    CHECK(eq.violations == 0);
    CHECK(eq.worst_lower >= 0);
  }
}

TEST_CASE("decay inequality is inapplicable outside the ball") {
  const BoxDomain d(2, 6);
  const auto f = shipped_sine();
  const auto c = choose_constants(params(), f, d, 0.1);
  EvolutionConfig cfg;
  cfg.dt = 1e-2;
  const auto rec = evolve(smooth_state(d, 2, 50.0), params(), f, 0.0, 0.5, cfg, &c);
  const auto rep = verify_decay_inequality(rec, c);
  CHECK_FALSE(rep.applicable);
  CHECK_FALSE(rep.reason.empty());
}

TEST_CASE("nonlinear run satisfies the decay inequality at dt = 1e-3") {
  const BoxDomain d(2, 8);
  const auto f = shipped_sine();
  const auto c = choose_constants(params(), f, d, 10.0);
  EvolutionConfig cfg;
  cfg.dt = 1e-3;
  const auto ball = sample_ball(d, 2.0, 1, 5);
  const auto rec = evolve(ball.members[0], params(), f, 0.0, 5.0, cfg, &c);
  const auto rep = verify_decay_inequality(rec, c);
  CHECK(rep.applicable);
  CHECK(rep.violations == 0);
}

TEST_CASE("equivalence holds state by state") {
  const BoxDomain d(2, 8);
  const auto f = shipped_sine();
  const auto c = choose_constants(params(), f, d, 10.0);
  const auto zero = verify_equivalence({State(d)}, params(), f, c);
  CHECK(zero.violations == 0);
  CHECK(zero.worst_lower == doctest::Approx(c.beta4));
  CHECK(zero.worst_upper == doctest::Approx(c.beta2));

  const auto ball = sample_ball(d, 10.0, 300, 42);
  const auto rep = verify_equivalence(ball.members, params(), f, c);
  CHECK(rep.checked == 300);
  CHECK(rep.violations == 0);
}

TEST_CASE("energy lower bound holds state by state") {
  const BoxDomain d(2, 8);
  for (const auto& f : {shipped_sine(), NonlinearitySpec::soft_cubic(3.0)}) {
    const auto c = choose_constants(params(), f, d, 10.0);
    const auto ball = sample_ball(d, 10.0, 300, 7);
    for (const auto& s : ball.members) CHECK(energy_lower_bound_slack(s, params(), f, c) >= 0);
  }
}

TEST_CASE("envelope on the zero trajectory and on nonlinear runs") {
  const BoxDomain d(2, 6);
  EvolutionConfig cfg;
  cfg.dt = 1e-2;
  const auto c0 = choose_constants(params(), NonlinearitySpec::zero(), d, 1.0);
  const auto zero = evolve(State(d), params(), NonlinearitySpec::zero(), 0.0, 2.0, cfg, &c0);
  const auto rz = decay_envelope_check(zero, c0);
  CHECK(rz.violations == 0);
  CHECK(rz.gamma2 == 0.0);

  const auto f = shipped_sine();
  const auto c = choose_constants(params(), f, d, 10.0);
  const auto rec = evolve(sample_ball(d, 3.0, 1, 3).members[0], params(), f, 0.0, 20.0, cfg, &c);
  const auto r = decay_envelope_check(rec, c);
  CHECK(r.violations == 0);
  const auto env = decay_envelope(c, rec.energies.front().L);
  CHECK(r.gamma1 == doctest::Approx(env.gamma1));
  CHECK(r.omega_bar == doctest::Approx(c.M1 / c.beta1));
}

TEST_CASE("linear energy is non-increasing along trajectories") {
  const BoxDomain d(2, 8);
  EvolutionConfig cfg;
  cfg.dt = 5e-3;
  for (double eta : {0.5, 1.0, 2.0}) {
    const auto rec = evolve(smooth_state(d, 4), params(eta), NonlinearitySpec::zero(), 0.0, 10.0, cfg);
    const double e0 = rec.energies.front().E;
    for (std::size_t i = 1; i < rec.energies.size(); ++i) {
      CHECK(rec.energies[i].E <= rec.energies[i - 1].E + 1e-12 * e0);
    }
  }
}

TEST_CASE("energy identity converges at second order") {
  // (E(t + dt) - E(t)) / dt + kappa |grad theta|^2 at the midpoint.
  const BoxDomain d(2, 8);
  const PhysicalParams p = params();
  const State w0 = testing_support::low_mode_state(d, 12, 5.0);
  auto residual = [&](double dt) {
    const State half = step_linear(w0, p, dt / 2);
    const State full = step_linear(w0, p, dt);
    const auto f = NonlinearitySpec::zero();
    return std::abs((energy_E(full, p, f).E - energy_E(w0, p, f).E) / dt +
                    thermal_dissipation(half, p.kappa));
  };
  const double r1 = residual(1e-2), r2 = residual(5e-3), r3 = residual(2.5e-3);
  CHECK(std::log2(r1 / r2) >= 1.9);
  CHECK(std::log2(r2 / r3) >= 1.9);
}
