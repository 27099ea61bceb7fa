#include "thermoplate/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

#include "thermoplate/error.hpp"

namespace thermoplate {

Mat3 mode_exponential(double eta, double kappa, double a, double mu, double h) {
  // In the scaled variables (mu u, v, theta) the generator is mu times a fixed
  // matrix, which keeps the Pade argument balanced for stiff modes.
  Mat3 b;
  b << 0, 1, 0,
       -eta, 0, a,
       0, -a, -kappa;
  const Mat3 scaled = Mat3((h * mu) * b).exp();
  Mat3 out = scaled;
  out.row(0) /= mu;
  out.col(0) *= mu;
  return out;
}

Stepper::Stepper(const BoxDomain& domain, const PhysicalParams& params, const NonlinearitySpec& f)
    : domain_(domain), params_(params), f_(f) {
  const auto mu = domain_.mu();
  std::map<double, std::size_t> index;
  mode_to_unique_.resize(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) {
    auto [it, fresh] = index.try_emplace(mu[k], unique_mu_.size());
    if (fresh) unique_mu_.push_back(mu[k]);
    mode_to_unique_[k] = it->second;
  }
  exps_.resize(unique_mu_.size());
  const std::size_t n = domain_.mode_count();
  grid_.resize(n);
  nonlinear_.resize(n);
  force_v_.resize(n);
  force_theta_.resize(n);
}

void Stepper::refresh_exponentials(double t_mid, double h) {
  const double a = eval_a(params_.a, t_mid);
  if (have_cache_ && h == cached_h_ && a == cached_a_) return;
  for (std::size_t i = 0; i < unique_mu_.size(); ++i) {
    exps_[i] = mode_exponential(params_.eta, params_.kappa, a, unique_mu_[i], h);
  }
  cached_h_ = h;
  cached_a_ = a;
  have_cache_ = true;
}

void Stepper::linear(State& state, double t0, double t1) {
  const double h = t1 - t0;
  if (h == 0) return;
  refresh_exponentials(t0 + 0.5 * h, h);
  auto& u = state.u.coeffs;
  auto& v = state.v.coeffs;
  auto& th = state.theta.coeffs;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const Mat3& e = exps_[mode_to_unique_[k]];
    const double u0 = u[k], v0 = v[k], t0k = th[k];
    u[k] = e(0, 0) * u0 + e(0, 1) * v0 + e(0, 2) * t0k;
    v[k] = e(1, 0) * u0 + e(1, 1) * v0 + e(1, 2) * t0k;
    th[k] = e(2, 0) * u0 + e(2, 1) * v0 + e(2, 2) * t0k;
  }
}

void Stepper::kick(State& state, double t, double half, bool reuse) {
  auto& v = state.v.coeffs;
  if (!f_.is_zero()) {
    if (!(reuse && nonlinear_valid_ && nonlinear_time_ == t)) {
      nemytskii_into(f_, t, domain_, state.u.coeffs, grid_, nonlinear_);
      nonlinear_valid_ = true;
      nonlinear_time_ = t;
    }
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += half * nonlinear_[k];
  }
  if (forcing_) {
    forcing_(t, force_v_, force_theta_);
    auto& th = state.theta.coeffs;
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] += half * force_v_[k];
      th[k] += half * force_theta_[k];
    }
  }
}

namespace {

void check_finite(const State& state) {
  const std::size_t n = state.u.coeffs.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(state.u.coeffs[k]) || !std::isfinite(state.v.coeffs[k]) ||
        !std::isfinite(state.theta.coeffs[k])) {
      std::ostringstream msg;
      msg << "non-finite state at t = " << state.time << " in mode " << k;
      throw BlowUpError(state.time, k, msg.str());
    }
  }
}

std::size_t step_count(double span, double dt) {
  if (span <= 0) return 0;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / dt - 1e-9)));
}

}  // namespace

void Stepper::run(State& state, double t_end, double dt,
                  const std::function<void(const State&, std::size_t)>& on_step) {
  if (!(dt > 0)) {
    throw Error(ErrorKind::usage, "time step must be positive");
  }
  const double t0 = state.time;
  if (t_end < t0) {
    throw Error(ErrorKind::usage, "evolution needs t >= tau");
  }
  if (!(state.domain() == domain_)) {
    throw Error(ErrorKind::shape, "state domain does not match the stepper");
  }
  nonlinear_valid_ = false;
  const std::size_t steps = step_count(t_end - t0, dt);
  for (std::size_t j = 0; j < steps; ++j) {
    const double ta = t0 + static_cast<double>(j) * dt;
    const double tb = j + 1 == steps ? t_end : t0 + static_cast<double>(j + 1) * dt;
    const double h = tb - ta;
    kick(state, ta, 0.5 * h, true);
    linear(state, ta, tb);
    state.time = tb;
    kick(state, tb, 0.5 * h, false);
    check_finite(state);
    if (on_step) on_step(state, j + 1);
  }
}

State step_linear(const State& state, const PhysicalParams& params, double dt) {
  if (!(dt > 0)) {
    throw Error(ErrorKind::usage, "time step must be positive");
  }
  State out = state;
  Stepper stepper(state.domain(), params, NonlinearitySpec::zero());
  stepper.linear(out, state.time, state.time + dt);
  out.time = state.time + dt;
  return out;
}

State step_full(const State& state, const PhysicalParams& params, const NonlinearitySpec& f,
                double dt) {
  State out = state;
  Stepper stepper(state.domain(), params, f);
  stepper.run(out, state.time + dt, dt);
  return out;
}

TrajectoryRecord evolve(const State& w0, const PhysicalParams& params, const NonlinearitySpec& f,
                        double tau, double t, const EvolutionConfig& config,
                        const LyapunovConfig* constants) {
  if (config.record_stride == 0) {
    throw Error(ErrorKind::usage, "record_stride must be positive");
  }
  TrajectoryRecord rec;
  auto record = [&](const State& s) {
    rec.times.push_back(s.time);
    rec.y_norms.push_back(y_norm(s));
    rec.energies.push_back(energy_E(s, params, f, constants));
    if (config.keep_snapshots) rec.snapshots.push_back(s);
  };
  State state = w0;
  state.time = tau;
  record(state);
  const std::size_t steps = step_count(t - tau, config.dt);
  Stepper stepper(w0.domain(), params, f);
  stepper.run(state, t, config.dt, [&](const State& s, std::size_t j) {
    if (j % config.record_stride == 0 || j == steps) record(s);
  });
  return rec;
}

State evolve_state(const State& w0, const PhysicalParams& params, const NonlinearitySpec& f,
                   double tau, double t, double dt) {
  State state = w0;
  state.time = tau;
  Stepper stepper(w0.domain(), params, f);
  stepper.run(state, t, dt);
  return state;
}

std::vector<State> evolve_ensemble(const std::vector<State>& members, const PhysicalParams& params,
                                   const NonlinearitySpec& f, double tau, double t, double dt,
                                   unsigned threads) {
  const std::size_t m = members.size();
  std::vector<State> out(members);
  std::vector<std::exception_ptr> errors(m);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(m, 1))));

  auto work = [&](unsigned id) {
    std::optional<Stepper> stepper;
    for (std::size_t i = id; i < m; i += threads) {
      try {
        if (!stepper) stepper.emplace(members[i].domain(), params, f);
        out[i].time = tau;
        stepper->run(out[i], t, dt);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < threads; ++id) pool.emplace_back(work, id);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const BlowUpError& e) {
      std::ostringstream msg;
      msg << "member " << i << ": " << e.what();
      throw BlowUpError(e.time(), e.mode(), msg.str());
    }
  }
  return out;
}

State linear_process(const State& w0, const PhysicalParams& params, double tau, double t,
                     double dt) {
  return evolve_state(w0, params, NonlinearitySpec::zero(), tau, t, dt);
}

State compact_part(const State& w0, const PhysicalParams& params, const NonlinearitySpec& f,
                   double tau, double t, double dt) {
  State full = evolve_state(w0, params, f, tau, t, dt);
  const State lin = linear_process(w0, params, tau, t, dt);
  for (std::size_t k = 0; k < full.u.coeffs.size(); ++k) {
    full.u.coeffs[k] -= lin.u.coeffs[k];
    full.v.coeffs[k] -= lin.v.coeffs[k];
    full.theta.coeffs[k] -= lin.theta.coeffs[k];
  }
  return full;
}

DecayFit decay_fit(const std::vector<TrajectoryRecord>& runs, double tau, double window_begin,
                   double window_end) {
  std::vector<double> xs, ys;
  for (const auto& run : runs) {
    if (run.y_norms.empty()) continue;
    const double y0 = run.y_norms.front();
    if (!(y0 > 0)) continue;
    for (std::size_t i = 0; i < run.times.size(); ++i) {
      const double x = run.times[i] - tau;
      const double ratio = run.y_norms[i] / y0;
      if (ratio < 1e-14) break;
      if (x < window_begin - 1e-12 || x > window_end + 1e-12) continue;
      xs.push_back(x);
      ys.push_back(std::log(ratio));
    }
  }
  if (xs.size() < 10) {
    std::ostringstream msg;
    msg << "decay fit needs at least 10 samples above underflow, got " << xs.size();
    throw Error(ErrorKind::usage, msg.str());
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0)) {
    throw Error(ErrorKind::usage, "decay fit window has no time spread");
  }
  DecayFit fit;
  const double slope = sxy / sxx;
  fit.alpha = -slope;
  fit.K_ls = std::exp(my - slope * mx);
  double log_k = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    log_k = std::max(log_k, ys[i] + fit.alpha * xs[i]);
  }
  fit.K = std::exp(log_k);
  fit.samples = xs.size();
  return fit;
}

}  // namespace thermoplate
