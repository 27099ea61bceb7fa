#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "thermoplate/coeffs.hpp"
#include "thermoplate/energy.hpp"
#include "thermoplate/operators.hpp"
#include "thermoplate/state.hpp"

namespace thermoplate {

struct EvolutionConfig {
  double dt = 1e-3;
  std::size_t record_stride = 1;
  bool keep_snapshots = false;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> y_norms;
  std::vector<EnergyReport> energies;
  std::vector<State> snapshots;  // filled only with keep_snapshots
};

/// Extra additive source (g_v, g_theta) in the v and theta equations; writes
/// coefficients for time t into the two spans.
using Forcing = std::function<void(double t, std::span<double> v, std::span<double> theta)>;

/// Strang splitting around exact per-mode exponentials of the generator at the
/// step midpoint. Keeps scratch buffers and an exponential cache, so one
/// instance must not be shared between threads.
class Stepper {
 public:
  Stepper(const BoxDomain& domain, const PhysicalParams& params, const NonlinearitySpec& f);

  void set_forcing(Forcing forcing) { forcing_ = std::move(forcing); }

  /// Linear substep over [t0, t1] without kicks.
  void linear(State& state, double t0, double t1);

  /// Advance from state.time to t_end with steps of dt (the last one may be
  /// shorter). Step times are state.time + j dt. on_step runs after every step
  /// with the step index; throws BlowUpError on the first non-finite value.
  void run(State& state, double t_end, double dt,
           const std::function<void(const State&, std::size_t)>& on_step = {});

 private:
  void kick(State& state, double t, double half, bool reuse);
  void refresh_exponentials(double t_mid, double h);

  BoxDomain domain_;
  PhysicalParams params_;
  NonlinearitySpec f_;
  Forcing forcing_;

  std::vector<double> unique_mu_;
  std::vector<std::size_t> mode_to_unique_;
  std::vector<Mat3> exps_;
  double cached_h_ = -1;
  double cached_a_ = 0;
  bool have_cache_ = false;

  std::vector<double> grid_, nonlinear_, force_v_, force_theta_;
  bool nonlinear_valid_ = false;
  double nonlinear_time_ = 0;
};

/// exp(h G) for one mode with coupling value a.
Mat3 mode_exponential(double eta, double kappa, double a, double mu, double h);

State step_linear(const State& state, const PhysicalParams& params, double dt);
State step_full(const State& state, const PhysicalParams& params, const NonlinearitySpec& f,
                double dt);

/// Trajectory of S(t, tau) w0. Energies carry L when constants are supplied.
TrajectoryRecord evolve(const State& w0, const PhysicalParams& params, const NonlinearitySpec& f,
                        double tau, double t, const EvolutionConfig& config,
                        const LyapunovConfig* constants = nullptr);

/// Terminal state of S(t, tau) w0.
State evolve_state(const State& w0, const PhysicalParams& params, const NonlinearitySpec& f,
                   double tau, double t, double dt);

/// Terminal states of every member; members are split across threads and the
/// results do not depend on the thread count. Rethrows the first member's error
/// by member order.
std::vector<State> evolve_ensemble(const std::vector<State>& members, const PhysicalParams& params,
                                   const NonlinearitySpec& f, double tau, double t, double dt,
                                   unsigned threads = 1);

State linear_process(const State& w0, const PhysicalParams& params, double tau, double t,
                     double dt);
State compact_part(const State& w0, const PhysicalParams& params, const NonlinearitySpec& f,
                   double tau, double t, double dt);

struct DecayFit {
  double K = 0;       // smallest constant with y(t) <= K y(tau) exp(-alpha (t - tau)) on the samples
  double alpha = 0;   // minus the least-squares slope of log(y / y(tau))
  double K_ls = 0;    // exp(intercept) of the same fit
  std::size_t samples = 0;
};

/// Pooled fit over trajectories of the linear process, using samples with
/// t - tau in [window_begin, window_end] and y / y(tau) >= 1e-14.
DecayFit decay_fit(const std::vector<TrajectoryRecord>& runs, double tau, double window_begin,
                   double window_end);

}  // namespace thermoplate
