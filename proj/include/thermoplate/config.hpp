#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thermoplate/coeffs.hpp"
#include "thermoplate/operators.hpp"
#include "thermoplate/spectral.hpp"

namespace thermoplate {

struct ExperimentConfig {
  struct Domain {
    int dimension = 2;
    double length = 3.141592653589793;
    std::size_t modes = 8;
  } domain;

  PhysicalParams physics;

  struct Nonlinearity {
    NonlinearitySpec f;
    std::optional<double> rho;  // declared growth exponent, at least the natural one
    double radius = 10.0;       // H^2 ball radius r for the Lyapunov constants
  } nonlinearity;

  struct Initial {
    enum class Kind { zero, ball } kind = Kind::ball;
    double radius = 1.0;
    std::uint64_t seed = 1;
  } initial;

  struct Integrator {
    double dt = 1e-3;
    double t_final = 10.0;
    double tau = 0.0;
    std::size_t record_stride = 10;
  } integrator;

  struct Lyapunov {
    std::optional<double> delta2;
  } lyapunov;

  struct Attractor {
    double radius = 1.0;
    std::size_t members = 20;
    std::uint64_t seed = 7;
    std::vector<double> schedule{5, 10, 20, 40, 80, 160};
    double tol = 1e-6;
    double target_time = 0.0;
    double dt = 1e-2;
  } attractor;

  struct Output {
    std::string dir = "out";
    std::string format = "csv";
    bool snapshots = false;
    bool svg = true;
  } output;

  BoxDomain make_domain() const;
};

/// Parses INI text. Structural problems (syntax, unknown keys, wrong types,
/// out-of-range values) throw Error(config) naming the field as section.key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text: every key in fixed order, shortest round-trip numbers.
std::string serialize_config(const ExperimentConfig& config);

/// Hypotheses the simulation relies on: declared a-data, dissipativity of f,
/// the cubic variant only in two dimensions. Throws Error(admissibility).
void check_admissibility(const ExperimentConfig& config);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

}  // namespace thermoplate
