#include "thermoplate/thermoplate.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "thermoplate/attractor.hpp"
#include "thermoplate/config.hpp"
#include "thermoplate/dynamics.hpp"
#include "thermoplate/energy.hpp"
#include "thermoplate/error.hpp"
#include "thermoplate/experiment.hpp"

namespace {

struct ExperimentData {
  thermoplate::ExperimentConfig config;
  std::optional<thermoplate::LyapunovConfig> constants;
  bool constants_tried = false;
};

}  // namespace

// States keep the experiment data alive after the handle is freed.
struct tp_experiment {
  std::shared_ptr<ExperimentData> data;
};

struct tp_state {
  std::shared_ptr<ExperimentData> owner;
  thermoplate::State state;
};

namespace {

thread_local std::string g_last_error;

tp_status status_of(thermoplate::ErrorKind kind) {
  using thermoplate::ErrorKind;
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::admissibility:
    case ErrorKind::hypothesis:
    case ErrorKind::infeasible:
    case ErrorKind::domain:
      return TP_ERR_CONFIG;
    case ErrorKind::blowup: return TP_ERR_BLOWUP;
    case ErrorKind::io: return TP_ERR_IO;
    case ErrorKind::range:
    case ErrorKind::shape:
    case ErrorKind::usage:
      return TP_ERR_USAGE;
  }
  return TP_ERR_INTERNAL;
}

template <class Fn>
tp_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const thermoplate::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TP_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return TP_ERR_INTERNAL;
  }
}

tp_status usage(const char* message) {
  g_last_error = message;
  return TP_ERR_USAGE;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

thermoplate::RunOptions to_options(const tp_run_options* o) {
  thermoplate::RunOptions r;
  if (o == nullptr) return r;
  if (o->output_dir != nullptr) r.output_dir = o->output_dir;
  r.threads = o->threads == 0 ? 1 : o->threads;
  if (o->format != nullptr) r.format = o->format;
  if (o->has_seed) r.seed = o->seed;
  return r;
}

std::string failed_checks(const std::string& report) {
  std::string out = "failed checks:";
  const auto doc = nlohmann::json::parse(report, nullptr, false);
  if (doc.is_discarded() || !doc.contains("checks")) return "one or more checks failed";
  for (const auto& c : doc["checks"]) {
    if (c.value("pass", true)) continue;
    out += " " + c.value("name", std::string("?"));
    if (c.contains("detail") && c["detail"].is_string()) out += " (" + c["detail"].get<std::string>() + ")";
    out += ";";
  }
  return out;
}

using Command = thermoplate::CommandResult (*)(thermoplate::ExperimentConfig,
                                               const thermoplate::RunOptions&);

tp_status run_command(Command cmd, const tp_experiment* e, const tp_run_options* o, char** report) {
  if (e == nullptr) return usage("experiment handle is NULL");
  return guarded([&] {
    const auto result = cmd(e->data->config, to_options(o));
    if (report != nullptr) *report = dup_string(result.report);
    if (result.code == thermoplate::ExitCode::verification) {
      g_last_error = failed_checks(result.report);
      return TP_ERR_VERIFICATION;
    }
    return TP_OK;
  });
}

}  // namespace

extern "C" {

const char* tp_last_error(void) { return g_last_error.c_str(); }

const char* tp_version(void) { return "0.1.0"; }

tp_status tp_experiment_parse(const char* text, tp_experiment** out) {
  if (text == nullptr || out == nullptr) return usage("NULL argument to tp_experiment_parse");
  return guarded([&] {
    auto data = std::make_shared<ExperimentData>();
    data->config = thermoplate::parse_config(text);
    *out = new tp_experiment{std::move(data)};
    return TP_OK;
  });
}

tp_status tp_experiment_load(const char* path, tp_experiment** out) {
  if (path == nullptr || out == nullptr) return usage("NULL argument to tp_experiment_load");
  return guarded([&] {
    auto data = std::make_shared<ExperimentData>();
    data->config = thermoplate::load_config(path);
    *out = new tp_experiment{std::move(data)};
    return TP_OK;
  });
}

void tp_experiment_free(tp_experiment* experiment) { delete experiment; }

tp_status tp_experiment_serialize(const tp_experiment* experiment, char** out) {
  if (experiment == nullptr || out == nullptr) return usage("NULL argument to tp_experiment_serialize");
  return guarded([&] {
    *out = dup_string(thermoplate::serialize_config(experiment->data->config));
    return TP_OK;
  });
}

void tp_string_free(char* text) { std::free(text); }

tp_status tp_simulate(const tp_experiment* e, const tp_run_options* o, char** r) {
  return run_command(thermoplate::cmd_simulate, e, o, r);
}
tp_status tp_verify(const tp_experiment* e, const tp_run_options* o, char** r) {
  return run_command(thermoplate::cmd_verify, e, o, r);
}
tp_status tp_attractor(const tp_experiment* e, const tp_run_options* o, char** r) {
  return run_command(thermoplate::cmd_attractor, e, o, r);
}
tp_status tp_decay_fit(const tp_experiment* e, const tp_run_options* o, char** r) {
  return run_command(thermoplate::cmd_decay_fit, e, o, r);
}
tp_status tp_operator_check(const tp_experiment* e, const tp_run_options* o, char** r) {
  return run_command(thermoplate::cmd_operator_check, e, o, r);
}

tp_status tp_mode_operator(const tp_experiment* e, tp_operator_kind kind, double t, double mu,
                           double out[9]) {
  if (e == nullptr || out == nullptr) return usage("NULL argument to tp_mode_operator");
  if (kind < TP_PAPER_A || kind > TP_GENERATOR_G) return usage("unknown operator kind");
  return guarded([&] {
    const auto op = thermoplate::build(static_cast<thermoplate::OperatorKind>(kind),
                                       e->data->config.physics, t, mu);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[3 * i + j] = op.entries(i, j);
    return TP_OK;
  });
}

tp_status tp_state_zero(const tp_experiment* e, double t, tp_state** out) {
  if (e == nullptr || out == nullptr) return usage("NULL argument to tp_state_zero");
  return guarded([&] {
    const auto& owner = e->data;
    *out = new tp_state{owner, thermoplate::State(owner->config.make_domain(), t)};
    return TP_OK;
  });
}

tp_status tp_state_sample(const tp_experiment* e, double radius, uint64_t seed, tp_state** out) {
  if (e == nullptr || out == nullptr) return usage("NULL argument to tp_state_sample");
  return guarded([&] {
    const auto& owner = e->data;
    auto set = thermoplate::sample_ball(owner->config.make_domain(), radius, 1, seed);
    *out = new tp_state{owner, std::move(set.members.front())};
    return TP_OK;
  });
}

void tp_state_free(tp_state* state) { delete state; }

tp_status tp_state_evolve(tp_state* s, double t, double dt) {
  if (s == nullptr) return usage("state handle is NULL");
  return guarded([&] {
    const auto& c = s->owner->config;
    s->state = thermoplate::evolve_state(s->state, c.physics, c.nonlinearity.f, s->state.time, t, dt);
    return TP_OK;
  });
}

tp_status tp_state_y_norm(const tp_state* s, double* out) {
  if (s == nullptr || out == nullptr) return usage("NULL argument to tp_state_y_norm");
  return guarded([&] {
    *out = thermoplate::y_norm(s->state);
    return TP_OK;
  });
}

tp_status tp_state_energy(const tp_state* s, tp_energy* out) {
  if (s == nullptr || out == nullptr) return usage("NULL argument to tp_state_energy");
  return guarded([&] {
    ExperimentData& owner = *s->owner;
    const auto& c = owner.config;
    if (!owner.constants_tried) {
      owner.constants_tried = true;
      try {
        owner.constants = thermoplate::choose_constants(c.physics, c.nonlinearity.f, c.make_domain(),
                                                        c.nonlinearity.radius, c.lyapunov.delta2);
      } catch (const thermoplate::Error&) {
        owner.constants.reset();
      }
    }
    const auto e = thermoplate::energy_E(s->state, c.physics, c.nonlinearity.f,
                                         owner.constants ? &*owner.constants : nullptr);
    *out = tp_energy{e.kinetic, e.plate, e.thermal, e.potential, e.E, e.phi, e.psi, e.L};
    return TP_OK;
  });
}

tp_status tp_state_coefficients(const tp_state* s, int component, double* buffer, size_t capacity,
                                size_t* count) {
  if (s == nullptr || count == nullptr) return usage("NULL argument to tp_state_coefficients");
  if (component < 0 || component > 2) return usage("component must be 0 (u), 1 (v) or 2 (theta)");
  const auto& field = component == 0 ? s->state.u : component == 1 ? s->state.v : s->state.theta;
  *count = field.coeffs.size();
  if (buffer == nullptr) return TP_OK;
  if (capacity < field.coeffs.size()) return usage("coefficient buffer is too small");
  std::memcpy(buffer, field.coeffs.data(), field.coeffs.size() * sizeof(double));
  return TP_OK;
}

tp_status tp_state_time(const tp_state* s, double* out) {
  if (s == nullptr || out == nullptr) return usage("NULL argument to tp_state_time");
  *out = s->state.time;
  return TP_OK;
}

}  // extern "C"
