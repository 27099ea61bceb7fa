#include "thermoplate/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "thermoplate/error.hpp"

namespace thermoplate {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::config, field + ": " + what);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    fail(field, "expected a number, got '" + t + "'");
  }
  if (!std::isfinite(value)) fail(field, "value must be finite");
  return value;
}

std::uint64_t to_unsigned(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    fail(field, "expected a nonnegative integer, got '" + t + "'");
  }
  return value;
}

bool to_bool(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true") return true;
  if (t == "false") return false;
  fail(field, "expected true or false, got '" + t + "'");
}

struct Record {
  std::string name;
  std::map<std::string, double> args;
};

// name(key=value, ...) or a bare number, which reads as constant(value=x).
Record to_record(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  Record rec;
  const auto open = t.find('(');
  if (open == std::string::npos) {
    rec.name = "constant";
    rec.args["value"] = to_double(field, t);
    return rec;
  }
  if (t.back() != ')') fail(field, "unterminated record '" + t + "'");
  rec.name = trim(std::string_view(t).substr(0, open));
  const std::string body = t.substr(open + 1, t.size() - open - 2);
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(field, "record argument '" + trim(item) + "' needs name=value");
    const std::string key = trim(std::string_view(item).substr(0, eq));
    if (!rec.args.emplace(key, to_double(field + "." + key, item.substr(eq + 1))).second) {
      fail(field, "duplicate record argument '" + key + "'");
    }
  }
  return rec;
}

double take(const std::string& field, Record& rec, const std::string& key,
            std::optional<double> fallback = std::nullopt) {
  const auto it = rec.args.find(key);
  if (it == rec.args.end()) {
    if (fallback) return *fallback;
    fail(field, rec.name + " needs argument '" + key + "'");
  }
  const double v = it->second;
  rec.args.erase(it);
  return v;
}

void expect_consumed(const std::string& field, const Record& rec) {
  if (!rec.args.empty()) {
    fail(field, "unknown argument '" + rec.args.begin()->first + "' for " + rec.name);
  }
}

Modulation to_modulation(const std::string& field, const std::string& text) {
  Record rec = to_record(field, text);
  Modulation m;
  if (rec.name == "constant") {
    m = Modulation::constant(take(field, rec, "value"));
  } else if (rec.name == "sinusoidal") {
    const double base = take(field, rec, "base");
    const double amp = take(field, rec, "amplitude");
    const double freq = take(field, rec, "frequency");
    const double phase = take(field, rec, "phase", 0.0);
    m = Modulation::sinusoidal(base, amp, freq, phase);
  } else {
    fail(field, "unknown profile '" + rec.name + "' (expected constant or sinusoidal)");
  }
  expect_consumed(field, rec);
  return m;
}

std::string modulation_text(const Modulation& m) {
  if (m.kind == Modulation::Kind::constant) {
    return "constant(value=" + format_number(m.base) + ")";
  }
  return "sinusoidal(base=" + format_number(m.base) + ", amplitude=" + format_number(m.amplitude) +
         ", frequency=" + format_number(m.frequency) + ", phase=" + format_number(m.phase) + ")";
}

std::vector<double> to_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(field, item));
  return out;
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"domain", {"dimension", "length", "modes"}},
      {"physics", {"eta", "kappa", "a", "a_lower", "a_upper", "a_hoelder_c", "a_hoelder_beta"}},
      {"nonlinearity", {"f", "p", "gamma", "cubic", "rho", "radius"}},
      {"initial", {"kind", "radius", "seed"}},
      {"integrator", {"dt", "t_final", "tau", "record_stride"}},
      {"lyapunov", {"delta2"}},
      {"attractor", {"radius", "members", "seed", "schedule", "tol", "target_time", "dt"}},
      {"output", {"dir", "format", "snapshots", "svg"}},
  };
  return keys;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

BoxDomain ExperimentConfig::make_domain() const {
  return BoxDomain(domain.dimension, domain.modes, domain.length);
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream msg;
    msg << "line " << e.line() << ": " << e.message();
    throw Error(ErrorKind::config, msg.str());
  }

  const auto& allowed = allowed_keys();
  for (const auto& [section, body] : tree) {
    const auto it = allowed.find(section);
    if (it == allowed.end()) {
      if (body.empty()) fail(section, "keys must sit inside a [section]");
      fail(section, "unknown section");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) fail(section + "." + key, "unknown key");
    }
  }

  auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
    const auto node = tree.get_child_optional(pt::ptree::path_type(section + "." + key, '.'));
    if (!node) return std::nullopt;
    return node->data();
  };

  ExperimentConfig c;
  if (auto v = get("domain", "dimension")) {
    const auto d = to_unsigned("domain.dimension", *v);
    if (d != 1 && d != 2) fail("domain.dimension", "must be 1 or 2");
    c.domain.dimension = static_cast<int>(d);
  }
  if (auto v = get("domain", "length")) c.domain.length = to_double("domain.length", *v);
  if (!(c.domain.length > 0)) fail("domain.length", "must be positive");
  if (auto v = get("domain", "modes")) c.domain.modes = to_unsigned("domain.modes", *v);
  if (c.domain.modes < 1 || c.domain.modes > 256) fail("domain.modes", "must lie in 1..256");

  if (auto v = get("physics", "eta")) c.physics.eta = to_double("physics.eta", *v);
  if (!(c.physics.eta > 0)) fail("physics.eta", "must be positive");
  if (auto v = get("physics", "kappa")) c.physics.kappa = to_double("physics.kappa", *v);
  if (!(c.physics.kappa > 0)) fail("physics.kappa", "must be positive");
  if (auto v = get("physics", "a")) {
    const Modulation m = to_modulation("physics.a", *v);
    c.physics.a = m.kind == Modulation::Kind::constant
                      ? CoefficientFunction::constant(m.base)
                      : CoefficientFunction::sinusoidal(m.base, m.amplitude, m.frequency, m.phase);
  }
  if (auto v = get("physics", "a_lower")) c.physics.a.a0 = to_double("physics.a_lower", *v);
  if (auto v = get("physics", "a_upper")) c.physics.a.a1 = to_double("physics.a_upper", *v);
  if (auto v = get("physics", "a_hoelder_c")) c.physics.a.hoelder_c = to_double("physics.a_hoelder_c", *v);
  if (auto v = get("physics", "a_hoelder_beta")) {
    c.physics.a.hoelder_beta = to_double("physics.a_hoelder_beta", *v);
  }
  if (!(c.physics.a.a0 > 0)) fail("physics.a_lower", "must be positive");
  if (!(c.physics.a.a1 >= c.physics.a.a0)) fail("physics.a_upper", "must be at least a_lower");
  if (!(c.physics.a.hoelder_c >= 0)) fail("physics.a_hoelder_c", "must be nonnegative");
  if (!(c.physics.a.hoelder_beta > 0 && c.physics.a.hoelder_beta <= 1)) {
    fail("physics.a_hoelder_beta", "must lie in (0, 1]");
  }

  const std::string kind = trim(get("nonlinearity", "f").value_or("zero"));
  const auto p = get("nonlinearity", "p");
  const auto gamma = get("nonlinearity", "gamma");
  const auto cubic = get("nonlinearity", "cubic");
  if (kind == "zero") {
    c.nonlinearity.f = NonlinearitySpec::zero();
  } else if (kind == "modulated_sine" || kind == "modulated_saturating") {
    const Modulation m = p ? to_modulation("nonlinearity.p", *p) : Modulation::constant(1.0);
    c.nonlinearity.f = kind == "modulated_sine" ? NonlinearitySpec::modulated_sine(m)
                                                : NonlinearitySpec::modulated_saturating(m);
  } else if (kind == "soft_cubic") {
    const double g = gamma ? to_double("nonlinearity.gamma", *gamma) : 1.0;
    const double k = cubic ? to_double("nonlinearity.cubic", *cubic) : 1.0;
    if (!(k >= 0)) fail("nonlinearity.cubic", "must be nonnegative");
    c.nonlinearity.f = NonlinearitySpec::soft_cubic(g, k);
  } else {
    fail("nonlinearity.f", "unknown variant '" + kind +
                               "' (expected zero, modulated_sine, modulated_saturating, soft_cubic)");
  }
  if (p && (kind == "zero" || kind == "soft_cubic")) fail("nonlinearity.p", "not used by " + kind);
  if ((gamma || cubic) && kind != "soft_cubic") {
    fail(gamma ? "nonlinearity.gamma" : "nonlinearity.cubic", "only used by soft_cubic");
  }
  if (auto v = get("nonlinearity", "rho")) {
    const double rho = to_double("nonlinearity.rho", *v);
    if (rho < c.nonlinearity.f.rho()) {
      fail("nonlinearity.rho", "declared growth exponent is below the variant's exponent " +
                                   format_number(c.nonlinearity.f.rho()));
    }
    c.nonlinearity.rho = rho;
  }
  if (auto v = get("nonlinearity", "radius")) c.nonlinearity.radius = to_double("nonlinearity.radius", *v);
  if (!(c.nonlinearity.radius > 0)) fail("nonlinearity.radius", "must be positive");

  if (auto v = get("initial", "kind")) {
    const std::string k = trim(*v);
    if (k == "zero") c.initial.kind = ExperimentConfig::Initial::Kind::zero;
    else if (k == "ball") c.initial.kind = ExperimentConfig::Initial::Kind::ball;
    else fail("initial.kind", "expected zero or ball");
  }
  if (auto v = get("initial", "radius")) c.initial.radius = to_double("initial.radius", *v);
  if (!(c.initial.radius >= 0)) fail("initial.radius", "must be nonnegative");
  if (auto v = get("initial", "seed")) c.initial.seed = to_unsigned("initial.seed", *v);

  if (auto v = get("integrator", "dt")) c.integrator.dt = to_double("integrator.dt", *v);
  if (!(c.integrator.dt > 0)) fail("integrator.dt", "must be positive");
  if (auto v = get("integrator", "t_final")) c.integrator.t_final = to_double("integrator.t_final", *v);
  if (auto v = get("integrator", "tau")) c.integrator.tau = to_double("integrator.tau", *v);
  if (!(c.integrator.t_final >= c.integrator.tau)) fail("integrator.t_final", "must be at least tau");
  if (auto v = get("integrator", "record_stride")) {
    c.integrator.record_stride = to_unsigned("integrator.record_stride", *v);
  }
  if (c.integrator.record_stride < 1) fail("integrator.record_stride", "must be at least 1");

  if (auto v = get("lyapunov", "delta2")) {
    const double d2 = to_double("lyapunov.delta2", *v);
    if (!(d2 > 0 && d2 < 1)) fail("lyapunov.delta2", "must lie in (0, 1)");
    c.lyapunov.delta2 = d2;
  }

  if (auto v = get("attractor", "radius")) c.attractor.radius = to_double("attractor.radius", *v);
  if (!(c.attractor.radius > 0)) fail("attractor.radius", "must be positive");
  if (auto v = get("attractor", "members")) c.attractor.members = to_unsigned("attractor.members", *v);
  if (c.attractor.members < 1) fail("attractor.members", "must be at least 1");
  if (auto v = get("attractor", "seed")) c.attractor.seed = to_unsigned("attractor.seed", *v);
  if (auto v = get("attractor", "schedule")) c.attractor.schedule = to_list("attractor.schedule", *v);
  if (c.attractor.schedule.empty()) fail("attractor.schedule", "must not be empty");
  for (std::size_t i = 0; i < c.attractor.schedule.size(); ++i) {
    if (!(c.attractor.schedule[i] > 0) ||
        (i > 0 && !(c.attractor.schedule[i] > c.attractor.schedule[i - 1]))) {
      fail("attractor.schedule", "horizons must be positive and strictly increasing");
    }
  }
  if (auto v = get("attractor", "tol")) c.attractor.tol = to_double("attractor.tol", *v);
  if (!(c.attractor.tol > 0)) fail("attractor.tol", "must be positive");
  if (auto v = get("attractor", "target_time")) {
    c.attractor.target_time = to_double("attractor.target_time", *v);
  }
  if (auto v = get("attractor", "dt")) c.attractor.dt = to_double("attractor.dt", *v);
  if (!(c.attractor.dt > 0)) fail("attractor.dt", "must be positive");

  if (auto v = get("output", "dir")) c.output.dir = trim(*v);
  if (c.output.dir.empty()) fail("output.dir", "must not be empty");
  if (auto v = get("output", "format")) c.output.format = trim(*v);
  if (c.output.format != "csv" && c.output.format != "json") {
    fail("output.format", "expected csv or json");
  }
  if (auto v = get("output", "snapshots")) c.output.snapshots = to_bool("output.snapshots", *v);
  if (auto v = get("output", "svg")) c.output.svg = to_bool("output.svg", *v);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::config, "cannot open config file '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  auto num = [](double v) { return format_number(v); };

  out << "[domain]\n"
      << "dimension = " << c.domain.dimension << "\n"
      << "length = " << num(c.domain.length) << "\n"
      << "modes = " << c.domain.modes << "\n\n";

  out << "[physics]\n"
      << "eta = " << num(c.physics.eta) << "\n"
      << "kappa = " << num(c.physics.kappa) << "\n"
      << "a = " << modulation_text(c.physics.a.shape) << "\n"
      << "a_lower = " << num(c.physics.a.a0) << "\n"
      << "a_upper = " << num(c.physics.a.a1) << "\n"
      << "a_hoelder_c = " << num(c.physics.a.hoelder_c) << "\n"
      << "a_hoelder_beta = " << num(c.physics.a.hoelder_beta) << "\n\n";

  const auto& f = c.nonlinearity.f;
  out << "[nonlinearity]\n";
  switch (f.kind()) {
    case NonlinearitySpec::Kind::zero:
      out << "f = zero\n";
      break;
    case NonlinearitySpec::Kind::modulated_sine:
    case NonlinearitySpec::Kind::modulated_saturating:
      out << "f = "
          << (f.kind() == NonlinearitySpec::Kind::modulated_sine ? "modulated_sine"
                                                                 : "modulated_saturating")
          << "\np = " << modulation_text(f.modulation()) << "\n";
      break;
    case NonlinearitySpec::Kind::soft_cubic:
      out << "f = soft_cubic\ngamma = " << num(f.gamma()) << "\ncubic = " << num(f.cubic()) << "\n";
      break;
  }
  if (c.nonlinearity.rho) out << "rho = " << num(*c.nonlinearity.rho) << "\n";
  out << "radius = " << num(c.nonlinearity.radius) << "\n\n";

  out << "[initial]\n"
      << "kind = " << (c.initial.kind == ExperimentConfig::Initial::Kind::zero ? "zero" : "ball") << "\n"
      << "radius = " << num(c.initial.radius) << "\n"
      << "seed = " << c.initial.seed << "\n\n";

  out << "[integrator]\n"
      << "dt = " << num(c.integrator.dt) << "\n"
      << "t_final = " << num(c.integrator.t_final) << "\n"
      << "tau = " << num(c.integrator.tau) << "\n"
      << "record_stride = " << c.integrator.record_stride << "\n\n";

  out << "[lyapunov]\n";
  if (c.lyapunov.delta2) out << "delta2 = " << num(*c.lyapunov.delta2) << "\n";
  out << "\n";

  out << "[attractor]\n"
      << "radius = " << num(c.attractor.radius) << "\n"
      << "members = " << c.attractor.members << "\n"
      << "seed = " << c.attractor.seed << "\n"
      << "schedule = ";
  for (std::size_t i = 0; i < c.attractor.schedule.size(); ++i) {
    out << (i ? ", " : "") << num(c.attractor.schedule[i]);
  }
  out << "\n"
      << "tol = " << num(c.attractor.tol) << "\n"
      << "target_time = " << num(c.attractor.target_time) << "\n"
      << "dt = " << num(c.attractor.dt) << "\n\n";

  out << "[output]\n"
      << "dir = " << c.output.dir << "\n"
      << "format = " << c.output.format << "\n"
      << "snapshots = " << (c.output.snapshots ? "true" : "false") << "\n"
      << "svg = " << (c.output.svg ? "true" : "false") << "\n";
  return out.str();
}

void check_admissibility(const ExperimentConfig& c) {
  try {
    check_params(c.physics);
  } catch (const Error& e) {
    throw Error(ErrorKind::admissibility, std::string("physics: ") + e.what());
  }
  const BoxDomain domain = c.make_domain();
  if (c.nonlinearity.f.kind() == NonlinearitySpec::Kind::soft_cubic && c.domain.dimension != 2) {
    throw Error(ErrorKind::admissibility, "nonlinearity.f: soft_cubic is admitted only for dimension 2");
  }
  try {
    dissipativity_margin(c.nonlinearity.f, domain.lambda1());
  } catch (const Error& e) {
    throw Error(ErrorKind::admissibility, std::string("nonlinearity.f: ") + e.what());
  }
}

}  // namespace thermoplate
