#include "thermoplate/operators.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "thermoplate/error.hpp"

namespace thermoplate {

const char* to_string(OperatorKind kind) noexcept {
  switch (kind) {
    case OperatorKind::paper_A: return "paper_A";
    case OperatorKind::paper_A_inverse: return "paper_A_inverse";
    case OperatorKind::generator_G: return "generator_G";
  }
  return "unknown";
}

void check_params(const PhysicalParams& params) {
  if (!(params.eta > 0) || !std::isfinite(params.eta)) {
    throw Error(ErrorKind::admissibility, "eta must be positive");
  }
  if (!(params.kappa > 0) || !std::isfinite(params.kappa)) {
    throw Error(ErrorKind::admissibility, "kappa must be positive");
  }
  check_declared(params.a);
}

Mat3 build_matrix(OperatorKind kind, double eta, double kappa, double a, double mu) {
  if (!(mu > 0)) {
    throw Error(ErrorKind::domain, "mode eigenvalue mu must be positive");
  }
  Mat3 m;
  switch (kind) {
    case OperatorKind::paper_A:
      m << 0, 1, 0,
           -eta * mu * mu, 0, -a * mu,
           0, a * mu, kappa * mu;
      break;
    case OperatorKind::paper_A_inverse: {
      const double ek = eta * kappa;
      m << a * a / (ek * mu), -1.0 / (eta * mu * mu), -a / (ek * mu * mu),
           1, 0, 0,
           -a / kappa, 0, 1.0 / (kappa * mu);
      break;
    }
    case OperatorKind::generator_G:
      m << 0, 1, 0,
           -eta * mu * mu, 0, a * mu,
           0, -a * mu, -kappa * mu;
      break;
  }
  return m;
}

ModeOperator build(OperatorKind kind, const PhysicalParams& params, double t, double mu) {
  ModeOperator op;
  op.kind = kind;
  op.mu = mu;
  op.t = t;
  op.entries = build_matrix(kind, params.eta, params.kappa, eval_a(params.a, t), mu);
  return op;
}

double determinant(const ModeOperator& op) {
  if (op.kind != OperatorKind::paper_A) {
    throw Error(ErrorKind::usage, "determinant is defined for paper_A operators only");
  }
  return op.entries.determinant();
}

double check_inverse(const PhysicalParams& params, double t, double mu) {
  const Mat3 a = build(OperatorKind::paper_A, params, t, mu).entries;
  const Mat3 inv = build(OperatorKind::paper_A_inverse, params, t, mu).entries;
  return (a * inv - Mat3::Identity()).cwiseAbs().maxCoeff();
}

double spectral_norm(const Mat3& m) {
  const Eigen::SelfAdjointEigenSolver<Mat3> es(m.transpose() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double spectral_norm(const Eigen::Matrix3cd& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(m.adjoint() * m,
                                                           Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

ResolventReport resolvent_bound(const PhysicalParams& params, double t, double mu,
                                const std::vector<std::complex<double>>& samples) {
  const Eigen::Matrix3cd a = build(OperatorKind::paper_A, params, t, mu).entries.cast<std::complex<double>>();
  ResolventReport report;
  for (const auto& lambda : samples) {
    if (lambda.real() < 0) {
      throw Error(ErrorKind::domain, "resolvent samples need Re(lambda) >= 0");
    }
    const Eigen::Matrix3cd shifted = lambda * Eigen::Matrix3cd::Identity() + a;
    const Eigen::FullPivLU<Eigen::Matrix3cd> lu(shifted);
    if (!lu.isInvertible()) {
      report.singular.push_back(lambda);
      continue;
    }
    const double value = (std::abs(lambda) + 1.0) * spectral_norm(Eigen::Matrix3cd(lu.inverse()));
    if (value > report.sup) {
      report.sup = value;
      report.argmax = lambda;
      report.argmax_mu = mu;
    }
  }
  return report;
}

std::vector<std::complex<double>> standard_resolvent_samples() {
  std::vector<std::complex<double>> out;
  out.emplace_back(0.0, 0.0);
  for (double r : {1.0, 10.0, 1e3}) {
    for (int j = 0; j <= 8; ++j) {
      const double phase = -std::numbers::pi / 2 + std::numbers::pi * j / 8.0;
      // cos(+-pi/2) is not exactly zero; clamp so Re >= 0 holds exactly.
      out.emplace_back(std::max(0.0, r * std::cos(phase)), r * std::sin(phase));
    }
  }
  return out;
}

ResolventReport standard_resolvent_bound(const PhysicalParams& params, double t, double lambda1) {
  const auto samples = standard_resolvent_samples();
  ResolventReport total;
  for (double mu : {lambda1, 10.0, 100.0}) {
    const ResolventReport r = resolvent_bound(params, t, mu, samples);
    if (r.sup > total.sup) {
      total.sup = r.sup;
      total.argmax = r.argmax;
      total.argmax_mu = r.argmax_mu;
    }
    total.singular.insert(total.singular.end(), r.singular.begin(), r.singular.end());
  }
  return total;
}

double hoelder_gap(const PhysicalParams& params, double t, double s) {
  const double at = eval_a(params.a, t);
  const double as = eval_a(params.a, s);
  double gap = 0;
  for (double mu : {1.0, 2.0, 10.0, 100.0}) {
    const Mat3 diff = build_matrix(OperatorKind::paper_A, params.eta, params.kappa, at, mu) -
                      build_matrix(OperatorKind::paper_A, params.eta, params.kappa, as, mu);
    const Mat3 out_w = Eigen::Vector3d(1.0, 1.0 / mu, 1.0 / mu).asDiagonal();
    const Mat3 in_w = Eigen::Vector3d(1.0 / mu, 1.0, 1.0).asDiagonal();
    gap = std::max(gap, spectral_norm(Mat3(out_w * diff * in_w)));
  }
  const double bound = params.a.hoelder_c * std::pow(std::abs(t - s), params.a.hoelder_beta);
  if (gap > bound + 1e-12) {
    std::ostringstream msg;
    msg << "Hoelder bound fails at (t, s) = (" << t << ", " << s << "): gap " << gap
        << " > " << bound;
    throw Error(ErrorKind::admissibility, msg.str());
  }
  return gap;
}

}  // namespace thermoplate
