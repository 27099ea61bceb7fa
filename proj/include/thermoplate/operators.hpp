#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermoplate/coeffs.hpp"

namespace thermoplate {

using Mat3 = Eigen::Matrix3d;

enum class OperatorKind { paper_A, paper_A_inverse, generator_G };

const char* to_string(OperatorKind kind) noexcept;

struct PhysicalParams {
  double eta = 1.0;
  double kappa = 1.0;
  CoefficientFunction a = CoefficientFunction::constant(1.0);
};

/// eta > 0, kappa > 0 and consistent declared a-data; throws admissibility.
void check_params(const PhysicalParams& params);

struct ModeOperator {
  OperatorKind kind = OperatorKind::paper_A;
  double mu = 1.0;
  double t = 0.0;
  Mat3 entries = Mat3::Zero();
};

/// Per-mode matrix with the coupling value a given directly.
Mat3 build_matrix(OperatorKind kind, double eta, double kappa, double a, double mu);

ModeOperator build(OperatorKind kind, const PhysicalParams& params, double t, double mu);

/// Throws usage unless op is paper_A.
double determinant(const ModeOperator& op);

/// max |A A^-1 - I| entrywise.
double check_inverse(const PhysicalParams& params, double t, double mu);

/// Largest singular value from the Gram matrix.
double spectral_norm(const Mat3& m);
double spectral_norm(const Eigen::Matrix3cd& m);

struct ResolventReport {
  double sup = 0;
  std::complex<double> argmax{0, 0};
  double argmax_mu = 0;
  std::vector<std::complex<double>> singular;  // samples where lambda I + A is singular
};

/// sup of (|lambda| + 1) |(lambda I + A(t))^-1|_2 over samples with Re lambda >= 0.
ResolventReport resolvent_bound(const PhysicalParams& params, double t, double mu,
                                const std::vector<std::complex<double>>& samples);

/// |lambda| in {0, 1, 10, 1e3} with 9 phases across [-pi/2, pi/2].
std::vector<std::complex<double>> standard_resolvent_samples();

/// Sup over the standard samples and mu in {lambda1, 10, 100}.
ResolventReport standard_resolvent_bound(const PhysicalParams& params, double t, double lambda1);

/// Operator norm of A(t) - A(s) from H^2 x L^2 x L^2 to L^2 x H^-2 x H^-2,
/// taken per mode with the matching weights (equals |a(t) - a(s)|).
/// Throws admissibility if it exceeds C |t - s|^beta.
double hoelder_gap(const PhysicalParams& params, double t, double s);

}  // namespace thermoplate
