#pragma once

// Sine eigenbasis of the Dirichlet Laplacian on the box (0, l)^d.
//
// Coefficients are stored row-major over the multi-index k in {1..n}^d with
// k_1 slowest and refer to the L2-orthonormal eigenfunctions
//   e_k(x) = prod_i sqrt(2/l) sin(k_i pi x_i / l),
// so the L2 norm of a field is the Euclidean norm of its coefficients.
// Grid values live on the interior collocation points x_i = i l / (n + 1).

#include <array>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace thermoplate {

namespace detail {
struct DomainData;
}

class BoxDomain {
 public:
  BoxDomain(int dimension, std::size_t modes_per_axis,
            double length = std::numbers::pi);

  int dimension() const noexcept;
  double length() const noexcept;
  std::size_t modes_per_axis() const noexcept;
  std::size_t mode_count() const noexcept;

  /// l / (n + 1)
  double grid_spacing() const noexcept;
  /// Collocation quadrature weight h^d.
  double cell_volume() const noexcept;
  /// l^d
  double volume() const noexcept;

  /// Eigenvalues of -Laplacian per flat mode index.
  std::span<const double> mu() const noexcept;
  double lambda1() const noexcept;
  double mu_max() const noexcept;

  std::size_t flat_index(std::span<const int> k) const;
  std::array<int, 2> multi_index(std::size_t flat) const;

  // Raw transforms between grid values and coefficients; sizes must equal
  // mode_count().  Safe to call concurrently.
  void forward(std::span<const double> grid, std::span<double> coeffs) const;
  void inverse(std::span<const double> coeffs, std::span<double> grid) const;

  bool operator==(const BoxDomain& other) const noexcept;

 private:
  std::shared_ptr<const detail::DomainData> data_;
};

double eigenvalue_mu(const BoxDomain& domain, std::span<const int> k);

struct SpectralField {
  explicit SpectralField(BoxDomain d);
  SpectralField(BoxDomain d, std::vector<double> c);

  BoxDomain domain;
  std::vector<double> coeffs;
};

SpectralField dst_forward(const BoxDomain& domain, std::span<const double> grid);
std::vector<double> dst_inverse(const SpectralField& field);

enum class NormSpace { L2, H2, H1seminorm, Hneg2 };

double norm(const SpectralField& field, NormSpace space);

/// Discrete L2 norm of grid values with the collocation weight h^d.
double grid_l2_norm(const BoxDomain& domain, std::span<const double> grid);

}  // namespace thermoplate
