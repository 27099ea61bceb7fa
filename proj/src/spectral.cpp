#include "thermoplate/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>

#include "thermoplate/error.hpp"

namespace thermoplate {

namespace detail {

// FFTW's planner is not reentrant; plan execution with explicit arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct DomainData {
  int dimension = 0;
  std::size_t n = 0;
  double length = 0;
  std::size_t count = 0;
  std::vector<double> mu;
  double mu_max = 0;
  double forward_scale = 0;
  double inverse_scale = 0;
  fftw_plan plan = nullptr;

  ~DomainData() {
    if (plan != nullptr) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

}  // namespace detail

namespace {

std::shared_ptr<const detail::DomainData> make_domain(int d, std::size_t n, double l) {
  if (d != 1 && d != 2) {
    throw Error(ErrorKind::domain, "box dimension must be 1 or 2");
  }
  if (n < 1) {
    throw Error(ErrorKind::domain, "modes_per_axis must be at least 1");
  }
  if (!(l > 0) || !std::isfinite(l)) {
    throw Error(ErrorKind::domain, "box side length must be positive and finite");
  }
  auto data = std::make_shared<detail::DomainData>();
  data->dimension = d;
  data->n = n;
  data->length = l;
  data->count = d == 1 ? n : n * n;
  data->mu.resize(data->count);
  const double w = std::numbers::pi / l;
  for (std::size_t flat = 0; flat < data->count; ++flat) {
    if (d == 1) {
      const double k = static_cast<double>(flat + 1);
      data->mu[flat] = (k * w) * (k * w);
    } else {
      const double k1 = static_cast<double>(flat / n + 1);
      const double k2 = static_cast<double>(flat % n + 1);
      data->mu[flat] = (k1 * w) * (k1 * w) + (k2 * w) * (k2 * w);
    }
  }
  data->mu_max = *std::max_element(data->mu.begin(), data->mu.end());

  // FFTW's RODFT00 is 2 * sum_j x_j sin(pi (j+1)(k+1)/(n+1)) per axis.
  const double h = l / static_cast<double>(n + 1);
  const double half_d = 0.5 * d;
  const double unitary = std::pow(2.0 * static_cast<double>(n + 1), -half_d);
  data->forward_scale = unitary * std::pow(h, half_d);
  data->inverse_scale = unitary * std::pow(h, -half_d);

  std::vector<double> scratch(data->count, 0.0);
  const int ni = static_cast<int>(n);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (d == 1) {
      data->plan = fftw_plan_r2r_1d(ni, scratch.data(), scratch.data(), FFTW_RODFT00, flags);
    } else {
      data->plan = fftw_plan_r2r_2d(ni, ni, scratch.data(), scratch.data(), FFTW_RODFT00,
                                    FFTW_RODFT00, flags);
    }
  }
  if (data->plan == nullptr) {
    throw Error(ErrorKind::domain, "failed to create sine transform plan");
  }
  return data;
}

void transform(const detail::DomainData& data, std::span<const double> in, std::span<double> out,
               double scale) {
  if (in.size() != data.count || out.size() != data.count) {
    std::ostringstream msg;
    msg << "transform expects " << data.count << " values, got " << in.size() << " -> "
        << out.size();
    throw Error(ErrorKind::shape, msg.str());
  }
  if (in.data() != out.data()) {
    std::copy(in.begin(), in.end(), out.begin());
  }
  fftw_execute_r2r(data.plan, out.data(), out.data());
  for (double& x : out) {
    x *= scale;
  }
}

}  // namespace

BoxDomain::BoxDomain(int dimension, std::size_t modes_per_axis, double length)
    : data_(make_domain(dimension, modes_per_axis, length)) {}

int BoxDomain::dimension() const noexcept { return data_->dimension; }
double BoxDomain::length() const noexcept { return data_->length; }
std::size_t BoxDomain::modes_per_axis() const noexcept { return data_->n; }
std::size_t BoxDomain::mode_count() const noexcept { return data_->count; }

double BoxDomain::grid_spacing() const noexcept {
  return data_->length / static_cast<double>(data_->n + 1);
}

double BoxDomain::cell_volume() const noexcept {
  const double h = grid_spacing();
  return data_->dimension == 1 ? h : h * h;
}

double BoxDomain::volume() const noexcept {
  return data_->dimension == 1 ? data_->length : data_->length * data_->length;
}

std::span<const double> BoxDomain::mu() const noexcept { return data_->mu; }
double BoxDomain::lambda1() const noexcept { return data_->mu.front(); }
double BoxDomain::mu_max() const noexcept { return data_->mu_max; }

std::size_t BoxDomain::flat_index(std::span<const int> k) const {
  if (k.size() != static_cast<std::size_t>(data_->dimension)) {
    throw Error(ErrorKind::range, "multi-index length does not match the box dimension");
  }
  std::size_t flat = 0;
  for (int ki : k) {
    if (ki < 1 || static_cast<std::size_t>(ki) > data_->n) {
      std::ostringstream msg;
      msg << "mode index " << ki << " outside 1.." << data_->n;
      throw Error(ErrorKind::range, msg.str());
    }
    flat = flat * data_->n + static_cast<std::size_t>(ki - 1);
  }
  return flat;
}

std::array<int, 2> BoxDomain::multi_index(std::size_t flat) const {
  if (flat >= data_->count) {
    throw Error(ErrorKind::range, "flat mode index out of range");
  }
  if (data_->dimension == 1) {
    return {static_cast<int>(flat + 1), 0};
  }
  return {static_cast<int>(flat / data_->n + 1), static_cast<int>(flat % data_->n + 1)};
}

void BoxDomain::forward(std::span<const double> grid, std::span<double> coeffs) const {
  transform(*data_, grid, coeffs, data_->forward_scale);
}

void BoxDomain::inverse(std::span<const double> coeffs, std::span<double> grid) const {
  transform(*data_, coeffs, grid, data_->inverse_scale);
}

bool BoxDomain::operator==(const BoxDomain& other) const noexcept {
  return data_ == other.data_ ||
         (data_->dimension == other.data_->dimension && data_->n == other.data_->n &&
          data_->length == other.data_->length);
}

double eigenvalue_mu(const BoxDomain& domain, std::span<const int> k) {
  return domain.mu()[domain.flat_index(k)];
}

SpectralField::SpectralField(BoxDomain d) : domain(std::move(d)), coeffs(domain.mode_count(), 0.0) {}

SpectralField::SpectralField(BoxDomain d, std::vector<double> c)
    : domain(std::move(d)), coeffs(std::move(c)) {
  if (coeffs.size() != domain.mode_count()) {
    throw Error(ErrorKind::shape, "coefficient count does not match the domain");
  }
}

SpectralField dst_forward(const BoxDomain& domain, std::span<const double> grid) {
  SpectralField out(domain);
  domain.forward(grid, out.coeffs);
  return out;
}

std::vector<double> dst_inverse(const SpectralField& field) {
  std::vector<double> grid(field.domain.mode_count());
  field.domain.inverse(field.coeffs, grid);
  return grid;
}

double norm(const SpectralField& field, NormSpace space) {
  const auto mu = field.domain.mu();
  double sum = 0;
  for (std::size_t k = 0; k < field.coeffs.size(); ++k) {
    const double c = field.coeffs[k];
    if (!std::isfinite(c)) {
      throw Error(ErrorKind::domain, "non-finite coefficient in norm");
    }
    switch (space) {
      case NormSpace::L2:
        sum += c * c;
        break;
      case NormSpace::H2:
        sum += mu[k] * mu[k] * c * c;
        break;
      case NormSpace::H1seminorm:
        sum += mu[k] * c * c;
        break;
      case NormSpace::Hneg2:
        sum += c * c / (mu[k] * mu[k]);
        break;
    }
  }
  return std::sqrt(sum);
}

double grid_l2_norm(const BoxDomain& domain, std::span<const double> grid) {
  if (grid.size() != domain.mode_count()) {
    throw Error(ErrorKind::shape, "grid size does not match the domain");
  }
  double sum = 0;
  for (double g : grid) {
    sum += g * g;
  }
  return std::sqrt(domain.cell_volume() * sum);
}

}  // namespace thermoplate
