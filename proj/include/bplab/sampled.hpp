#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>

namespace bplab {

using Index = Eigen::Index;
using cplx = std::complex<double>;
using ArrayC = Eigen::ArrayXXcd;

// Declared Fourier support on one axis as a range of |frequency|.
struct Band {
  double lo = 0;
  double hi = 0;
};

// Periodic samples f(x_a, y_b) with x_a = a L / N, y_b = b L2 / M. One-dimensional
// functions have M = 1. The model is f(x) = sum_k c_k e^{2 pi i k x / L}.
class SampledFunction {
 public:
  SampledFunction() = default;
  SampledFunction(Index n, double period);
  SampledFunction(Index n, Index m, double period_x, double period_y);
  SampledFunction(ArrayC values, double period_x, double period_y, int dim);

  int dim() const { return dim_; }
  Index n() const { return values_.rows(); }
  Index m() const { return values_.cols(); }
  double period_x() const { return period_x_; }
  double period_y() const { return period_y_; }
  double dx() const { return period_x_ / static_cast<double>(n()); }
  double dy() const { return dim_ == 2 ? period_y_ / static_cast<double>(m()) : 1.0; }
  double cell() const { return dx() * dy(); }
  double nyquist_x() const { return static_cast<double>(n()) / (2 * period_x_); }
  double nyquist_y() const { return static_cast<double>(m()) / (2 * period_y_); }

  const ArrayC& values() const { return values_; }
  ArrayC& values() { return values_; }

  // Declared |frequency| band per axis, if known.
  std::optional<std::array<Band, 2>> band;

  bool same_grid(const SampledFunction& o) const;

 private:
  int dim_ = 1;
  double period_x_ = 1;
  double period_y_ = 1;
  ArrayC values_;
};

// Signed frequency index of FFT slot k on an n-point grid, in [-n/2, n/2).
inline Index signed_index(Index k, Index n) { return k < n / 2 ? k : k - n; }

// Normalized coefficients c_k (forward transform divided by the grid size).
ArrayC fourier_coefficients(const SampledFunction& f);
SampledFunction from_coefficients(const ArrayC& c, const SampledFunction& like);

// Coefficients along x only, one column per y sample, and the inverse.
ArrayC x_coefficients(const SampledFunction& f);
SampledFunction from_x_coefficients(const ArrayC& c, const SampledFunction& like);

// Multiplies the Fourier coefficients by m(frequency) along one axis (1 = x, 2 = y).
template <class Multiplier>
SampledFunction apply_multiplier(const SampledFunction& f, int axis, Multiplier&& m) {
  ArrayC c = fourier_coefficients(f);
  if (axis == 1) {
    for (Index a = 0; a < c.rows(); ++a) {
      double xi = static_cast<double>(signed_index(a, c.rows())) / f.period_x();
      c.row(a) *= m(xi);
    }
  } else {
    for (Index b = 0; b < c.cols(); ++b) {
      double eta = static_cast<double>(signed_index(b, c.cols())) / f.period_y();
      c.col(b) *= m(eta);
    }
  }
  return from_coefficients(c, f);
}

// Max |c_k| over slots whose |frequency| lies outside band, relative to max |c_k|.
double out_of_band_ratio(const SampledFunction& f, int axis, const Band& band);

// Largest |signed index| per axis among coefficients above rel_tol * max.
std::array<Index, 2> effective_degree(const ArrayC& coeffs, double rel_tol = 1e-13);

// Riemann-sum Lebesgue norm; p = infinity gives the sup.
double lp_norm(const SampledFunction& f, double p);
// Bilinear Riemann pairing sum f g (no conjugation) and the Hermitian one.
cplx integrate_product(const SampledFunction& f, const SampledFunction& g);
cplx inner(const SampledFunction& f, const SampledFunction& g);

// Binary container: magic, dim, sizes, periods, then interleaved re/im doubles
// in x-major order (x index outer).
void write_binary(std::ostream& os, const SampledFunction& f);
SampledFunction read_binary(std::istream& is);

// Bit-grid container for set indicators.
using BitGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
void write_bitgrid(std::ostream& os, const BitGrid& g);
BitGrid read_bitgrid(std::istream& is);

}  // namespace bplab
