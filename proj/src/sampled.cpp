#include "bplab/sampled.hpp"

#include <unsupported/Eigen/FFT>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

static_assert(std::endian::native == std::endian::little, "binary containers assume a little-endian host");

namespace bplab {

namespace {

bool power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

void check_sizes(Index n, Index m) {
  if (!power_of_two(n) || !power_of_two(m)) throw std::invalid_argument("grid sizes must be powers of two");
}

// Eigen::FFT keeps per-size plans internally; one instance per thread keeps that
// cache private to the calling thread.
Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

void transform_axis(ArrayC& a, int axis, bool forward) {
  auto& fft = fft_engine();
  if (axis == 1) {
    std::vector<cplx> in(static_cast<std::size_t>(a.rows())), out;
    for (Index b = 0; b < a.cols(); ++b) {
      for (Index i = 0; i < a.rows(); ++i) in[static_cast<std::size_t>(i)] = a(i, b);
      if (forward) fft.fwd(out, in); else fft.inv(out, in);
      for (Index i = 0; i < a.rows(); ++i) a(i, b) = out[static_cast<std::size_t>(i)];
    }
  } else {
    std::vector<cplx> in(static_cast<std::size_t>(a.cols())), out;
    for (Index i = 0; i < a.rows(); ++i) {
      for (Index b = 0; b < a.cols(); ++b) in[static_cast<std::size_t>(b)] = a(i, b);
      if (forward) fft.fwd(out, in); else fft.inv(out, in);
      for (Index b = 0; b < a.cols(); ++b) a(i, b) = out[static_cast<std::size_t>(b)];
    }
  }
}

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw std::invalid_argument("container truncated");
  return v;
}

constexpr char kFunctionMagic[8] = {'B', 'P', 'L', 'S', 'F', '1', 0, 0};
constexpr char kBitMagic[8] = {'B', 'P', 'L', 'B', 'G', '1', 0, 0};

void check_magic(std::istream& is, const char (&magic)[8]) {
  char buf[8];
  if (!is.read(buf, 8) || std::memcmp(buf, magic, 8) != 0) throw std::invalid_argument("bad container magic");
}

}  // namespace

SampledFunction::SampledFunction(Index n, double period) : SampledFunction(ArrayC::Zero(n, 1), period, 1.0, 1) {}

SampledFunction::SampledFunction(Index n, Index m, double period_x, double period_y)
    : SampledFunction(ArrayC::Zero(n, m), period_x, period_y, 2) {}

SampledFunction::SampledFunction(ArrayC values, double period_x, double period_y, int dim)
    : dim_(dim), period_x_(period_x), period_y_(period_y), values_(std::move(values)) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dimension must be 1 or 2");
  if (dim == 1 && values_.cols() != 1) throw std::invalid_argument("1D function must have one column");
  check_sizes(values_.rows(), values_.cols());
  if (!(period_x > 0) || !(period_y > 0) || !std::isfinite(period_x) || !std::isfinite(period_y))
    throw std::invalid_argument("periods must be positive");
}

bool SampledFunction::same_grid(const SampledFunction& o) const {
  return dim_ == o.dim_ && n() == o.n() && m() == o.m() && period_x_ == o.period_x_ && period_y_ == o.period_y_;
}

ArrayC fourier_coefficients(const SampledFunction& f) {
  ArrayC c = f.values();
  transform_axis(c, 1, true);
  if (f.dim() == 2) transform_axis(c, 2, true);
  c /= static_cast<double>(c.size());
  return c;
}

SampledFunction from_coefficients(const ArrayC& c, const SampledFunction& like) {
  if (c.rows() != like.n() || c.cols() != like.m()) throw std::invalid_argument("coefficient shape mismatch");
  // Eigen's inverse transform divides by the length; undo it so c_k are amplitudes.
  ArrayC v = c * static_cast<double>(c.size());
  transform_axis(v, 1, false);
  if (like.dim() == 2) transform_axis(v, 2, false);
  SampledFunction out(std::move(v), like.period_x(), like.period_y(), like.dim());
  return out;
}

ArrayC x_coefficients(const SampledFunction& f) {
  ArrayC c = f.values();
  transform_axis(c, 1, true);
  c /= static_cast<double>(c.rows());
  return c;
}

SampledFunction from_x_coefficients(const ArrayC& c, const SampledFunction& like) {
  if (c.rows() != like.n() || c.cols() != like.m()) throw std::invalid_argument("coefficient shape mismatch");
  ArrayC v = c * static_cast<double>(c.rows());
  transform_axis(v, 1, false);
  return SampledFunction(std::move(v), like.period_x(), like.period_y(), like.dim());
}

double out_of_band_ratio(const SampledFunction& f, int axis, const Band& band) {
  ArrayC c = fourier_coefficients(f);
  double peak = c.abs().maxCoeff();
  if (peak == 0) return 0;
  double worst = 0;
  for (Index a = 0; a < c.rows(); ++a) {
    for (Index b = 0; b < c.cols(); ++b) {
      double xi = axis == 1 ? static_cast<double>(signed_index(a, c.rows())) / f.period_x()
                            : static_cast<double>(signed_index(b, c.cols())) / f.period_y();
      double ax = std::abs(xi);
      if (ax < band.lo || ax > band.hi) worst = std::max(worst, std::abs(c(a, b)));
    }
  }
  return worst / peak;
}

std::array<Index, 2> effective_degree(const ArrayC& c, double rel_tol) {
  double peak = c.abs().maxCoeff();
  std::array<Index, 2> deg{0, 0};
  if (peak == 0) return deg;
  for (Index a = 0; a < c.rows(); ++a)
    for (Index b = 0; b < c.cols(); ++b)
      if (std::abs(c(a, b)) > rel_tol * peak) {
        deg[0] = std::max(deg[0], std::abs(signed_index(a, c.rows())));
        deg[1] = std::max(deg[1], std::abs(signed_index(b, c.cols())));
      }
  return deg;
}

double lp_norm(const SampledFunction& f, double p) {
  if (!(p > 0)) throw std::invalid_argument("norm exponent must be positive");
  const auto mag = f.values().abs();
  if (std::isinf(p)) return mag.maxCoeff();
  return std::pow(mag.pow(p).sum() * f.cell(), 1.0 / p);
}

cplx integrate_product(const SampledFunction& f, const SampledFunction& g) {
  if (!f.same_grid(g)) throw std::invalid_argument("functions live on different grids");
  return (f.values() * g.values()).sum() * f.cell();
}

cplx inner(const SampledFunction& f, const SampledFunction& g) {
  if (!f.same_grid(g)) throw std::invalid_argument("functions live on different grids");
  return (f.values() * g.values().conjugate()).sum() * f.cell();
}

void write_binary(std::ostream& os, const SampledFunction& f) {
  os.write(kFunctionMagic, 8);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.dim()));
  put<std::uint32_t>(os, 0);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(f.n()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(f.m()));
  put<double>(os, f.period_x());
  put<double>(os, f.period_y());
  for (Index a = 0; a < f.n(); ++a)
    for (Index b = 0; b < f.m(); ++b) {
      put<double>(os, f.values()(a, b).real());
      put<double>(os, f.values()(a, b).imag());
    }
}

SampledFunction read_binary(std::istream& is) {
  check_magic(is, kFunctionMagic);
  auto dim = get<std::uint32_t>(is);
  get<std::uint32_t>(is);
  auto n = static_cast<Index>(get<std::uint64_t>(is));
  auto m = static_cast<Index>(get<std::uint64_t>(is));
  double lx = get<double>(is), ly = get<double>(is);
  if (n > (Index{1} << 24) || m > (Index{1} << 24)) throw std::invalid_argument("container sizes too large");
  check_sizes(n, m);
  ArrayC v(n, m);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < m; ++b) {
      double re = get<double>(is);
      double im = get<double>(is);
      v(a, b) = cplx(re, im);
    }
  return SampledFunction(std::move(v), lx, ly, static_cast<int>(dim));
}

void write_bitgrid(std::ostream& os, const BitGrid& g) {
  os.write(kBitMagic, 8);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(g.rows()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(g.cols()));
  std::uint8_t byte = 0;
  int used = 0;
  for (Index a = 0; a < g.rows(); ++a)
    for (Index b = 0; b < g.cols(); ++b) {
      if (g(a, b)) byte = static_cast<std::uint8_t>(byte | (1u << used));
      if (++used == 8) {
        put(os, byte);
        byte = 0;
        used = 0;
      }
    }
  if (used > 0) put(os, byte);
}

BitGrid read_bitgrid(std::istream& is) {
  check_magic(is, kBitMagic);
  auto n = static_cast<Index>(get<std::uint64_t>(is));
  auto m = static_cast<Index>(get<std::uint64_t>(is));
  if (n > (Index{1} << 24) || m > (Index{1} << 24)) throw std::invalid_argument("container sizes too large");
  BitGrid g(n, m);
  std::uint8_t byte = 0;
  int used = 8;
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < m; ++b) {
      if (used == 8) {
        byte = get<std::uint8_t>(is);
        used = 0;
      }
      g(a, b) = (byte >> used++) & 1u;
    }
  return g;
}

}  // namespace bplab
