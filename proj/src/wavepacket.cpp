#include "bplab/wavepacket.hpp"

#include "bplab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace bplab {

double smooth_step(double t) {
  if (t <= 0) return 0;
  if (t >= 1) return 1;
  double a = std::exp(-1 / t);
  double b = std::exp(-1 / (1 - t));
  return a / (a + b);
}

LPFamily::LPFamily(double sharpness) : delta_(sharpness) {
  if (!(sharpness > 0) || sharpness > 1.0 / 20)
    throw std::invalid_argument("LP sharpness must lie in (0, 1/20], got " + std::to_string(sharpness));
}

double LPFamily::phi(double xi) const { return 1 - smooth_step((std::abs(xi) - 1) / delta_); }

SampledFunction lp_multiply(const SampledFunction& f, int j, LPMode mode, int axis, const LPFamily& family) {
  if (axis != 1 && axis != 2) throw std::invalid_argument("axis must be 1 or 2");
  if (axis == 2 && f.dim() != 2) throw std::invalid_argument("axis 2 requires a 2D function");
  SampledFunction out = mode == LPMode::low
                            ? apply_multiplier(f, axis, [&](double xi) { return family.phi_j(j, xi); })
                            : apply_multiplier(f, axis, [&](double xi) { return family.psi_j(j, xi); });
  std::array<Band, 2> band{Band{0, f.nyquist_x()}, Band{0, f.nyquist_y()}};
  if (f.band) band = *f.band;
  const double top = std::ldexp(1 + family.sharpness(), mode == LPMode::low ? j : j + 1);
  Band& b = band[static_cast<std::size_t>(axis - 1)];
  b.hi = std::min(b.hi, top);
  if (mode == LPMode::band) b.lo = std::max(b.lo, std::ldexp(1.0, j));
  out.band = band;
  return out;
}

SampledFunction lp_project(const SampledFunction& f, int j, LPMode mode, int axis, const LPFamily& family) {
  if (axis == 2 && f.dim() != 2) throw std::invalid_argument("axis 2 requires a 2D function");
  const double nyq = axis == 1 ? f.nyquist_x() : f.nyquist_y();
  if (std::ldexp(1.0, j + 2) > nyq)
    throw ScaleOverflow("LP scale " + std::to_string(j) + " needs 2^(j+2) <= Nyquist " + std::to_string(nyq));
  return lp_multiply(f, j, mode, axis, family);
}

std::pair<int, int> lp_scale_range(Index n, double period) {
  // psi_j lives on [2^j, 2^{j+1}(1 + 1/20)]; grid frequencies run from 1/L to n/(2L).
  const double lo = 1 / period, hi = static_cast<double>(n) / (2 * period);
  int jmin = static_cast<int>(std::floor(std::log2(lo / 2.1))) - 1;
  int jmax = static_cast<int>(std::ceil(std::log2(hi))) + 1;
  while (std::ldexp(2.1, jmin) < lo) ++jmin;
  while (std::ldexp(1.0, jmax) >= hi) --jmax;
  return {jmin, jmax};
}

namespace {

double bump(double t) { return std::abs(t) < 1 ? std::exp(-1 / (1 - t * t)) : 0.0; }

double periodic_distance(double x, double c, double period) {
  double d = std::fmod(std::abs(x - c), period);
  return std::min(d, period - d);
}

}  // namespace

WavePacket make_wave_packet(const Tile& tile, const AxisGrid& grid, double decay_order) {
  const double period = grid.period;
  const double lo = to_double(tile.frequency().lower()), hi = to_double(tile.frequency().upper());
  const double center = (lo + hi) / 2, half = 0.45 * (hi - lo);
  const double nyq = static_cast<double>(grid.n) / (2 * period);
  if (center + half >= nyq || center - half <= -nyq)
    throw std::invalid_argument("tile frequency interval too close to Nyquist");
  const double x0 = to_double(tile.spatial().lower()), x1 = to_double(tile.spatial().upper());
  if (x0 < 0 || x1 > period) throw std::invalid_argument("tile spatial interval leaves the period");
  const double xc = (x0 + x1) / 2;

  SampledFunction f(grid.n, period);
  ArrayC c = ArrayC::Zero(grid.n, 1);
  bool any = false;
  for (Index k = 0; k < grid.n; ++k) {
    double xi = static_cast<double>(signed_index(k, grid.n)) / period;
    double w = bump((xi - center) / half);
    if (w == 0) continue;
    any = true;
    c(k, 0) = w * std::exp(cplx(0, -2 * std::numbers::pi * xi * xc));
  }
  if (!any) throw std::invalid_argument("tile frequency band contains no grid frequency");
  c /= std::sqrt(period * c.abs2().sum());
  f = from_coefficients(c, f);

  const double len = x1 - x0;
  double constant = 0;
  for (Index a = 0; a < grid.n; ++a) {
    double x = static_cast<double>(a) * period / static_cast<double>(grid.n);
    double d = periodic_distance(x, xc, period);
    double envelope = chi_cutoff(0.0, len, decay_order, d) / std::sqrt(len);
    constant = std::max(constant, std::abs(f.values()(a, 0)) / envelope);
  }
  return WavePacket{tile, f.values(), decay_order, constant};
}

ProductPacket make_product_packet(const Tile& bx, const Tile& py, const AxisGrid& gx, const AxisGrid& gy,
                                  double decay_order) {
  return ProductPacket{make_wave_packet(bx, gx, decay_order), make_wave_packet(py, gy, decay_order)};
}

cplx packet_coefficient(const SampledFunction& f, const WavePacket& px, const WavePacket& py, bool conjugate_packet) {
  if (f.dim() != 2 || f.n() != px.values.rows() || f.m() != py.values.rows())
    throw std::invalid_argument("packet and function grids differ");
  Eigen::VectorXcd vx = px.values.matrix(), vy = py.values.matrix();
  if (conjugate_packet) {
    vx = vx.conjugate();
    vy = vy.conjugate();
  }
  cplx s = (vx.transpose() * f.values().matrix() * vy)(0, 0);
  return s * f.cell();
}

namespace {

// Prefix sums with a zero first row and column.
Eigen::ArrayXXd prefix_sums(const Eigen::ArrayXXd& g) {
  Eigen::ArrayXXd p = Eigen::ArrayXXd::Zero(g.rows() + 1, g.cols() + 1);
  for (Index a = 0; a < g.rows(); ++a)
    for (Index b = 0; b < g.cols(); ++b) p(a + 1, b + 1) = g(a, b) + p(a, b + 1) + p(a + 1, b) - p(a, b);
  return p;
}

double rect(const Eigen::ArrayXXd& p, Index a0, Index a1, Index b0, Index b1) {
  return p(a1, b1) - p(a0, b1) - p(a1, b0) + p(a0, b0);
}

// Split the periodic range [s, s+len) of an n-cycle into at most two plain ranges.
std::vector<std::pair<Index, Index>> wrap(Index s, Index len, Index n) {
  if (len >= n) return {{0, n}};
  s = ((s % n) + n) % n;
  if (s + len <= n) return {{s, s + len}};
  return {{s, n}, {0, s + len - n}};
}

double periodic_rect(const Eigen::ArrayXXd& p, Index a, Index alen, Index b, Index blen) {
  const Index n = p.rows() - 1, m = p.cols() - 1;
  double s = 0;
  for (auto [a0, a1] : wrap(a, alen, n))
    for (auto [b0, b1] : wrap(b, blen, m)) s += rect(p, a0, a1, b0, b1);
  return s;
}

int log2_size(Index n) {
  int l = 0;
  while ((Index{1} << l) < n) ++l;
  return l;
}

}  // namespace

MaximalResult maximal(const SampledFunction& f, MaximalVariant variant, double r) {
  if (!(r >= 1)) throw std::invalid_argument("maximal: exponent r must be >= 1");
  if (variant == MaximalVariant::strong && f.dim() != 2) throw std::invalid_argument("strong maximal needs 2D input");
  if (variant == MaximalVariant::hl && f.dim() != 1) throw std::invalid_argument("hl maximal needs 1D input");
  const Index n = f.n(), m = f.m();
  Eigen::ArrayXXd g = f.values().abs().pow(r);
  Eigen::ArrayXXd p = prefix_sums(g);
  Eigen::ArrayXXd dyadic = Eigen::ArrayXXd::Zero(n, m), upper = Eigen::ArrayXXd::Zero(n, m);
  const int lx = log2_size(n), ly = variant == MaximalVariant::strong ? log2_size(m) : 0;
  // Any interval J containing x with 2^{l-1} < |J| <= 2^l sits in the tripled
  // block around x, so avg_J <= 6 avg_{3I}; rectangles pick up 6 per axis.
  const double factor = variant == MaximalVariant::strong ? 36.0 : 6.0;
  for (int ex = 0; ex <= lx; ++ex) {
    const Index bx = Index{1} << ex;
    for (int ey = 0; ey <= ly; ++ey) {
      const Index by = Index{1} << ey;
      for (Index a = 0; a < n; ++a) {
        const Index a0 = (a / bx) * bx;
        for (Index b = 0; b < m; ++b) {
          const Index b0 = (b / by) * by;
          double avg = rect(p, a0, a0 + bx, b0, b0 + by) / static_cast<double>(bx * by);
          dyadic(a, b) = std::max(dyadic(a, b), avg);
          const Index tx = std::min(3 * bx, n), ty = std::min(3 * by, m);
          double big = periodic_rect(p, a0 - bx, tx, b0 - by, ty) / static_cast<double>(tx * ty);
          upper(a, b) = std::max(upper(a, b), factor * big);
        }
      }
    }
  }
  auto root = [r](const Eigen::ArrayXXd& v) -> ArrayC { return v.pow(1 / r).cast<cplx>(); };
  MaximalResult out{SampledFunction(root(dyadic), f.period_x(), f.period_y(), f.dim()),
                    SampledFunction(root(upper), f.period_x(), f.period_y(), f.dim())};
  return out;
}

}  // namespace bplab
