#include "bplab/operators.hpp"

#include "bplab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bplab {

namespace {

constexpr double kDropTolerance = 1e-13;

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

struct Coeff {
  Index a, b;  // storage slots
  Index ka, kb;  // signed indices
  cplx value;
};

std::vector<Coeff> nonzero(const ArrayC& c) {
  std::vector<Coeff> out;
  double peak = c.abs().maxCoeff();
  if (peak == 0) return out;
  for (Index b = 0; b < c.cols(); ++b)
    for (Index a = 0; a < c.rows(); ++a)
      if (std::abs(c(a, b)) > kDropTolerance * peak)
        out.push_back({a, b, signed_index(a, c.rows()), signed_index(b, c.cols()), c(a, b)});
  return out;
}

Index max_abs(const std::vector<Coeff>& v, bool second) {
  Index m = 0;
  for (const auto& c : v) m = std::max(m, std::abs(second ? c.kb : c.ka));
  return m;
}

void require_same(const SampledFunction& f, const SampledFunction& g, int dim) {
  if (f.dim() != dim || g.dim() != dim) throw std::invalid_argument("operator expects " + std::to_string(dim) + "D inputs");
  if (!f.same_grid(g)) throw std::invalid_argument("operator inputs live on different grids");
}

void require_band(Index deg, Index n, const char* axis) {
  if (2 * deg >= n)
    throw BandOverflow(std::string("combined band exceeds Nyquist along ") + axis + ": degree " + std::to_string(deg) +
                       " on " + std::to_string(n) + " points");
}

Index wrap_index(Index k, Index n) { return ((k % n) + n) % n; }

// Symbol table over signed index pairs in [-d, d]^2.
Eigen::ArrayXXcd symbol_table(const Symbol1D& m, Index d1, Index d2, double period) {
  Eigen::ArrayXXcd t(2 * d1 + 1, 2 * d2 + 1);
  for (Index i = -d1; i <= d1; ++i)
    for (Index k = -d2; k <= d2; ++k)
      t(i + d1, k + d2) = m(static_cast<double>(i) / period, static_cast<double>(k) / period);
  return t;
}

}  // namespace

cplx bht_symbol(double xi1, double xi2, double beta) {
  return cplx(0, std::numbers::pi) * sgn(xi1 - beta * xi2);
}

double KernelFamily::operator()(int j, double xi) const { return sgn(xi) * profile_.phi_j(j, xi); }

std::array<double, 5> KernelFamily::measured_constants(int jmin, int jmax) const {
  std::array<double, 5> c{};
  for (int j = jmin; j <= jmax; ++j) {
    const double scale = std::ldexp(1.0, j);
    const double h = scale * profile_.sharpness() / 64;
    for (int s = 0; s <= 4000; ++s) {
      // sample (0, 4 * 2^j] on a geometric grid, skipping the singular origin
      double xi = scale * std::pow(2.0, -6.0 + 8.0 * s / 4000.0);
      if (xi - 2 * h <= 0) continue;
      auto k = [&](double t) { return (*this)(j, t); };
      double d[5] = {k(xi), (k(xi + h) - k(xi - h)) / (2 * h),
                     (k(xi + h) - 2 * k(xi) + k(xi - h)) / (h * h),
                     (k(xi + 2 * h) - 2 * k(xi + h) + 2 * k(xi - h) - k(xi - 2 * h)) / (2 * h * h * h),
                     (k(xi + 2 * h) - 4 * k(xi + h) + 6 * k(xi) - 4 * k(xi - h) + k(xi - 2 * h)) / (h * h * h * h)};
      for (int a = 0; a <= 4; ++a) c[static_cast<std::size_t>(a)] =
          std::max(c[static_cast<std::size_t>(a)], std::abs(d[a]) * std::pow(xi, a));
    }
  }
  return c;
}

const char* to_string(SymbolKind k) {
  switch (k) {
    case SymbolKind::bht_sgn: return "bht_sgn";
    case SymbolKind::paraproduct: return "paraproduct";
    case SymbolKind::bp_tensor: return "bp_tensor";
    case SymbolKind::double_bht: return "double_bht";
    case SymbolKind::biparam_paraproduct: return "biparam_paraproduct";
    case SymbolKind::custom: return "custom";
  }
  return "?";
}

SymbolKind symbol_kind_from_string(const std::string& s) {
  for (auto k : {SymbolKind::bht_sgn, SymbolKind::paraproduct, SymbolKind::bp_tensor, SymbolKind::double_bht,
                 SymbolKind::biparam_paraproduct, SymbolKind::custom})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown symbol kind '" + s + "'");
}

void BilinearSymbol::validate() const {
  if (kind == SymbolKind::bp_tensor && slope.numerator() == 0)
    throw std::invalid_argument("degenerate Gamma_1: slope must be nonzero");
}

SampledFunction apply_symbol_1d(const SampledFunction& f, const SampledFunction& g, const Symbol1D& m) {
  require_same(f, g, 1);
  const Index n = f.n();
  auto cf = nonzero(fourier_coefficients(f));
  auto cg = nonzero(fourier_coefficients(g));
  ArrayC out = ArrayC::Zero(n, 1);
  if (cf.empty() || cg.empty()) return SampledFunction(out, f.period_x(), 1.0, 1);
  const Index df = max_abs(cf, false), dg = max_abs(cg, false);
  require_band(df + dg, n, "x");
  Eigen::ArrayXXcd table = symbol_table(m, df, dg, f.period_x());
  for (const auto& p : cf)
    for (const auto& q : cg) out(wrap_index(p.ka + q.ka, n), 0) += table(p.ka + df, q.ka + dg) * p.value * q.value;
  return from_coefficients(out, f);
}

SampledFunction apply_product_symbol_2d(const SampledFunction& f, const SampledFunction& g, const Symbol1D& mx,
                                        const Symbol1D& my) {
  require_same(f, g, 2);
  const Index n = f.n(), m = f.m();
  auto cf = nonzero(fourier_coefficients(f));
  auto cg = nonzero(fourier_coefficients(g));
  ArrayC out = ArrayC::Zero(n, m);
  if (cf.empty() || cg.empty()) return SampledFunction(out, f.period_x(), f.period_y(), 2);
  const Index dfx = max_abs(cf, false), dgx = max_abs(cg, false);
  const Index dfy = max_abs(cf, true), dgy = max_abs(cg, true);
  require_band(dfx + dgx, n, "x");
  require_band(dfy + dgy, m, "y");
  Eigen::ArrayXXcd tx = symbol_table(mx, dfx, dgx, f.period_x());
  Eigen::ArrayXXcd ty = symbol_table(my, dfy, dgy, f.period_y());
  for (const auto& p : cf)
    for (const auto& q : cg) {
      cplx s = tx(p.ka + dfx, q.ka + dgx) * ty(p.kb + dfy, q.kb + dgy);
      if (s == cplx(0)) continue;
      out(wrap_index(p.ka + q.ka, n), wrap_index(p.kb + q.kb, m)) += s * p.value * q.value;
    }
  return from_coefficients(out, f);
}

SampledFunction apply_bht(const SampledFunction& f, const SampledFunction& g, const BhtKernel& kernel) {
  if (!kernel.scale) return apply_symbol_1d(f, g, [](double a, double b) { return bht_symbol(a, b); });
  const int j = *kernel.scale;
  const KernelFamily& fam = kernel.family;
  return apply_symbol_1d(f, g, [&](double a, double b) { return cplx(fam(j, a - b)); });
}

double paraproduct_symbol(const LPFamily& family, int jmin, int jmax, double xi1, double xi2) {
  double s = 0;
  for (int j = jmin; j <= jmax; ++j) s += family.phi_j(j - 3, xi1) * family.psi_j(j, xi2);
  return s;
}

SampledFunction apply_paraproduct(const SampledFunction& f, const SampledFunction& g, const LPFamily& family,
                                  std::optional<int> min_scale) {
  require_same(f, g, 1);
  auto [jmin, jmax] = lp_scale_range(f.n(), f.period_x());
  if (min_scale) jmin = std::max(jmin, *min_scale);
  auto df = effective_degree(fourier_coefficients(f), kDropTolerance)[0];
  auto dg = effective_degree(fourier_coefficients(g), kDropTolerance)[0];
  require_band(df + dg, f.n(), "x");
  ArrayC acc = ArrayC::Zero(f.n(), 1);
  for (int j = jmin; j <= jmax; ++j) {
    SampledFunction lo = lp_multiply(f, j - 3, LPMode::low, 1, family);
    SampledFunction hi = lp_multiply(g, j, LPMode::band, 1, family);
    acc += lo.values() * hi.values();
  }
  SampledFunction out(acc, f.period_x(), 1.0, 1);
  return out;
}

SampledFunction apply_tensor(const SampledFunction& f, const SampledFunction& g, const BilinearSymbol& m) {
  m.validate();
  require_same(f, g, 2);
  const auto [yjmin, yjmax] = lp_scale_range(f.m(), f.period_y());
  const auto [xjmin, xjmax] = lp_scale_range(f.n(), f.period_x());
  const LPFamily& fam = m.family;
  auto para_y = [&](double a, double b) { return cplx(paraproduct_symbol(fam, yjmin, yjmax, a, b)); };
  auto para_x = [&](double a, double b) { return cplx(paraproduct_symbol(fam, xjmin, xjmax, a, b)); };
  switch (m.kind) {
    case SymbolKind::bp_tensor: {
      const double beta = to_double(m.slope);
      return apply_product_symbol_2d(f, g, [beta](double a, double b) { return bht_symbol(a, b, beta); }, para_y);
    }
    case SymbolKind::double_bht: {
      auto s = [](double a, double b) { return bht_symbol(a, b); };
      return apply_product_symbol_2d(f, g, s, s);
    }
    case SymbolKind::biparam_paraproduct:
      return apply_product_symbol_2d(f, g, para_x, para_y);
    default:
      throw std::invalid_argument(std::string("apply_tensor does not evaluate symbol kind ") + to_string(m.kind));
  }
}

namespace {

// For each y sample, the x-direction bilinear multiplier of the rows of F and G.
ArrayC rowwise_bilinear(const SampledFunction& F, const SampledFunction& G, const Symbol1D& mx, Index df, Index dg) {
  const Index n = F.n(), m = F.m();
  ArrayC fx = x_coefficients(F), gx = x_coefficients(G);
  Eigen::ArrayXXcd table = symbol_table(mx, df, dg, F.period_x());
  ArrayC out = ArrayC::Zero(n, m);
  for (Index b = 0; b < m; ++b) {
    for (Index i = -df; i <= df; ++i) {
      cplx fv = fx(wrap_index(i, n), b);
      if (fv == cplx(0)) continue;
      for (Index k = -dg; k <= dg; ++k) {
        cplx gv = gx(wrap_index(k, n), b);
        out(wrap_index(i + k, n), b) += table(i + df, k + dg) * fv * gv;
      }
    }
  }
  return out;
}

SampledFunction bp_piece(const SampledFunction& f, const SampledFunction& g, int j, const LPFamily& family,
                         const Symbol1D& mx, Index df, Index dg) {
  SampledFunction lo = lp_multiply(f, j - 3, LPMode::low, 2, family);
  SampledFunction hi = lp_multiply(g, j, LPMode::band, 2, family);
  return from_x_coefficients(rowwise_bilinear(lo, hi, mx, df, dg), f);
}

struct BpSetup {
  Index df, dg;
  Symbol1D mx;
};

BpSetup bp_setup(const SampledFunction& f, const SampledFunction& g, const Rational& beta) {
  require_same(f, g, 2);
  if (beta.numerator() == 0) throw std::invalid_argument("degenerate Gamma_1: slope must be nonzero");
  auto df = effective_degree(fourier_coefficients(f), kDropTolerance);
  auto dg = effective_degree(fourier_coefficients(g), kDropTolerance);
  require_band(df[0] + dg[0], f.n(), "x");
  require_band(df[1] + dg[1], f.m(), "y");
  const double b = to_double(beta);
  return {df[0], dg[0], [b](double u, double v) { return bht_symbol(u, v, b); }};
}

}  // namespace

SampledFunction apply_bp_single_scale(const SampledFunction& f, const SampledFunction& g, int j,
                                      const LPFamily& family, const Rational& beta) {
  if (f.dim() == 2 && std::ldexp(1.0, j + 2) > f.nyquist_y())
    throw ScaleOverflow("BP_j scale " + std::to_string(j) + " needs 2^(j+2) <= Nyquist in y");
  BpSetup s = bp_setup(f, g, beta);
  return bp_piece(f, g, j, family, s.mx, s.df, s.dg);
}

SampledFunction apply_bp(const SampledFunction& f, const SampledFunction& g, const LPFamily& family,
                         const Rational& beta) {
  BpSetup s = bp_setup(f, g, beta);
  auto [jmin, jmax] = lp_scale_range(f.m(), f.period_y());
  ArrayC acc = ArrayC::Zero(f.n(), f.m());
  for (int j = jmin; j <= jmax; ++j) acc += bp_piece(f, g, j, family, s.mx, s.df, s.dg).values();
  return SampledFunction(acc, f.period_x(), f.period_y(), 2);
}

PacketBank::PacketBank(const TileCollection& s, AxisGrid gx, AxisGrid gy, double decay_order)
    : gx_(gx), gy_(gy), decay_(decay_order) {
  std::map<Tile, std::size_t> xmap, ymap;
  auto slot = [](std::map<Tile, std::size_t>& map, std::vector<WavePacket>& store, const Tile& t,
                 const AxisGrid& grid, double order) {
    auto it = map.find(t);
    if (it != map.end()) return it->second;
    store.push_back(make_wave_packet(t, grid, order));
    map.emplace(t, store.size() - 1);
    return store.size() - 1;
  };
  for (const auto& t : s.tiles) {
    std::array<std::pair<std::size_t, std::size_t>, 3> idx;
    for (int i = 0; i < 3; ++i)
      idx[static_cast<std::size_t>(i)] = {slot(xmap, xs_, t.x[i], gx_, decay_), slot(ymap, ys_, t.y[i], gy_, decay_)};
    index_.push_back(idx);
  }
}

PacketBank::Ref PacketBank::packet(std::size_t tile, int component) const {
  const auto& [a, b] = index_.at(tile).at(static_cast<std::size_t>(component - 1));
  return {xs_[a], ys_[b]};
}

double PacketBank::max_decay_constant() const {
  double c = 0;
  for (const auto& p : xs_) c = std::max(c, p.decay_constant);
  for (const auto& p : ys_) c = std::max(c, p.decay_constant);
  return c;
}

void check_coefficients(const std::vector<cplx>& eps, std::size_t count) {
  if (eps.size() != count) throw std::invalid_argument("coefficient count does not match the collection");
  for (std::size_t k = 0; k < eps.size(); ++k)
    if (std::abs(eps[k]) > 1 + 1e-12)
      throw std::invalid_argument("coefficient " + std::to_string(k) + " has modulus above 1");
}

std::vector<std::size_t> filter_tiles(const TileCollection& s, const ModelFilter& filter) {
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < s.tiles.size(); ++k) {
    const auto& y = s.tiles[k].y;
    int index = overlapping_index(y).value_or(1);
    int scale = -y.spatial().scale();
    bool take = true;
    if (filter.kind == ModelFilter::Kind::component) take = index == filter.value;
    if (filter.kind == ModelFilter::Kind::scale) take = index == 1 && scale == filter.value;
    if (take) keep.push_back(k);
  }
  return keep;
}

SampledFunction apply_model_sum(const TileCollection& s, const std::vector<cplx>& eps, const SampledFunction& f,
                                const SampledFunction& g, const PacketBank& bank, const ModelFilter& filter) {
  check_coefficients(eps, s.tiles.size());
  require_same(f, g, 2);
  if (bank.size() != s.tiles.size()) throw std::invalid_argument("packet bank built for another collection");
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(f.n(), f.m());
  for (std::size_t k : filter_tiles(s, filter)) {
    auto p1 = bank.packet(k, 1), p2 = bank.packet(k, 2), p3 = bank.packet(k, 3);
    cplx a = eps[k] / std::sqrt(to_double(s.tiles[k].area())) * packet_coefficient(f, p1.x, p1.y) *
             packet_coefficient(g, p2.x, p2.y);
    acc.noalias() += a * (p3.x.values.matrix() * p3.y.values.matrix().transpose());
  }
  return SampledFunction(acc.array(), f.period_x(), f.period_y(), 2);
}

cplx trilinear_form(const TileCollection& s, const std::vector<cplx>& eps, const SampledFunction& f1,
                    const SampledFunction& f2, const SampledFunction& f3, const PacketBank& bank,
                    std::array<bool, 3> dual) {
  check_coefficients(eps, s.tiles.size());
  require_same(f1, f2, 2);
  require_same(f1, f3, 2);
  const SampledFunction* fs[3] = {&f1, &f2, &f3};
  cplx total = 0;
  for (std::size_t k = 0; k < s.tiles.size(); ++k) {
    cplx term = eps[k] / std::sqrt(to_double(s.tiles[k].area()));
    for (int i = 0; i < 3; ++i) {
      auto p = bank.packet(k, i + 1);
      term *= packet_coefficient(*fs[i], p.x, p.y, !dual[static_cast<std::size_t>(i)]);
    }
    total += term;
  }
  return total;
}

}  // namespace bplab
