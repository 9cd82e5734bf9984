#include "bplab/normprobe.hpp"

#include "bplab/errors.hpp"
#include "bplab/operators.hpp"
#include "bplab/parallel.hpp"
#include "bplab/regions.hpp"
#include "bplab/wavepacket.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace bplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

double power_sum(double acc, double v, double p) { return std::isinf(p) ? std::max(acc, v) : acc + std::pow(v, p); }
double finish(double acc, double p, double weight) { return std::isinf(p) ? acc : std::pow(acc * weight, 1 / p); }

void check_exponent(double p) {
  if (!(p > 0)) throw std::invalid_argument("norm exponents must be positive");
}

// Uniform in [-1, 1] from the top 53 bits, independent of the standard
// library's distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2 - 1; }

Index slot(Index k, Index n) { return ((k % n) + n) % n; }

// Periodized Gaussian exp(-(x - c)^2 / 2w^2): exact Fourier coefficients, kept
// down to 1e-17 of the peak.
std::vector<std::pair<Index, cplx>> gaussian_coefficients(double center, double width, double period) {
  const double w = width * period, c = center * period;
  const auto K = static_cast<Index>(std::floor(period * std::sqrt(std::log(1e17) / (2 * kPi * kPi)) / w));
  std::vector<std::pair<Index, cplx>> out;
  for (Index k = -K; k <= K; ++k) {
    const double kk = static_cast<double>(k);
    const double mag = w * std::sqrt(2 * kPi) / period * std::exp(-2 * kPi * kPi * w * w * kk * kk / (period * period));
    out.push_back({k, mag * std::exp(cplx(0, -2 * kPi * kk * c / period))});
  }
  return out;
}

ArrayC place(const std::vector<std::pair<Index, cplx>>& coeffs, Index n, const std::string& kind) {
  ArrayC c = ArrayC::Zero(n, 1);
  for (const auto& [k, v] : coeffs) {
    if (2 * std::abs(k) >= n)
      throw std::invalid_argument(kind + " test function needs frequency " + std::to_string(std::abs(k)) +
                                  " beyond the Nyquist index of " + std::to_string(n) + " points");
    c(slot(k, n), 0) += v;
  }
  return c;
}

double level_factor(const TestFamily& f, int level) { return f.level_scaled ? std::ldexp(1.0, level) : 1.0; }

// Coefficients of the 1D kinds in FFT order on n points.
ArrayC coefficients_1d(const TestFamily& f, Index n, double period, int level) {
  const double scale = level_factor(f, level);
  if (f.kind == "zero") return ArrayC::Zero(n, 1);
  if (f.kind == "gaussian") return place(gaussian_coefficients(f.center, f.width, period), n, f.kind);
  if (f.kind == "modulated") {
    const double w = f.frequency * scale;
    if (w != std::round(w)) throw std::invalid_argument("modulation frequency must be an integer");
    auto g = gaussian_coefficients(f.center, f.width, period);
    for (auto& [k, v] : g) k += static_cast<Index>(w);
    return place(g, n, f.kind);
  }
  if (f.kind == "trig") {
    const auto d = static_cast<Index>(std::llround(f.degree * scale));
    std::mt19937_64 rng(f.seed);
    std::vector<std::pair<Index, cplx>> g;
    for (Index k = -d; k <= d; ++k) {
      double re = unit(rng), im = unit(rng);
      g.push_back({k, cplx(re, im)});
    }
    return place(g, n, f.kind);
  }
  if (f.kind == "indicator") {
    // Indicator of [lo, hi) (fractions of the period) smoothed by the Gaussian of width `width`.
    const double a = f.lo * period, b = f.hi * period;
    auto g = gaussian_coefficients(0, f.width, period);
    for (auto& [k, v] : g) {
      const double kk = static_cast<double>(k);
      cplx box = k == 0 ? cplx((b - a) / period)
                        : (std::exp(cplx(0, -2 * kPi * kk * b / period)) - std::exp(cplx(0, -2 * kPi * kk * a / period))) /
                              cplx(0, -2 * kPi * kk);
      v = box * std::abs(v) * period / (f.width * period * std::sqrt(2 * kPi));
    }
    return place(g, n, f.kind);
  }
  if (f.kind == "chirp") {
    // Gaussian window times exp(i pi rate (x - c)^2), transformed on a fixed
    // reference grid so every level sees the same coefficients.
    const double rate = f.rate * scale, w = f.width * period, c = f.center * period;
    const Index ref = std::max<Index>(8192, 8 * n);
    SampledFunction s(ref, period);
    for (Index a = 0; a < ref; ++a) {
      const double x = static_cast<double>(a) * period / static_cast<double>(ref);
      cplx v = 0;
      for (int m = -4; m <= 4; ++m) {
        const double u = x - c + m * period;
        v += std::exp(-u * u / (2 * w * w)) * std::exp(cplx(0, kPi * rate * u * u));
      }
      s.values()(a, 0) = v;
    }
    ArrayC cr = fourier_coefficients(s);
    const double peak = cr.abs().maxCoeff();
    std::vector<std::pair<Index, cplx>> g;
    for (Index a = 0; a < ref; ++a)
      if (std::abs(cr(a, 0)) > 1e-15 * peak) g.push_back({signed_index(a, ref), cr(a, 0)});
    return place(g, n, f.kind);
  }
  throw std::invalid_argument("unknown 1D test family '" + f.kind + "'");
}

ArrayC cross_chirp(const TestFamily& f, const GridSpec& grid, int level) {
  const double rate = f.rate * level_factor(f, level);
  const Index n = grid.nx, m = grid.ny;
  const double wx = f.width * grid.period_x, wy = f.width * grid.period_y;
  const double cx = f.center * grid.period_x, cy = f.center * grid.period_y;
  SampledFunction s(n, m, grid.period_x, grid.period_y);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < m; ++b) {
      const double x = static_cast<double>(a) * s.dx(), y = static_cast<double>(b) * s.dy();
      cplx v = 0;
      for (int i = -2; i <= 2; ++i)
        for (int k = -2; k <= 2; ++k) {
          const double u = x - cx + i * grid.period_x, t = y - cy + k * grid.period_y;
          v += std::exp(-u * u / (2 * wx * wx) - t * t / (2 * wy * wy)) * std::exp(cplx(0, 2 * kPi * rate * u * t));
        }
      s.values()(a, b) = v;
    }
  // Band limit to a quarter of the grid per axis so that products stay unaliased.
  ArrayC c = fourier_coefficients(s);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < m; ++b)
      if (4 * std::abs(signed_index(a, n)) >= n || 4 * std::abs(signed_index(b, m)) >= m) c(a, b) = 0;
  return c;
}

double approx_ratio(const std::vector<double>& ratios, std::size_t k) { return ratios[k]; }

struct Pair {
  std::vector<SampledFunction> f, g;
};

// Multiplies every Fourier coefficient by 1 + a z with z uniform in the unit
// square: the support, hence band and pinning, is unchanged.
SampledFunction perturb(const SampledFunction& h, std::mt19937_64& rng, double amplitude) {
  ArrayC c = fourier_coefficients(h);
  for (Index a = 0; a < c.rows(); ++a)
    for (Index b = 0; b < c.cols(); ++b) {
      double re = unit(rng), im = unit(rng);
      c(a, b) *= 1.0 + amplitude * cplx(re, im);
    }
  SampledFunction out = from_coefficients(c, h);
  out.band = h.band;
  return out;
}

GridSpec level_grid(const GridSpec& base, int level) {
  GridSpec g = base;
  g.nx = base.nx << level;
  if (base.dim == 2) g.ny = base.ny << level;
  return g;
}

std::uint64_t level_seed(std::uint64_t seed, int level) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(level)};
  std::array<std::uint64_t, 1> out{};
  seq.generate(reinterpret_cast<std::uint32_t*>(out.data()), reinterpret_cast<std::uint32_t*>(out.data()) + 2);
  return out[0];
}

template <class Eval>
LevelRecord search_level(const std::vector<Candidate>& cands, int level, Index n, int steps, double amplitude,
                         std::uint64_t seed, const std::function<Pair(const Candidate&)>& make, const Eval& eval) {
  std::vector<double> ratio(cands.size(), std::numeric_limits<double>::quiet_NaN());
  parallel_for(cands.size(), [&](std::size_t k) { ratio[k] = eval(make(cands[k])); });
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < cands.size(); ++k)
    if (!std::isnan(ratio[k]) && (!best || ratio[k] > ratio[*best])) best = k;
  LevelRecord rec{level, n, std::numeric_limits<double>::quiet_NaN(), "", 0};
  if (!best) return rec;
  rec.ratio = ratio[*best];
  rec.candidate = cands[*best].name;
  Pair cur = make(cands[*best]);
  std::mt19937_64 rng(level_seed(seed, level));
  for (int s = 0; s < steps; ++s) {
    Pair trial = cur;
    for (auto& h : trial.f) h = perturb(h, rng, amplitude);
    for (auto& h : trial.g) h = perturb(h, rng, amplitude);
    const double r = eval(trial);
    if (!std::isnan(r) && r > rec.ratio) {
      rec.ratio = r;
      cur = std::move(trial);
      ++rec.improved_steps;
    }
  }
  return rec;
}

Rational to_rational(double v) {
  // Continued fraction with denominators below 10^6; exponents are expected
  // to be simple fractions.
  if (!std::isfinite(v)) throw std::invalid_argument("exponent must be finite");
  const double sign = v < 0 ? -1 : 1;
  double x = std::abs(v);
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  for (int it = 0; it < 40; ++it) {
    const double a = std::floor(x);
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > 1000000) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - std::abs(v)) < 1e-13) break;
    if (x - a < 1e-15) break;
    x = 1 / (x - a);
  }
  if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - std::abs(v)) > 1e-12)
    throw std::invalid_argument("exponent is not a simple fraction");
  return Rational(static_cast<std::int64_t>(sign) * h1, k1);
}

}  // namespace

double mixed_norm(const std::vector<SampledFunction>& family, const MixedNormSpec& spec) {
  if (spec.p.size() < 2) throw std::invalid_argument("mixed norm needs an index exponent and a spatial exponent");
  for (double p : spec.p) check_exponent(p);
  if (family.empty()) {
    if (std::all_of(spec.p.begin(), spec.p.end(), [](double p) { return std::isinf(p); }))
      throw std::invalid_argument("mixed norm of an empty family with only infinite exponents");
    return 0;
  }
  const auto& first = family.front();
  for (const auto& f : family)
    if (!f.same_grid(first)) throw std::invalid_argument("family members live on different grids");
  const std::size_t axes = spec.p.size() - 1;
  if (axes != 1 && axes != static_cast<std::size_t>(first.dim()))
    throw std::invalid_argument("mixed norm needs one joint or one per-axis spatial exponent");
  const double p0 = spec.p[0];
  Eigen::ArrayXXd g = Eigen::ArrayXXd::Zero(first.n(), first.m());
  for (const auto& f : family) {
    auto mag = f.values().abs();
    g = std::isinf(p0) ? g.max(mag).eval() : (g + mag.pow(p0)).eval();
  }
  if (!std::isinf(p0)) g = g.pow(1 / p0);
  if (axes == 1) {
    const double p = spec.p[1];
    double acc = 0;
    for (Index a = 0; a < g.rows(); ++a)
      for (Index b = 0; b < g.cols(); ++b) acc = power_sum(acc, g(a, b), p);
    return finish(acc, p, first.cell());
  }
  const double py = spec.p[1], px = spec.p[2];
  double acc = 0;
  for (Index a = 0; a < g.rows(); ++a) {
    double row = 0;
    for (Index b = 0; b < g.cols(); ++b) row = power_sum(row, g(a, b), py);
    acc = power_sum(acc, finish(row, py, first.dy()), px);
  }
  return finish(acc, px, first.dx());
}

SampledFunction pin_to_band(const SampledFunction& g, int j) {
  const LPFamily fam;
  const bool y = g.dim() == 2;
  const double nyq = y ? g.nyquist_y() : g.nyquist_x();
  if (std::ldexp(1.0, j + 1) > nyq) throw ScaleOverflow("band " + std::to_string(j) + " does not fit below Nyquist");
  bool any = false;
  SampledFunction out = apply_multiplier(g, y ? 2 : 1, [&](double xi) {
    const bool keep = fam.psi_j(j, xi) == 1.0;
    any = any || keep;
    return keep ? 1.0 : 0.0;
  });
  if (!any) throw std::invalid_argument("band " + std::to_string(j) + " contains no grid frequency");
  return out;
}

SampledFunction generate_test_function(const TestFamily& f, const GridSpec& grid, int level) {
  if (grid.dim != 1 && grid.dim != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
  SampledFunction out;
  if (grid.dim == 1) {
    SampledFunction like(grid.nx, grid.period_x);
    out = from_coefficients(coefficients_1d(f, grid.nx, grid.period_x, level), like);
  } else {
    SampledFunction like(grid.nx, grid.ny, grid.period_x, grid.period_y);
    if (f.kind == "tensor") {
      if (f.factors.size() != 2) throw std::invalid_argument("tensor family needs two factors");
      ArrayC cx = coefficients_1d(f.factors[0], grid.nx, grid.period_x, level);
      ArrayC cy = coefficients_1d(f.factors[1], grid.ny, grid.period_y, level);
      out = from_coefficients((cx.matrix() * cy.matrix().transpose()).array(), like);
    } else if (f.kind == "cross_chirp") {
      out = from_coefficients(cross_chirp(f, grid, level), like);
    } else if (f.kind == "trig") {
      const auto d = static_cast<Index>(std::llround(f.degree * level_factor(f, level)));
      if (2 * d >= grid.nx || 2 * d >= grid.ny) throw std::invalid_argument("trig degree beyond Nyquist");
      std::mt19937_64 rng(f.seed);
      ArrayC c = ArrayC::Zero(grid.nx, grid.ny);
      for (Index a = -d; a <= d; ++a)
        for (Index b = -d; b <= d; ++b) {
          double re = unit(rng), im = unit(rng);
          c(slot(a, grid.nx), slot(b, grid.ny)) = cplx(re, im);
        }
      out = from_coefficients(c, like);
    } else if (f.kind == "zero") {
      out = like;
    } else {
      // A one-dimensional kind on a plane grid is its tensor square.
      TestFamily t;
      t.kind = "tensor";
      t.factors = {f, f};
      t.factors[0].pin_band.reset();
      t.factors[1].pin_band.reset();
      out = generate_test_function(t, grid, level);
    }
  }
  if (f.pin_band) out = pin_to_band(out, *f.pin_band);
  return out;
}

void check_holder(const Exponents& e) {
  check_exponent(e.p);
  check_exponent(e.q);
  check_exponent(e.r);
  if (std::abs(1 / e.p + 1 / e.q - 1 / e.r) > 1e-12)
    throw std::invalid_argument("exponents are off the Hoelder line 1/p + 1/q = 1/r");
}

int operator_dim(const OperatorSpec& op) { return op.id == "bht" || op.id == "paraproduct" ? 1 : 2; }

SampledFunction apply_operator(const OperatorSpec& op, const SampledFunction& f, const SampledFunction& g) {
  if (op.id == "bht") return apply_bht(f, g);
  if (op.id == "paraproduct") return apply_paraproduct(f, g);
  if (op.id == "bp") return apply_bp(f, g);
  if (op.id == "bp-single") return apply_bp_single_scale(f, g, op.scale);
  BilinearSymbol m;
  if (op.id == "double-bht") m.kind = SymbolKind::double_bht;
  else if (op.id == "bp-tensor") m.kind = SymbolKind::bp_tensor;
  else if (op.id == "biparam-paraproduct") m.kind = SymbolKind::biparam_paraproduct;
  else throw std::invalid_argument("unknown operator '" + op.id + "'");
  return apply_tensor(f, g, m);
}

GridSpec default_base(const std::string& op) {
  if (op == "double-bht") return {2, 16, 16, 1, 1};
  return operator_dim({op, 0}) == 1 ? GridSpec{1, 128, 1, 1, 1} : GridSpec{2, 16, 16, 1, 1};
}

std::vector<Candidate> default_candidates(const std::string& op) {
  auto kind = [](std::string k) {
    TestFamily f;
    f.kind = std::move(k);
    return f;
  };
  if (op == "double-bht") {
    // Windowed e^{2 pi i c (x - x0)(y - y0)} with c doubling per level.
    TestFamily x = kind("cross_chirp");
    x.rate = 4;
    x.level_scaled = true;
    TestFamily y = x;
    y.rate = -4;
    return {{"cross-chirp", x, x}, {"cross-chirp-conj", x, y}};
  }
  if (operator_dim({op, 0}) == 1) {
    TestFamily m = kind("modulated");
    m.frequency = 6;
    TestFamily t1 = kind("trig"), t2 = kind("trig");
    t1.degree = t2.degree = 6;
    t2.seed = 2;
    TestFamily ts = t1;
    ts.degree = 4;
    ts.level_scaled = true;
    TestFamily ind = kind("indicator");
    ind.width = 0.04;
    return {{"gaussian-modulated", kind("gaussian"), m}, {"trig", t1, t2}, {"trig-scaled", ts, ts}, {"indicator", ind, ind}};
  }
  TestFamily t1 = kind("trig"), t2 = kind("trig");
  t1.degree = t2.degree = 3;
  t2.seed = 2;
  TestFamily ts = t1;
  ts.degree = 1;
  ts.level_scaled = true;
  TestFamily g1 = kind("gaussian");
  g1.width = 0.4;
  TestFamily g2 = g1;
  g2.center = 0.3;
  return {{"trig", t1, t2}, {"trig-scaled", ts, ts}, {"gaussian", g1, g2}};
}

int default_search_steps(const std::string& op) { return op == "double-bht" ? 0 : 8; }

std::vector<Candidate> default_vector_candidates() {
  TestFamily f;
  f.kind = "trig";
  f.degree = 2;
  TestFamily gx;
  gx.width = 0.15;
  TestFamily gy;
  gy.kind = "trig";
  gy.degree = 16;
  gy.seed = 3;
  TestFamily g;
  g.kind = "tensor";
  g.factors = {gx, gy};
  TestFamily fg;
  fg.kind = "tensor";
  fg.factors = {gx, gx};
  return {{"trig", f, g}, {"gaussian", fg, g}};
}

const char* to_string(Growth g) {
  switch (g) {
    case Growth::stable: return "stable";
    case Growth::growing: return "growing";
    default: return "inconclusive";
  }
}

std::pair<Growth, double> classify_growth(const std::vector<double>& ratios) {
  if (ratios.size() < 2) return {Growth::inconclusive, 0};
  for (double r : ratios)
    if (std::isnan(r)) return {Growth::inconclusive, 0};
  const std::size_t last = ratios.size() - 1, k = std::min<std::size_t>(3, last);
  const double first = approx_ratio(ratios, last - k);
  const double factor = first > 0 ? ratios[last] / first : (ratios[last] > 0 ? kInf : 1.0);
  bool monotone = true;
  for (std::size_t i = last - k; i < last; ++i) monotone = monotone && ratios[i + 1] > ratios[i];
  if (factor <= 2) return {Growth::stable, factor};
  if (monotone && factor >= 4) return {Growth::growing, factor};
  return {Growth::inconclusive, factor};
}

ProbeResult probe_ratio(const ProbeConfig& cfg) {
  check_holder(cfg.exponents);
  if (cfg.base.dim != operator_dim(cfg.op))
    throw std::invalid_argument("operator " + cfg.op.id + " needs " + std::to_string(operator_dim(cfg.op)) + "D grids");
  ProbeResult res{cfg.op.id, cfg.exponents, {}, Growth::inconclusive, 0, {}, {}};
  const auto& e = cfg.exponents;
  auto eval = [&](const Pair& p) {
    const double den = lp_norm(p.f[0], e.p) * lp_norm(p.g[0], e.q);
    if (!(den > 0)) return std::numeric_limits<double>::quiet_NaN();
    return lp_norm(apply_operator(cfg.op, p.f[0], p.g[0]), e.r) / den;
  };
  std::vector<double> ratios;
  for (int level = 0; level < cfg.levels; ++level) {
    const GridSpec grid = level_grid(cfg.base, level);
    std::function<Pair(const Candidate&)> make = [&](const Candidate& c) {
      return Pair{{generate_test_function(c.f, grid, level)}, {generate_test_function(c.g, grid, level)}};
    };
    res.levels.push_back(search_level(cfg.candidates, level, grid.nx, cfg.search_steps, cfg.search_amplitude,
                                      cfg.seed, make, eval));
    ratios.push_back(res.levels.back().ratio);
  }
  std::tie(res.classification, res.growth_factor) = classify_growth(ratios);
  return res;
}

namespace {

std::vector<LevelRecord> vector_levels(const VectorProbeConfig& cfg, const Exponents& e) {
  auto eval = [&](const Pair& p) {
    std::vector<SampledFunction> outs;
    for (std::size_t k = 0; k < cfg.bands.size(); ++k)
      outs.push_back(apply_bp_single_scale(p.f[k], p.g[k], cfg.bands[k]));
    const double den = mixed_norm(p.f, {{kInf, e.p}}) * mixed_norm(p.g, {{cfg.R, e.q}});
    if (!(den > 0)) return std::numeric_limits<double>::quiet_NaN();
    return mixed_norm(outs, {{cfg.R, e.r}}) / den;
  };
  std::vector<LevelRecord> out;
  for (int level = 0; level < cfg.levels; ++level) {
    const GridSpec grid = level_grid(cfg.base, level);
    std::function<Pair(const Candidate&)> make = [&](const Candidate& c) {
      Pair p;
      for (int j : cfg.bands) {
        p.f.push_back(generate_test_function(c.f, grid, level));
        p.g.push_back(pin_to_band(generate_test_function(c.g, grid, level), j));
      }
      return p;
    };
    out.push_back(search_level(cfg.candidates, level, grid.nx, cfg.search_steps, cfg.search_amplitude, cfg.seed,
                               make, eval));
  }
  return out;
}

}  // namespace

ProbeResult probe_vector_valued(const VectorProbeConfig& cfg) {
  check_holder(cfg.exponents);
  if (cfg.base.dim != 2) throw std::invalid_argument("vector-valued probe needs a 2D grid");
  if (cfg.bands.empty()) throw std::invalid_argument("vector-valued probe needs at least one band");
  if (!(cfg.R > 4.0 / 3 && cfg.R < 4)) throw std::invalid_argument("inner exponent R must satisfy 4/3 < R < 4");
  const auto& e = cfg.exponents;
  const Rational a1 = to_rational(1 / e.p), a2 = to_rational(1 / e.q);
  const ExponentTriple alpha = ExponentTriple::from_pair(a1, a2);
  Region region;
  if (cfg.theorem == "AR") {
    region = make_region("AR", to_rational(cfg.R));
  } else if (cfg.theorem == "pi2") {
    if (cfg.R != 2) throw std::invalid_argument("the local L2 theorem is stated for R = 2");
    region = make_region("pi2");
  } else {
    throw std::invalid_argument("unknown theorem region '" + cfg.theorem + "'");
  }
  if (auto bad = region.violation(alpha))
    throw std::invalid_argument("exponents " + to_string(alpha) + " violate " + region.id + ": " + *bad);
  ProbeResult res{"bp-vector", e, vector_levels(cfg, e), Growth::inconclusive, 0, {}, {}};
  std::vector<double> ratios;
  for (const auto& l : res.levels) ratios.push_back(l.ratio);
  std::tie(res.classification, res.growth_factor) = classify_growth(ratios);
  if (cfg.contrast) {
    check_holder(*cfg.contrast);
    res.contrast_exponents = cfg.contrast;
    res.contrast = vector_levels(cfg, *cfg.contrast);
  }
  return res;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json level_json(const LevelRecord& l) {
  return {{"level", l.level},
          {"n", l.n},
          {"ratio", std::isnan(l.ratio) ? nlohmann::json(nullptr) : nlohmann::json(l.ratio)},
          {"candidate", l.candidate},
          {"improved_steps", l.improved_steps}};
}

}  // namespace

std::string probe_csv(const ProbeResult& r) {
  std::ostringstream os;
  os << "level,n,ratio,candidate,improved_steps,classification,growth_factor\n";
  for (const auto& l : r.levels)
    os << l.level << ',' << l.n << ',' << num(l.ratio) << ',' << l.candidate << ',' << l.improved_steps << ','
       << to_string(r.classification) << ',' << num(r.growth_factor) << '\n';
  return os.str();
}

std::string probe_json(const ProbeResult& r, const std::string& config_echo) {
  nlohmann::json j;
  j["op"] = r.op;
  j["exponents"] = {r.exponents.p, r.exponents.q, r.exponents.r};
  auto levels = nlohmann::json::array();
  for (const auto& l : r.levels) levels.push_back(level_json(l));
  j["levels"] = levels;
  j["classification"] = to_string(r.classification);
  j["growth_factor"] = r.growth_factor;
  if (r.contrast_exponents) {
    auto c = nlohmann::json::array();
    for (const auto& l : r.contrast) c.push_back(level_json(l));
    j["contrast"] = {{"exponents", {r.contrast_exponents->p, r.contrast_exponents->q, r.contrast_exponents->r}},
                     {"levels", c}};
  }
  if (!config_echo.empty()) j["config"] = nlohmann::json::parse(config_echo);
  return j.dump(2);
}

}  // namespace bplab
