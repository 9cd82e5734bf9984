#include "support.hpp"

#include "bplab/wavepacket.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace bplab::testing {

namespace {
constexpr double kPi = std::numbers::pi;
Index slot(Index k, Index n) { return ((k % n) + n) % n; }
}  // namespace

SampledFunction random_trig(Index n, Index m, int dx, int dy, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SampledFunction like = m == 1 ? SampledFunction(n, 1.0) : SampledFunction(n, m, 1.0, 1.0);
  ArrayC c = ArrayC::Zero(n, m);
  for (int a = -dx; a <= dx; ++a)
    for (int b = -dy; b <= dy; ++b) {
      double re = uniform(rng), im = uniform(rng);
      c(slot(a, n), slot(b, m)) = cplx(re, im);
    }
  return from_coefficients(c, like);
}

SampledFunction packet_superposition(const TileCollection& s, const PacketBank& bank, int component,
                                     std::uint64_t seed, bool conjugate) {
  std::mt19937_64 rng(seed);
  SampledFunction out(bank.grid_x().n, bank.grid_y().n, bank.grid_x().period, bank.grid_y().period);
  for (std::size_t k = 0; k < s.tiles.size(); ++k) {
    auto p = bank.packet(k, component);
    double re = uniform(rng), im = uniform(rng);
    ArrayC v = (p.x.values.matrix() * p.y.values.matrix().transpose()).array();
    out.values() += cplx(re, im) * (conjugate ? v.conjugate().eval() : v);
  }
  return out;
}

cplx evaluate(const ArrayC& c, double period, double x) {
  const Index n = c.rows();
  // Powers of e^{2 pi i x / L} by recurrence, renormalized to stay on the circle.
  const cplx w = std::exp(cplx(0, 2 * kPi * x / period));
  cplx up = 1, down = 1, v = c(0, 0);
  for (Index k = 1; k <= n / 2; ++k) {
    up *= w;
    down *= std::conj(w);
    if (k % 64 == 0) {
      up = std::exp(cplx(0, 2 * kPi * static_cast<double>(k) * x / period));
      down = std::conj(up);
    }
    if (k < n / 2 || n % 2 == 1) v += c(k, 0) * up;
    if (k <= (n - 1) / 2 || k == n / 2) v += c(n - k, 0) * down;
  }
  return v;
}

cplx bht_quadrature(const ArrayC& cf, const ArrayC& cg, double period, double z) {
  // 20-point Gauss-Legendre on 32 equal panels of (0, L/2).
  static const double nodes[10] = {0.0765265211334973, 0.2277858511416451, 0.3737060887154195, 0.5108670019508271,
                                   0.6360536807265150, 0.7463319064601508, 0.8391169718222188, 0.9122344282513259,
                                   0.9639719272779138, 0.9931285991850949};
  static const double weights[10] = {0.1527533871307258, 0.1491729864726037, 0.1420961093183820, 0.1316886384491766,
                                     0.1181945319615184, 0.1019301198172404, 0.0832767415767048, 0.0626720483341091,
                                     0.0406014298003869, 0.0176140071391521};
  auto h = [&](double t) { return evaluate(cf, period, z + t) * evaluate(cg, period, z - t); };
  const int panels = 32;
  const double half = period / 2, w = half / panels;
  cplx sum = 0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * w;
    for (int k = 0; k < 10; ++k)
      for (int sgn : {-1, 1}) {
        const double t = mid + sgn * nodes[k] * w / 2;
        sum += weights[k] * w / 2 * (h(t) - h(-t)) * (kPi / period) / std::tan(kPi * t / period);
      }
  }
  return sum;
}

ArrayC naive_coefficients(const SampledFunction& f) {
  const Index n = f.n(), m = f.m();
  ArrayC c = ArrayC::Zero(n, m);
  for (Index k = 0; k < n; ++k)
    for (Index l = 0; l < m; ++l) {
      cplx acc = 0;
      for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < m; ++b)
          acc += f.values()(a, b) * std::exp(cplx(0, -2 * kPi * (static_cast<double>(k * a) / static_cast<double>(n) +
                                                                   static_cast<double>(l * b) / static_cast<double>(m))));
      c(k, l) = acc / static_cast<double>(n * m);
    }
  return c;
}

double lambda_bound_oracle(const std::array<double, 3>& sigma, const std::array<double, 3>& a, int cutoff) {
  std::array<int, 3> lo{};
  for (int i = 0; i < 3; ++i) {
    int n = -200;
    while (std::pow(2.0, -n) > sigma[i]) ++n;
    lo[i] = n;
  }
  double total = 0;
  for (int n1 = lo[0]; n1 <= cutoff; ++n1)
    for (int n2 = lo[1]; n2 <= cutoff; ++n2)
      for (int n3 = lo[2]; n3 <= cutoff; ++n3) {
        const double m = std::min({std::pow(4.0, n1) * a[0], std::pow(4.0, n2) * a[1], std::pow(4.0, n3) * a[2]});
        total += std::pow(2.0, -n1 - n2 - n3) * m;
      }
  return total;
}

double brute_size(const TileCollection& s, const PacketBank& bank, const SampledFunction& f, int i,
                  const std::vector<char>& active) {
  const std::size_t n = s.tiles.size();
  std::vector<double> e(n);
  for (std::size_t k = 0; k < n; ++k) e[k] = std::norm(packet_coefficient(f, bank.packet(k, i).x, bank.packet(k, i).y));
  double best = 0;
  for (int type = 1; type <= 3; ++type) {
    if (type == i) continue;
    for (std::size_t top = 0; top < n; ++top) {
      const auto& T = s.tiles[top];
      double sum = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (!active.empty() && !active[k]) continue;
        const auto& t = s.tiles[k];
        // Definition: B_type <= B_{T,type} in the tile order, and the same y tri-tile.
        const Tile& b = t.x[type - 1];
        const Tile& bt = T.x[type - 1];
        const bool spatial = bt.spatial().contains(b.spatial());
        const auto [f0, f1] = b.frequency().dilate(3);
        const auto [g0, g1] = bt.frequency().dilate(3);
        const bool freq = f0 <= g0 && g1 <= f1;
        if (spatial && freq && t.y == T.y) sum += e[k];
      }
      best = std::max(best, std::sqrt(sum / to_double(T.area())));
    }
  }
  return best;
}

double brute_dyadic_maximal(const Eigen::ArrayXd& v, Index a) {
  const Index n = v.size();
  double best = 0;
  for (Index len = 1; len <= n; len *= 2) {
    const Index a0 = (a / len) * len;
    best = std::max(best, v.segment(a0, len).sum() / static_cast<double>(len));
  }
  return best;
}

Calibration load_calibration() {
  std::ifstream is(BPLAB_CALIBRATION_FILE);
  if (!is) throw std::runtime_error("cannot open calibration file " BPLAB_CALIBRATION_FILE);
  const auto j = nlohmann::json::parse(is);
  return {j.at("size_lemma_constant").get<double>(), j.at("lambda_constant").get<double>(),
          j.at("single_tree_ratio").get<double>(), j.at("regression_factor").get<double>(), j.at("exceptional_c0").get<double>()};
}

}  // namespace bplab::testing
