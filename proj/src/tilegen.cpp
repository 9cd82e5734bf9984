#include "bplab/tilegen.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

namespace bplab {

namespace {

bool fits(const DyadicInterval& w, const AxisGrid& g) {
  const double nyq = static_cast<double>(g.n) / (2 * g.period);
  const double lo = to_double(w.lower()), hi = to_double(w.upper());
  const double c = (lo + hi) / 2, h = 0.45 * (hi - lo);
  return c + h < nyq && c - h > -nyq;
}

}  // namespace

TriTile rank0_tritile(int j, std::int64_t k, int i) {
  if (i < 1 || i > 3) throw std::invalid_argument("overlapping index must be 1, 2 or 3");
  DyadicInterval spatial(-j, k);
  // Shift 1/3 puts 0 strictly inside the overlapping frequency interval.
  DyadicInterval low = DyadicInterval::from_endpoints(pow2(j) * Rational(-2, 3), pow2(j) * Rational(1, 3));
  DyadicInterval band(j, 1);
  std::array<Tile, 3> parts{Tile(spatial, band), Tile(spatial, band), Tile(spatial, band)};
  parts[static_cast<std::size_t>(i - 1)] = Tile(spatial, low);
  return TriTile(parts);
}

std::vector<TriTile> rank1_x_family(const CollectionSpec& spec) {
  std::vector<TriTile> out;
  const std::int64_t a = spec.offset;
  const double nyq = static_cast<double>(spec.gx.n) / (2 * spec.gx.period);
  for (int s : spec.x_scales) {
    const std::int64_t cells = static_cast<std::int64_t>(nyq / std::ldexp(1.0, s)) + 2;
    const std::int64_t positions = std::int64_t{1} << std::max(s, 0);
    for (std::int64_t m = -cells - (cells % 2 != 0); m <= cells; m += 2) {
      DyadicInterval w1(s, m + a), w2(s, m - a), w3(s, -2 * m);
      if (!fits(w1, spec.gx) || !fits(w2, spec.gx) || !fits(w3, spec.gx)) continue;
      for (std::int64_t p = 0; p < positions; ++p) {
        DyadicInterval spatial(-s, p);
        if (to_double(spatial.upper()) > spec.gx.period) continue;
        out.push_back(TriTile({Tile(spatial, w1), Tile(spatial, w2), Tile(spatial, w3)}));
      }
    }
  }
  return out;
}

std::vector<TriTile> rank0_y_family(const CollectionSpec& spec) {
  std::vector<TriTile> out;
  const int j = spec.y_scale;
  const std::int64_t positions = static_cast<std::int64_t>(std::ldexp(spec.gy.period, j));
  for (int i : spec.overlapping)
    for (std::int64_t k = 0; k < positions; ++k) out.push_back(rank0_tritile(j, k, i));
  return out;
}

TileCollection random_collection(const CollectionSpec& spec, std::size_t count, std::uint64_t seed) {
  auto xs = rank1_x_family(spec);
  auto ys = rank0_y_family(spec);
  if (xs.empty() || ys.empty()) throw std::invalid_argument("tile families are empty for these grids");
  const std::size_t total = xs.size() * ys.size();
  std::vector<std::size_t> order(total);
  for (std::size_t k = 0; k < total; ++k) order[k] = k;
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit draw so the sequence is fixed across platforms.
  for (std::size_t k = total; k > 1; --k) std::swap(order[k - 1], order[rng() % k]);
  order.resize(std::min(count, total));
  std::sort(order.begin(), order.end());
  TileCollection c;
  c.csep = spec.csep;
  c.x_rank1 = true;
  c.y_rank0 = true;
  for (std::size_t k : order) c.tiles.push_back({xs[k / ys.size()], ys[k % ys.size()]});
  return c;
}

}  // namespace bplab
