#include "bplab/timefreq.hpp"

#include "bplab/parallel.hpp"
#include "bplab/wavepacket.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace bplab {

namespace {

int single_cell_scale(const TileCollection& s) {
  int scale = 0;
  for (std::size_t k = 0; k < s.tiles.size(); ++k) {
    const auto& y = s.tiles[k].y;
    if (overlapping_index(y).value_or(1) != 1)
      throw std::invalid_argument("size needs a 1-overlapping collection");
    int j = -y.spatial().scale();
    if (k == 0) scale = j;
    else if (j != scale) throw std::invalid_argument("size needs a single-scale collection");
  }
  return scale;
}

void check_index(int i) {
  if (i < 1 || i > 3) throw std::invalid_argument("component index must be 1, 2 or 3");
}

struct TreeValue {
  double size = 0;
  std::size_t top = 0;
  int type = 0;
};

double tree_size(const SizeContext& ctx, const std::vector<double>& e, const std::vector<char>& active, int type,
                 std::size_t top) {
  double sum = 0;
  for (std::size_t s = 0; s < ctx.size(); ++s)
    if ((active.empty() || active[s]) && ctx.in_tree(type, top, s)) sum += e[s];
  return std::sqrt(sum / ctx.top_area(top));
}

// Every (type, top) pair with type != i, sizes computed in parallel over tops.
std::vector<TreeValue> all_trees(const SizeContext& ctx, const std::vector<double>& e, const std::vector<char>& active,
                                 int i) {
  const std::size_t n = ctx.size();
  std::vector<TreeValue> out(2 * n);
  parallel_for(n, [&](std::size_t top) {
    int slot = 0;
    for (int type = 1; type <= 3; ++type) {
      if (type == i) continue;
      out[static_cast<std::size_t>(slot) * n + top] = {tree_size(ctx, e, active, type, top), top, type};
      ++slot;
    }
  });
  return out;
}

Tree collect(const SizeContext& ctx, const std::vector<char>& active, int type, std::size_t top) {
  Tree t{top, {}, type};
  for (std::size_t s = 0; s < ctx.size(); ++s)
    if ((active.empty() || active[s]) && ctx.in_tree(type, top, s)) t.members.push_back(s);
  return t;
}

}  // namespace

SizeContext::SizeContext(const TileCollection& s, const PacketBank& bank, const OrderParams& op)
    : s_(s), bank_(bank), scale_(single_cell_scale(s)) {
  const std::size_t n = s.tiles.size();
  if (bank.size() != n) throw std::invalid_argument("packet bank does not match the collection");
  area_.resize(n);
  for (std::size_t k = 0; k < n; ++k) area_[k] = to_double(s.tiles[k].area());
  for (int t = 0; t < 3; ++t) {
    auto& rel = rel_[static_cast<std::size_t>(t)];
    rel.assign(n * n, 0);
    parallel_for(n, [&](std::size_t top) {
      const auto& T = s.tiles[top];
      for (std::size_t k = 0; k < n; ++k) {
        const auto& x = s.tiles[k];
        rel[top * n + k] = x.y == T.y && tile_leq(x.x[t], T.x[t], op);
      }
    });
  }
}

bool SizeContext::in_tree(int type, std::size_t top, std::size_t s) const {
  return rel_[static_cast<std::size_t>(type - 1)][top * size() + s] != 0;
}

std::vector<double> SizeContext::energies(const SampledFunction& f, int i) const {
  check_index(i);
  if (f.dim() != 2 || f.n() != bank_.grid_x().n || f.m() != bank_.grid_y().n)
    throw std::invalid_argument("function grid does not match the packets");
  std::vector<double> e(size());
  parallel_for(size(), [&](std::size_t k) {
    auto p = bank_.packet(k, i);
    e[k] = std::norm(packet_coefficient(f, p.x, p.y));
  });
  return e;
}

SizeReport compute_size(const SizeContext& ctx, const SampledFunction& f, int i, const std::vector<char>& active) {
  check_index(i);
  if (!active.empty() && active.size() != ctx.size()) throw std::invalid_argument("active mask has the wrong length");
  SizeReport report;
  const auto idx = static_cast<std::size_t>(i - 1);
  report.sigma[idx] = 0.0;
  if (ctx.size() == 0) return report;
  const auto e = ctx.energies(f, i);
  const auto trees = all_trees(ctx, e, active, i);
  std::size_t best = 0;
  for (std::size_t k = 1; k < trees.size(); ++k)
    if (trees[k].size > trees[best].size) best = k;
  report.sigma[idx] = trees[best].size;
  report.witness[idx] = collect(ctx, active, trees[best].type, trees[best].top);
  return report;
}

Decomposition size_decompose(const SizeContext& ctx, const SampledFunction& f, int i, std::optional<double> sigma0) {
  check_index(i);
  Decomposition d;
  const std::size_t n = ctx.size();
  const auto e = ctx.energies(f, i);
  std::vector<char> active(n, 1);
  auto residual_size = [&] {
    double best = 0;
    for (const auto& t : all_trees(ctx, e, active, i)) best = std::max(best, t.size);
    return best;
  };
  d.sigma = sigma0 ? *sigma0 : residual_size();
  if (d.sigma < 0) throw std::invalid_argument("size threshold must be nonnegative");
  const auto& tiles = ctx.collection().tiles;
  auto key = [&](const TreeValue& t) {
    const auto& top = tiles[t.top];
    return std::make_tuple(top.x[t.type - 1].frequency().lower(), top.x.spatial().lower(), top.y.spatial().lower(),
                           t.type, t.top);
  };
  if (d.sigma > 0) {
    const double half = d.sigma / 2;
    for (;;) {
      const auto trees = all_trees(ctx, e, active, i);
      const TreeValue* pick = nullptr;
      for (const auto& t : trees)
        if (t.size >= half && (pick == nullptr || key(t) < key(*pick))) pick = &t;
      if (pick == nullptr) break;
      Tree tree = collect(ctx, active, pick->type, pick->top);
      for (std::size_t s : tree.members) active[s] = 0;
      d.mass += ctx.top_area(tree.top);
      d.big.push_back(std::move(tree));
    }
  }
  for (std::size_t s = 0; s < n; ++s)
    if (active[s]) d.small.push_back(s);
  d.residual_size = residual_size();
  const double norm = lp_norm(f, 2);
  d.constant = norm > 0 ? d.sigma * d.sigma * d.mass / (norm * norm) : 0;
  return d;
}

std::string to_json(const Decomposition& d, const TileCollection& s) {
  nlohmann::json j;
  j["sigma"] = d.sigma;
  j["mass"] = d.mass;
  j["constant"] = d.constant;
  j["residual_size"] = d.residual_size;
  j["small"] = d.small;
  auto trees = nlohmann::json::array();
  for (const auto& t : d.big) {
    const auto& top = s.tiles[t.top];
    trees.push_back({{"top", t.top},
                     {"type", t.type},
                     {"members", t.members},
                     {"area", to_double(top.area())},
                     {"I", {to_string(top.x.spatial().lower()), to_string(top.x.spatial().upper())}},
                     {"J", {to_string(top.y.spatial().lower()), to_string(top.y.spatial().upper())}}});
  }
  j["trees"] = std::move(trees);
  return j.dump(2);
}

SingleTreeBound single_tree_bound(const SizeContext& ctx, const Tree& t, const SampledFunction& f, int i, double r) {
  check_index(i);
  if (!(r > 1)) throw std::invalid_argument("single tree bound needs r > 1");
  const auto e = ctx.energies(f, i);
  double sum = 0;
  for (std::size_t s : t.members) sum += e[s];
  const double size = std::sqrt(sum / ctx.top_area(t.top));

  const Eigen::ArrayXXd m = maximal(f, MaximalVariant::strong, r).dyadic.values().real();
  auto index_range = [](const DyadicInterval& I, double step, Index n) {
    Index a0 = static_cast<Index>(std::ceil(to_double(I.lower()) / step - 1e-12));
    Index a1 = static_cast<Index>(std::ceil(to_double(I.upper()) / step - 1e-12));
    a0 = std::clamp<Index>(a0, 0, n - 1);
    a1 = std::clamp<Index>(a1, a0 + 1, n);
    return std::pair{a0, a1};
  };
  double bound = 0;
  for (std::size_t s : t.members) {
    const auto& tile = ctx.collection().tiles[s];
    auto [a0, a1] = index_range(tile.x.spatial(), f.dx(), f.n());
    auto [b0, b1] = index_range(tile.y.spatial(), f.dy(), f.m());
    bound = std::max(bound, m.block(a0, b0, a1 - a0, b1 - b0).minCoeff());
  }
  return {size, bound, bound > 0 ? size / bound : (size > 0 ? INFINITY : 0.0)};
}

double lambda_bound(const std::array<double, 3>& sigma, const std::array<double, 3>& norms_sq) {
  for (int i = 0; i < 3; ++i) {
    if (!(norms_sq[i] >= 0)) throw std::invalid_argument("norms must be nonnegative");
    if (!(sigma[i] > 0) && norms_sq[i] > 0) throw std::invalid_argument("size must be positive for a nonzero function");
  }
  if (norms_sq[0] == 0 || norms_sq[1] == 0 || norms_sq[2] == 0) return 0;
  // Smallest n with 2^{-n} <= sigma, and the n where 4^n |f|^2 ~ 1.
  std::array<int, 3> lo{};
  int hi = 0;
  for (int i = 0; i < 3; ++i) {
    int n = static_cast<int>(std::ceil(-std::log2(sigma[i])));
    while (std::ldexp(1.0, -n) > sigma[i]) ++n;
    while (std::ldexp(1.0, -(n - 1)) <= sigma[i]) --n;
    lo[i] = n;
    hi = std::max({hi, n, static_cast<int>(std::ceil(-0.5 * std::log2(norms_sq[i])))});
  }
  // Past the balance point each summand halves per step; 110 steps is far
  // below double precision.
  hi += 110;
  const double a1 = norms_sq[0], a2 = norms_sq[1], a3 = norms_sq[2];
  double total = 0;
  for (int n2 = lo[1]; n2 <= hi; ++n2) {
    for (int n3 = lo[2]; n3 <= hi; ++n3) {
      const double m = std::min(std::ldexp(a2, 2 * n2), std::ldexp(a3, 2 * n3));
      // Largest t with 4^t a1 <= m.
      int t = static_cast<int>(std::floor(0.5 * std::log2(m / a1)));
      while (std::ldexp(a1, 2 * (t + 1)) <= m) ++t;
      while (std::ldexp(a1, 2 * t) > m) --t;
      double inner = 0;
      if (t >= lo[0]) inner += a1 * (std::ldexp(1.0, t + 1) - std::ldexp(1.0, lo[0]));
      inner += m * std::ldexp(1.0, 1 - std::max(t + 1, lo[0]));
      total += std::ldexp(inner, -n2 - n3);
    }
  }
  return total;
}

ExceptionalResult exceptional_set(const BitGrid& shrink, const std::vector<BitGrid>& refs, double eps, double c0) {
  if (!(eps > 0)) throw std::invalid_argument("epsilon must be positive");
  if (!(c0 > 0)) throw std::invalid_argument("threshold constant must be positive");
  const auto total = static_cast<std::size_t>(shrink.count());
  if (total == 0) throw std::invalid_argument("set to shrink has measure zero");
  BitGrid out = shrink;
  const double r = 1 + eps;
  for (const auto& ref : refs) {
    if (ref.rows() != shrink.rows() || ref.cols() != shrink.cols())
      throw std::invalid_argument("indicator grids differ");
    const auto count = static_cast<double>(ref.count());
    if (count == 0) continue;
    SampledFunction ind(ref.cast<cplx>(), 1.0, 1.0, 2);
    const Eigen::ArrayXXd m = maximal(ind, MaximalVariant::strong, r).upper.values().real();
    const double threshold = c0 * std::pow(count / static_cast<double>(total), 1 / r);
    out = out && (m < threshold);
  }
  const auto kept = static_cast<std::size_t>(out.count());
  return {out, 2 * kept >= total, total - kept};
}

}  // namespace bplab
