#include "bplab/grid.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bplab {

namespace {

Rational signed_shift(int scale, const Rational& shift) { return (scale % 2 == 0) ? shift : -shift; }

int log2_exact(const Rational& len) {
  if (len.numerator() <= 0) throw std::invalid_argument("interval length must be positive");
  std::int64_t n = len.numerator(), d = len.denominator();
  if (n == 1 && (d & (d - 1)) == 0) {
    int j = 0;
    while (d > 1) d >>= 1, --j;
    return j;
  }
  if (d == 1 && (n & (n - 1)) == 0) {
    int j = 0;
    while (n > 1) n >>= 1, ++j;
    return j;
  }
  throw std::invalid_argument("interval length " + to_string(len) + " is not a power of two");
}

Rational ceil_rational(const Rational& q) { return -floor_rational(-q); }

bool dilated_within(const DyadicInterval& inner, const DyadicInterval& outer, const Rational& c) {
  auto [a, b] = inner.dilate(c);
  auto [lo, hi] = outer.dilate(c);
  return lo <= a && b <= hi;
}

}  // namespace

DyadicInterval::DyadicInterval(int scale, std::int64_t position, Rational shift) : scale_(scale) {
  Rational whole = floor_rational(shift);
  shift_ = shift - whole;
  std::int64_t w = whole.numerator();
  position_ = position + ((scale % 2 == 0) ? w : -w);
}

DyadicInterval DyadicInterval::from_endpoints(const Rational& lo, const Rational& hi) {
  int j = log2_exact(hi - lo);
  Rational u = lo / pow2(j);
  if (j % 2 == 0) {
    Rational k = floor_rational(u);
    return DyadicInterval(j, k.numerator(), u - k);
  }
  Rational k = ceil_rational(u);
  return DyadicInterval(j, k.numerator(), k - u);
}

Rational DyadicInterval::lower() const {
  return pow2(scale_) * (Rational(position_) + signed_shift(scale_, shift_));
}

std::pair<Rational, Rational> DyadicInterval::dilate(const Rational& c) const {
  Rational half = c * length() / 2;
  Rational mid = center();
  return {mid - half, mid + half};
}

std::strong_ordering operator<=>(const DyadicInterval& a, const DyadicInterval& b) {
  if (auto c = a.scale_ <=> b.scale_; c != 0) return c;
  Rational la = a.lower(), lb = b.lower();
  if (la < lb) return std::strong_ordering::less;
  if (lb < la) return std::strong_ordering::greater;
  if (a.shift_ < b.shift_) return std::strong_ordering::less;
  if (b.shift_ < a.shift_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const DyadicInterval& d) {
  return os << '[' << to_string(d.lower()) << ',' << to_string(d.upper()) << ')';
}

Tile::Tile(DyadicInterval spatial, DyadicInterval frequency)
    : spatial_(std::move(spatial)), frequency_(std::move(frequency)) {
  if (spatial_.shift().numerator() != 0) throw std::invalid_argument("tile spatial interval must be unshifted");
  if (spatial_.scale() + frequency_.scale() != 0) throw std::invalid_argument("tile area must be 1");
}

TriTile::TriTile(std::array<Tile, 3> components) : components_(std::move(components)) {
  if (!(components_[0].spatial() == components_[1].spatial() &&
        components_[0].spatial() == components_[2].spatial()))
    throw std::invalid_argument("tri-tile components must share the spatial interval");
}

std::array<DyadicInterval, 3> TriTile::cube() const {
  return {components_[0].frequency(), components_[1].frequency(), components_[2].frequency()};
}

std::array<Rational, 3> TriTile::shifts() const {
  return {components_[0].frequency().shift(), components_[1].frequency().shift(),
          components_[2].frequency().shift()};
}

std::vector<Cube> mesh_generate(const std::vector<Rational>& shift, int jmin, int jmax, const Box& window) {
  if (window.size() != shift.size() || window.empty())
    throw std::invalid_argument("mesh_generate: window and shift dimensions differ");
  for (const auto& [lo, hi] : window)
    if (!(lo < hi)) throw std::invalid_argument("mesh_generate: empty window");
  std::vector<Cube> out;
  for (int j = jmin; j <= jmax; ++j) {
    Rational len = pow2(j);
    std::vector<std::vector<DyadicInterval>> axes(shift.size());
    for (std::size_t a = 0; a < shift.size(); ++a) {
      DyadicInterval probe(j, 0, shift[a]);  // normalizes the shift
      Rational off = probe.lower();           // lower endpoint at position 0
      // overlap: lower < hi and lower + len > lo
      Rational kmin = floor_rational((window[a].first - off) / len);
      Rational kmax = ceil_rational((window[a].second - off) / len) - 1;
      for (std::int64_t k = kmin.numerator(); k <= kmax.numerator(); ++k) {
        DyadicInterval d(j, probe.position() + k, probe.shift());
        if (d.lower() < window[a].second && d.upper() > window[a].first) axes[a].push_back(d);
      }
    }
    std::vector<std::size_t> idx(shift.size(), 0);
    bool any = std::all_of(axes.begin(), axes.end(), [](const auto& v) { return !v.empty(); });
    while (any) {
      Cube c;
      for (std::size_t a = 0; a < axes.size(); ++a) c.push_back(axes[a][idx[a]]);
      out.push_back(std::move(c));
      std::size_t a = 0;
      while (a < idx.size() && ++idx[a] == axes[a].size()) idx[a++] = 0;
      if (a == idx.size()) break;
    }
  }
  return out;
}

std::optional<Cube> find_enclosing_mesh_cube(const Box& q, const std::vector<Rational>& alphabet) {
  if (q.empty()) throw std::invalid_argument("find_enclosing_mesh_cube: empty box");
  Rational side = q[0].second - q[0].first;
  if (side.numerator() <= 0) throw std::invalid_argument("find_enclosing_mesh_cube: degenerate box");
  int jlo = -62;
  while (pow2(jlo) < side) ++jlo;
  const Rational c(7, 10);
  for (int j = jlo; j <= jlo + 3; ++j) {
    Cube found;
    for (const auto& [lo, hi] : q) {
      bool ok = false;
      for (const auto& s : alphabet) {
        DyadicInterval probe(j, 0, s);
        Rational len = pow2(j);
        Rational k0 = floor_rational((lo - probe.lower()) / len);
        for (std::int64_t dk = -1; dk <= 1 && !ok; ++dk) {
          DyadicInterval d(j, probe.position() + k0.numerator() + dk, probe.shift());
          auto [a, b] = d.dilate(c);
          if (a <= lo && hi <= b) {
            found.push_back(d);
            ok = true;
          }
        }
        if (ok) break;
      }
      if (!ok) break;
    }
    if (found.size() == q.size()) return found;
  }
  return std::nullopt;
}

const char* to_string(TileRelation r) {
  switch (r) {
    case TileRelation::eq: return "eq";
    case TileRelation::lt: return "lt";
    case TileRelation::leq: return "leq";
    case TileRelation::lesssim: return "lesssim";
    case TileRelation::lesssim_prime: return "lesssim_prime";
    case TileRelation::incomparable: return "incomparable";
  }
  return "?";
}

bool tile_lt(const Tile& pp, const Tile& p, const OrderParams& op) {
  return p.spatial().contains(pp.spatial()) && !(pp.spatial() == p.spatial()) &&
         dilated_within(p.frequency(), pp.frequency(), op.leq_dilation);
}

bool tile_leq(const Tile& pp, const Tile& p, const OrderParams& op) { return pp == p || tile_lt(pp, p, op); }

bool tile_lesssim(const Tile& pp, const Tile& p, const OrderParams& op) {
  return p.spatial().contains(pp.spatial()) && dilated_within(p.frequency(), pp.frequency(), op.lesssim_dilation);
}

bool tile_lesssim_prime(const Tile& pp, const Tile& p, const OrderParams& op) {
  return tile_lesssim(pp, p, op) && !tile_leq(pp, p, op);
}

TileRelation tile_order(const Tile& pp, const Tile& p, const OrderParams& op) {
  if (pp == p) return TileRelation::eq;
  if (tile_lt(pp, p, op)) return TileRelation::lt;
  if (tile_lesssim(pp, p, op)) return TileRelation::lesssim_prime;
  return TileRelation::incomparable;
}

namespace {

void require_single_family(std::span<const Cube> cubes) {
  if (cubes.empty()) return;
  const Cube& ref = cubes.front();
  for (const auto& c : cubes) {
    if (c.size() != ref.size()) throw std::invalid_argument("is_sparse: cubes of different dimension");
    for (std::size_t a = 0; a < c.size(); ++a)
      if (c[a].shift() != ref[a].shift())
        throw std::invalid_argument("is_sparse: cubes from different shifted meshes");
  }
}

std::vector<Cube> x_cubes(const TileCollection& c) {
  std::set<std::array<DyadicInterval, 3>> seen;
  for (const auto& s : c.tiles) seen.insert(s.x.cube());
  std::vector<Cube> out;
  for (const auto& q : seen) out.emplace_back(q.begin(), q.end());
  return out;
}

int scale_period(int csep) {
  int t = 0;
  while ((std::int64_t{1} << t) <= csep) ++t;
  return t;
}

std::int64_t mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

}  // namespace

bool is_sparse(std::span<const Cube> cubes, int csep) {
  if (csep < 1) throw std::invalid_argument("csep must be a positive integer");
  require_single_family(cubes);
  const Rational c(csep);
  for (std::size_t a = 0; a < cubes.size(); ++a) {
    for (std::size_t b = a + 1; b < cubes.size(); ++b) {
      const Cube& q = cubes[a];
      const Cube& r = cubes[b];
      if (q == r) continue;
      int sq = q[0].scale(), sr = r[0].scale();
      if (sq != sr) {
        Rational small = pow2(std::min(sq, sr)), big = pow2(std::max(sq, sr));
        if (!(c * small < big)) return false;
        continue;
      }
      bool disjoint = false;
      for (std::size_t ax = 0; ax < q.size() && !disjoint; ++ax) {
        auto [a0, a1] = q[ax].dilate(c);
        auto [b0, b1] = r[ax].dilate(c);
        disjoint = (a1 <= b0) || (b1 <= a0);
      }
      if (!disjoint) return false;
    }
  }
  return true;
}

bool is_sparse(const TileCollection& c, int csep) {
  auto cubes = x_cubes(c);
  return is_sparse(std::span<const Cube>(cubes), csep);
}

std::size_t split_sparse_bound(int csep, int dim) {
  std::size_t n = static_cast<std::size_t>(scale_period(csep));
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(csep);
  return n;
}

std::vector<TileCollection> split_sparse(const TileCollection& c, int csep) {
  if (csep < 1) throw std::invalid_argument("csep must be a positive integer");
  auto cubes = x_cubes(c);
  require_single_family(cubes);
  const int t = scale_period(csep);
  std::map<std::vector<std::int64_t>, TileCollection> parts;
  for (const auto& s : c.tiles) {
    auto q = s.x.cube();
    std::vector<std::int64_t> key{mod(q[0].scale(), t)};
    for (const auto& d : q) key.push_back(mod(d.position(), csep));
    auto& part = parts[key];
    part.tiles.push_back(s);
    part.x_rank1 = c.x_rank1;
    part.y_rank0 = c.y_rank0;
    part.csep = csep;
  }
  std::vector<TileCollection> out;
  for (auto& [k, v] : parts) out.push_back(std::move(v));
  return out;
}

bool rank1_check(std::span<const TriTile> tris, const OrderParams& op) {
  for (const auto& p : tris) {
    for (const auto& q : tris) {
      for (int j = 0; j < 3; ++j) {
        if (p[j].frequency() == q[j].frequency()) {
          for (int i = 0; i < 3; ++i)
            if (!(p[i].frequency() == q[i].frequency())) return false;
        }
      }
      // q plays P', p plays P
      if (q.spatial().length() < p.spatial().length()) {
        for (int j = 0; j < 3; ++j) {
          if (!tile_leq(q[j], p[j], op)) continue;
          for (int i = 0; i < 3; ++i)
            if (i != j && !tile_lesssim_prime(q[i], p[i], op)) return false;
        }
      }
    }
  }
  return true;
}

std::optional<int> overlapping_index(const TriTile& t) {
  std::optional<int> found;
  for (int i = 0; i < 3; ++i) {
    if (t[i].frequency().contains(Rational(0))) {
      if (found) return std::nullopt;
      found = i + 1;
    }
  }
  return found;
}

bool rank0_check(std::span<const TriTile> tris) {
  for (const auto& t : tris) {
    int zeros = 0;
    for (int i = 0; i < 3; ++i) zeros += t[i].frequency().contains(Rational(0)) ? 1 : 0;
    if (zeros > 1) return false;
    const Rational inv = 1 / t.spatial().length();
    for (int i = 0; i < 3; ++i) {
      const auto& w = t[i].frequency();
      if (w.contains(Rational(0))) continue;
      if (!(w.lower() == inv && w.upper() == 2 * inv)) return false;
    }
  }
  return true;
}

std::vector<TriTile> x_family(const TileCollection& c) {
  std::set<TriTile> s;
  for (const auto& t : c.tiles) s.insert(t.x);
  return {s.begin(), s.end()};
}

std::vector<TriTile> y_family(const TileCollection& c) {
  std::set<TriTile> s;
  for (const auto& t : c.tiles) s.insert(t.y);
  return {s.begin(), s.end()};
}

bool rank_check(const TileCollection& c, int rank, const OrderParams& op) {
  if (rank == 1) {
    auto xs = x_family(c);
    return rank1_check(std::span<const TriTile>(xs), op);
  }
  if (rank == 0) {
    auto ys = y_family(c);
    return rank0_check(std::span<const TriTile>(ys));
  }
  throw std::invalid_argument("rank must be 0 or 1");
}

std::vector<std::pair<CellKey, TileCollection>> collection_split(const TileCollection& s) {
  std::map<CellKey, TileCollection> cells;
  for (const auto& t : s.tiles) {
    TriTile single = t.y;
    if (!rank0_check(std::span<const TriTile>(&single, 1)))
      throw std::invalid_argument("collection_split: y tri-tile is not rank 0");
    CellKey key{overlapping_index(t.y).value_or(1), -t.y.spatial().scale()};
    auto& cell = cells[key];
    cell.tiles.push_back(t);
    cell.x_rank1 = s.x_rank1;
    cell.y_rank0 = s.y_rank0;
    cell.csep = s.csep;
  }
  return {cells.begin(), cells.end()};
}

namespace {

void put_interval(std::ostream& os, const DyadicInterval& d) {
  os << ' ' << to_string(d.lower()) << ' ' << to_string(d.upper());
}

DyadicInterval get_interval(std::istringstream& in, std::size_t line) {
  std::string a, b;
  if (!(in >> a >> b)) throw std::invalid_argument("tile record truncated at line " + std::to_string(line));
  return DyadicInterval::from_endpoints(parse_rational(a), parse_rational(b));
}

TriTile get_tritile(std::istringstream& in, std::size_t line) {
  DyadicInterval spatial = get_interval(in, line);
  auto w1 = get_interval(in, line), w2 = get_interval(in, line), w3 = get_interval(in, line);
  return TriTile({Tile(spatial, w1), Tile(spatial, w2), Tile(spatial, w3)});
}

}  // namespace

void write_collection(std::ostream& os, const TileCollection& c) {
  os << "bplab-tiles 1\n";
  os << "x-rank " << (c.x_rank1 ? "1" : "none") << '\n';
  os << "y-rank " << (c.y_rank0 ? "0" : "none") << '\n';
  os << "csep " << c.csep << '\n';
  os << "count " << c.tiles.size() << '\n';
  for (const auto& s : c.tiles) {
    os << 's';
    put_interval(os, s.x.spatial());
    for (int i = 0; i < 3; ++i) put_interval(os, s.x[i].frequency());
    put_interval(os, s.y.spatial());
    for (int i = 0; i < 3; ++i) put_interval(os, s.y[i].frequency());
    os << '\n';
  }
}

TileCollection read_collection(std::istream& is) {
  TileCollection c;
  std::string text;
  std::size_t line_no = 0;
  std::optional<std::size_t> count;
  bool header = false;
  while (std::getline(is, text)) {
    ++line_no;
    if (text.empty() || text[0] == '#') continue;
    std::istringstream in(text);
    std::string key;
    in >> key;
    if (key == "bplab-tiles") {
      int version = 0;
      in >> version;
      if (version != 1) throw std::invalid_argument("unsupported tile format version");
      header = true;
    } else if (key == "x-rank") {
      std::string v;
      in >> v;
      c.x_rank1 = (v == "1");
    } else if (key == "y-rank") {
      std::string v;
      in >> v;
      c.y_rank0 = (v == "0");
    } else if (key == "csep") {
      in >> c.csep;
    } else if (key == "count") {
      std::size_t n = 0;
      in >> n;
      count = n;
    } else if (key == "s") {
      TriTile x = get_tritile(in, line_no);
      TriTile y = get_tritile(in, line_no);
      c.tiles.push_back({x, y});
    } else {
      throw std::invalid_argument("unknown tile record '" + key + "' at line " + std::to_string(line_no));
    }
  }
  if (!header) throw std::invalid_argument("missing bplab-tiles header");
  if (count && *count != c.tiles.size()) throw std::invalid_argument("tile count mismatch");
  return c;
}

}  // namespace bplab
