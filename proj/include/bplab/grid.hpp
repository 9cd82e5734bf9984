#pragma once

#include "bplab/rational.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace bplab {

// Interval 2^j (k + [0,1) + (-1)^j sigma). The shift is normalized into [0,1)
// with the integer part folded into k, so equal intervals compare equal.
class DyadicInterval {
 public:
  DyadicInterval() = default;
  DyadicInterval(int scale, std::int64_t position, Rational shift = 0);

  // Inverse of lower()/upper(); rejects lengths that are not powers of two.
  static DyadicInterval from_endpoints(const Rational& lo, const Rational& hi);

  int scale() const { return scale_; }
  std::int64_t position() const { return position_; }
  const Rational& shift() const { return shift_; }

  Rational lower() const;
  Rational upper() const { return lower() + length(); }
  Rational length() const { return pow2(scale_); }
  Rational center() const { return lower() + length() / 2; }

  bool contains(const Rational& x) const { return lower() <= x && x < upper(); }
  bool contains(const DyadicInterval& other) const {
    return lower() <= other.lower() && other.upper() <= upper();
  }
  // [center - c|I|/2, center + c|I|/2)
  std::pair<Rational, Rational> dilate(const Rational& c) const;

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
  friend std::strong_ordering operator<=>(const DyadicInterval& a, const DyadicInterval& b);

 private:
  int scale_ = 0;
  std::int64_t position_ = 0;
  Rational shift_ = 0;
};

std::ostream& operator<<(std::ostream& os, const DyadicInterval& d);

// Area-one rectangle I x omega with I unshifted.
class Tile {
 public:
  Tile(DyadicInterval spatial, DyadicInterval frequency);
  const DyadicInterval& spatial() const { return spatial_; }
  const DyadicInterval& frequency() const { return frequency_; }
  friend bool operator==(const Tile&, const Tile&) = default;
  friend auto operator<=>(const Tile&, const Tile&) = default;

 private:
  DyadicInterval spatial_;
  DyadicInterval frequency_;
};

class TriTile {
 public:
  explicit TriTile(std::array<Tile, 3> components);
  const Tile& operator[](int i) const { return components_[static_cast<std::size_t>(i)]; }
  const DyadicInterval& spatial() const { return components_[0].spatial(); }
  std::array<DyadicInterval, 3> cube() const;
  std::array<Rational, 3> shifts() const;
  friend bool operator==(const TriTile&, const TriTile&) = default;
  friend auto operator<=>(const TriTile&, const TriTile&) = default;

 private:
  std::array<Tile, 3> components_;
};

struct ProductTriTile {
  TriTile x;  // B, rank-1 family
  TriTile y;  // P, rank-0 family
  Rational area() const { return x.spatial().length() * y.spatial().length(); }
  friend bool operator==(const ProductTriTile&, const ProductTriTile&) = default;
  friend auto operator<=>(const ProductTriTile&, const ProductTriTile&) = default;
};

struct TileCollection {
  std::vector<ProductTriTile> tiles;
  bool x_rank1 = false;
  bool y_rank0 = false;
  int csep = 4;
};

// Shift presets: the two alphabets quoted for meshes, and thirds, which is the
// alphabet that actually moves the mesh (integer shifts only relabel k).
inline const std::vector<Rational>& shift_preset_grid() {
  static const std::vector<Rational> s{1, 2, 3};
  return s;
}
inline const std::vector<Rational>& shift_preset_tile() {
  static const std::vector<Rational> s{0, 1, 3};
  return s;
}
inline const std::vector<Rational>& shift_preset_thirds() {
  static const std::vector<Rational> s{0, Rational(1, 3), Rational(2, 3)};
  return s;
}

using Cube = std::vector<DyadicInterval>;
using Box = std::vector<std::pair<Rational, Rational>>;

// Mesh cubes of scales [jmin, jmax] with positive-measure overlap with window.
std::vector<Cube> mesh_generate(const std::vector<Rational>& shift, int jmin, int jmax, const Box& window);

// Search the given shift alphabet for a mesh cube Q' with Q inside (7/10)Q' and
// l(Q) <= l(Q') <= 8 l(Q). Q is given by per-axis [lo, hi] of equal length.
std::optional<Cube> find_enclosing_mesh_cube(const Box& q, const std::vector<Rational>& alphabet);

struct OrderParams {
  Rational leq_dilation = 3;
  Rational lesssim_dilation = 10000000;
};

enum class TileRelation { eq, lt, leq, lesssim, lesssim_prime, incomparable };
const char* to_string(TileRelation r);

bool tile_lt(const Tile& p_prime, const Tile& p, const OrderParams& op = {});
bool tile_leq(const Tile& p_prime, const Tile& p, const OrderParams& op = {});
bool tile_lesssim(const Tile& p_prime, const Tile& p, const OrderParams& op = {});
bool tile_lesssim_prime(const Tile& p_prime, const Tile& p, const OrderParams& op = {});
// Strongest relation of P' to P: eq, then lt, then lesssim_prime, else incomparable.
TileRelation tile_order(const Tile& p_prime, const Tile& p, const OrderParams& op = {});

bool is_sparse(std::span<const Cube> cubes, int csep);
bool is_sparse(const TileCollection& c, int csep);
// Residue-class split by scale mod t (2^t > csep) and position mod csep.
std::vector<TileCollection> split_sparse(const TileCollection& c, int csep);
std::size_t split_sparse_bound(int csep, int dim);

bool rank1_check(std::span<const TriTile> tris, const OrderParams& op = {});
bool rank0_check(std::span<const TriTile> tris);
bool rank_check(const TileCollection& c, int rank, const OrderParams& op = {});
// 1-based index i with 0 in omega_{P_i}, if exactly one such i.
std::optional<int> overlapping_index(const TriTile& t);

std::vector<TriTile> x_family(const TileCollection& c);  // distinct, sorted
std::vector<TriTile> y_family(const TileCollection& c);

struct CellKey {
  int index;  // overlapping index, 1..3
  int scale;  // j with |J| = 2^-j
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};
// Partition into S^[i]_j cells; tiles without an overlapping index go to i = 1.
std::vector<std::pair<CellKey, TileCollection>> collection_split(const TileCollection& s);

// Line-oriented text format with exact rational endpoints.
void write_collection(std::ostream& os, const TileCollection& c);
TileCollection read_collection(std::istream& is);

}  // namespace bplab
