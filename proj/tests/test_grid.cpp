#include "bplab/grid.hpp"
#include "bplab/tilegen.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace bplab;

namespace {

std::vector<std::pair<Rational, Rational>> endpoints(const std::vector<Cube>& cubes) {
  std::vector<std::pair<Rational, Rational>> out;
  for (const auto& c : cubes) out.push_back({c[0].lower(), c[0].upper()});
  std::sort(out.begin(), out.end());
  return out;
}

Tile tile(int spatial_scale, std::int64_t k, std::int64_t w, Rational shift = 0) {
  return Tile(DyadicInterval(spatial_scale, k), DyadicInterval(-spatial_scale, w, shift));
}

// Random tile with |scale| <= 6 inside a small window so relations occur.
Tile random_tile(std::mt19937_64& rng) {
  const int j = static_cast<int>(rng() % 13) - 6;
  const std::int64_t k = static_cast<std::int64_t>(rng() % 4);
  const std::int64_t w = static_cast<std::int64_t>(rng() % 6) - 3;
  return tile(j, k, w);
}

}  // namespace

TEST_CASE("dyadic interval endpoints follow the shifted mesh formula") {
  DyadicInterval d(1, 3, Rational(1, 3));
  // 2^1 (3 + (-1)^1 / 3) = 6 - 2/3
  CHECK(d.lower() == Rational(16, 3));
  CHECK(d.length() == Rational(2));
  DyadicInterval e(-2, 1, Rational(1, 3));
  CHECK(e.lower() == Rational(1, 4) + Rational(1, 12));
  CHECK(DyadicInterval(0, 2, Rational(5, 4)) == DyadicInterval(0, 3, Rational(1, 4)));
  CHECK(DyadicInterval::from_endpoints(Rational(-2, 3), Rational(1, 3)).length() == Rational(1));
  CHECK_THROWS_AS(DyadicInterval::from_endpoints(Rational(0), Rational(3)), std::invalid_argument);
}

TEST_CASE("mesh_generate returns the unit grid on [0, 4)") {
  auto cubes = mesh_generate({Rational(0)}, 0, 0, {{Rational(0), Rational(4)}});
  auto e = endpoints(cubes);
  REQUIRE(e.size() == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(e[static_cast<std::size_t>(k)].first == Rational(k));
    CHECK(e[static_cast<std::size_t>(k)].second == Rational(k + 1));
  }
}

TEST_CASE("integer shifts relabel the mesh without moving it") {
  const Box window{{Rational(0), Rational(8)}};
  auto shifted = endpoints(mesh_generate({Rational(1)}, 1, 1, window));
  auto plain = endpoints(mesh_generate({Rational(0)}, 1, 1, window));
  CHECK(shifted == plain);
  // The single interval at position 0 does move: by 2^1 * (-1)^1 * 1 = -2.
  CHECK(DyadicInterval(1, 0, Rational(1)).lower() == Rational(-2));
  CHECK(DyadicInterval(1, 0, Rational(0)).lower() == Rational(0));
}

TEST_CASE("mesh_generate handles empty scale ranges and rejects empty windows") {
  CHECK(mesh_generate({Rational(0)}, 2, 1, {{Rational(0), Rational(4)}}).empty());
  CHECK_THROWS_AS(mesh_generate({Rational(0)}, 0, 0, {{Rational(1), Rational(1)}}), std::invalid_argument);
}

TEST_CASE("every cube sits in 7/10 of a mesh cube from the thirds alphabet") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int j = static_cast<int>(rng() % 5) - 2;
    const Rational side = pow2(j);
    Box q;
    for (int ax = 0; ax < 2; ++ax) {
      const Rational lo = Rational(static_cast<std::int64_t>(rng() % 97) - 48, 16);
      q.push_back({lo, lo + side});
    }
    auto found = find_enclosing_mesh_cube(q, shift_preset_thirds());
    REQUIRE(found.has_value());
    for (std::size_t ax = 0; ax < 2; ++ax) {
      const auto& d = (*found)[ax];
      CHECK(d.length() >= side);
      CHECK(d.length() <= 8 * side);
      auto [lo, hi] = d.dilate(Rational(7, 10));
      CHECK(lo <= q[ax].first);
      CHECK(q[ax].second <= hi);
    }
  }
}

TEST_CASE("tiles have area one exactly") {
  CHECK_NOTHROW(tile(-3, 5, -2, Rational(1, 3)));
  CHECK_THROWS_AS(Tile(DyadicInterval(0, 0), DyadicInterval(1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(Tile(DyadicInterval(0, 0, Rational(1, 3)), DyadicInterval(0, 0)), std::invalid_argument);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    Tile t = random_tile(rng);
    CHECK(t.spatial().length() * t.frequency().length() == Rational(1));
  }
}

TEST_CASE("tile order examples") {
  Tile p = tile(0, 0, 0);
  CHECK(tile_order(p, p) == TileRelation::eq);
  CHECK(tile_leq(p, p));
  Tile pp(DyadicInterval(-1, 0), DyadicInterval(1, 0));  // [0,1/2) x [0,2)
  CHECK(tile_order(pp, p) == TileRelation::lt);
  Tile far = tile(0, 5, 0);
  CHECK(tile_order(far, p) == TileRelation::incomparable);
  // Nested in space, frequency off by a lot: lesssim only at the large dilation.
  Tile shifted(DyadicInterval(-1, 0), DyadicInterval(1, 5));
  CHECK(tile_order(shifted, p) == TileRelation::lesssim_prime);
  CHECK(tile_order(shifted, p, {3, 3}) == TileRelation::incomparable);
}

TEST_CASE("tile order: leq is reflexive, antisymmetric on eq and transitive") {
  std::mt19937_64 rng(11);
  std::vector<Tile> tiles;
  for (int k = 0; k < 60; ++k) tiles.push_back(random_tile(rng));
  for (const auto& a : tiles) {
    CHECK(tile_leq(a, a));
    for (const auto& b : tiles) {
      if (tile_leq(a, b) && tile_leq(b, a)) CHECK(a == b);
      if (!tile_leq(a, b)) continue;
      for (const auto& c : tiles)
        if (tile_leq(b, c)) CHECK(tile_leq(a, c));
    }
  }
}

TEST_CASE("sparsity examples") {
  Cube q{DyadicInterval(0, 0), DyadicInterval(0, 0), DyadicInterval(0, 0)};
  Cube r{DyadicInterval(0, 1), DyadicInterval(0, 0), DyadicInterval(0, 0)};
  std::vector<Cube> single{q};
  CHECK(is_sparse(std::span<const Cube>(single), 4));
  std::vector<Cube> pair{q, r};
  CHECK_FALSE(is_sparse(std::span<const Cube>(pair), 4));
  Cube far{DyadicInterval(0, 9), DyadicInterval(0, 0), DyadicInterval(0, 0)};
  std::vector<Cube> apart{q, far};
  CHECK(is_sparse(std::span<const Cube>(apart), 4));
  Cube other{DyadicInterval(0, 0, Rational(1, 3)), DyadicInterval(0, 0), DyadicInterval(0, 0)};
  std::vector<Cube> mixed{q, other};
  CHECK_THROWS_AS(is_sparse(std::span<const Cube>(mixed), 4), std::invalid_argument);
}

TEST_CASE("split_sparse partitions a dense grid into sparse parts") {
  TileCollection c;
  c.csep = 4;
  const TriTile y = rank0_tritile(0, 0, 1);
  for (int k = 0; k < 16; ++k) {
    const Tile t(DyadicInterval(0, 0), DyadicInterval(0, k));
    c.tiles.push_back({TriTile({t, t, t}), y});
  }
  CHECK_FALSE(is_sparse(c, 4));
  auto parts = split_sparse(c, 4);
  CHECK(parts.size() <= split_sparse_bound(4, 3));
  std::multiset<ProductTriTile> all;
  for (const auto& p : parts) {
    CHECK(is_sparse(p, 4));
    all.insert(p.tiles.begin(), p.tiles.end());
  }
  CHECK(all == std::multiset<ProductTriTile>(c.tiles.begin(), c.tiles.end()));
}

TEST_CASE("rank 0 tri-tiles and overlapping index") {
  TriTile t = rank0_tritile(2, 1, 1);
  std::vector<TriTile> v{t};
  CHECK(rank0_check(std::span<const TriTile>(v)));
  CHECK(overlapping_index(t) == 1);
  CHECK(overlapping_index(rank0_tritile(0, 0, 3)) == 3);
  const DyadicInterval s(-2, 1);
  const DyadicInterval low = DyadicInterval::from_endpoints(Rational(-8, 3), Rational(4, 3));
  TriTile two({Tile(s, low), Tile(s, low), Tile(s, DyadicInterval(2, 1))});
  std::vector<TriTile> w{two};
  CHECK_FALSE(rank0_check(std::span<const TriTile>(w)));
  CHECK_FALSE(overlapping_index(two).has_value());
}

TEST_CASE("rank 1: sharing one frequency interval but not all is rejected") {
  CollectionSpec spec;
  auto xs = rank1_x_family(spec);
  CHECK(rank1_check(std::span<const TriTile>(xs)));
  // Two tri-tiles at one scale and position with different cubes.
  const TriTile& a = xs.front();
  auto it = std::find_if(xs.begin(), xs.end(), [&](const TriTile& t) {
    return t.spatial() == a.spatial() && !(t[1].frequency() == a[1].frequency());
  });
  REQUIRE(it != xs.end());
  TriTile mixed({a[0], (*it)[1], (*it)[2]});
  std::vector<TriTile> bad{a, mixed};
  CHECK_FALSE(rank1_check(std::span<const TriTile>(bad)));
}

TEST_CASE("generated collections are rank 1 in x, rank 0 in y and sparse") {
  CollectionSpec spec;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto c = random_collection(spec, 100, seed);
    CHECK(c.tiles.size() == 100);
    CHECK(rank_check(c, 1));
    CHECK(rank_check(c, 0));
    CHECK(is_sparse(c, c.csep));
  }
}

TEST_CASE("collection_split is a partition into overlapping-index cells") {
  TileCollection s;
  CHECK(collection_split(s).empty());
  const TriTile x = rank1_x_family(CollectionSpec{}).front();
  for (int i = 1; i <= 3; ++i)
    for (int k = 0; k < 2; ++k) s.tiles.push_back({x, rank0_tritile(1, k, i)});
  auto cells = collection_split(s);
  REQUIRE(cells.size() == 3);
  std::size_t total = 0;
  for (const auto& [key, cell] : cells) {
    CHECK(cell.tiles.size() == 2);
    CHECK(key.scale == 1);
    for (const auto& t : cell.tiles) CHECK(overlapping_index(t.y) == key.index);
    total += cell.tiles.size();
  }
  CHECK(total == s.tiles.size());
  // Single cell when every y tri-tile overlaps in component 1 at |J| = 1.
  TileCollection one;
  one.tiles.push_back({x, rank0_tritile(0, 0, 1)});
  auto c1 = collection_split(one);
  REQUIRE(c1.size() == 1);
  CHECK(c1[0].first.index == 1);
  CHECK(c1[0].first.scale == 0);
}

TEST_CASE("collections round-trip through the text format") {
  auto c = random_collection(CollectionSpec{}, 20, 4);
  std::stringstream ss;
  write_collection(ss, c);
  auto back = read_collection(ss);
  CHECK(back.tiles == c.tiles);
  CHECK(back.csep == c.csep);
  CHECK(back.x_rank1 == c.x_rank1);
  std::stringstream bad("garbage\n");
  CHECK_THROWS_AS(read_collection(bad), std::invalid_argument);
}
