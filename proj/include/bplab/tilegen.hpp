#pragma once

#include "bplab/grid.hpp"
#include "bplab/wavepacket.hpp"

#include <cstdint>
#include <vector>

namespace bplab {

// Deterministic generators of sparse product tri-tile collections that fit a
// pair of sampling grids. The x family consists of cubes
// (m + A, m - A, -2m) l (lower corners, in units of the side l), m even, which is
// rank 1 for A = 3 with scales {1, 4} (A = 2 fails through component 3); the y
// family is rank 0 at one scale.
struct CollectionSpec {
  AxisGrid gx{128, 1.0};
  AxisGrid gy{32, 1.0};
  std::vector<int> x_scales{1, 4};  // frequency side 2^s
  int offset = 3;                   // A
  int y_scale = 2;                  // |J| = 2^-y_scale
  std::vector<int> overlapping{1};  // overlapping indices to draw from
  int csep = 4;
};

std::vector<TriTile> rank1_x_family(const CollectionSpec& spec);
std::vector<TriTile> rank0_y_family(const CollectionSpec& spec);

// Up to count distinct product tiles drawn uniformly from the product family.
TileCollection random_collection(const CollectionSpec& spec, std::size_t count, std::uint64_t seed);

// Rank-0 tri-tile at scale j (|J| = 2^-j, position k) overlapping in index i.
TriTile rank0_tritile(int j, std::int64_t k, int i);

}  // namespace bplab
