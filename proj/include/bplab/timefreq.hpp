#pragma once

#include "bplab/grid.hpp"
#include "bplab/operators.hpp"
#include "bplab/sampled.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace bplab {

// An i-tree inside one S^[1]_j cell: every member s has B_i <= B_{T,i} and the
// same y tri-tile as the top. Indices refer to the collection the tree was
// built from.
struct Tree {
  std::size_t top;
  std::vector<std::size_t> members;  // ascending
  int type;                          // i in 1..3
};

// Per-index sizes with their witness trees; entries not requested stay empty.
struct SizeReport {
  std::string collection;
  std::array<std::optional<double>, 3> sigma;
  std::array<std::optional<Tree>, 3> witness;
};

// The sampled data size computations need: the collection, its packets and a
// precomputed relation B_{s,i'} <= B_{t,i'} with equal y tri-tiles.
class SizeContext {
 public:
  SizeContext(const TileCollection& s, const PacketBank& bank, const OrderParams& op = {});
  const TileCollection& collection() const { return s_; }
  const PacketBank& bank() const { return bank_; }
  std::size_t size() const { return s_.tiles.size(); }
  int scale() const { return scale_; }
  // s belongs to the maximal tree of type t with top `top`.
  bool in_tree(int type, std::size_t top, std::size_t s) const;
  // |<f, phi_{s_i}>|^2 for every tile.
  std::vector<double> energies(const SampledFunction& f, int i) const;
  double top_area(std::size_t top) const { return area_[top]; }

 private:
  const TileCollection& s_;
  const PacketBank& bank_;
  int scale_;
  std::vector<double> area_;
  std::array<std::vector<char>, 3> rel_;  // rel_[t][top * n + s]
};

// i-size of the sub-collection selected by `active` (all tiles if empty), as a
// sup over the maximal i'-trees (i' != i) whose tops range over the whole
// collection. Throws unless the collection is a single 1-overlapping scale cell.
SizeReport compute_size(const SizeContext& ctx, const SampledFunction& f, int i,
                        const std::vector<char>& active = {});

struct Decomposition {
  std::vector<Tree> big;
  std::vector<std::size_t> small;  // ascending
  double sigma = 0;                // input size sigma_0
  double mass = 0;                 // sum |R_T|
  double constant = 0;             // sigma^2 mass / |f|_2^2
  double residual_size = 0;
};

// Greedy Size Lemma loop: while the residual has size >= sigma0 / 2, move one
// maximal tree of size >= sigma0 / 2 into the big family, choosing the lowest
// top frequency, then leftmost I, then J, type and index. sigma0 defaults to
// the full i-size.
Decomposition size_decompose(const SizeContext& ctx, const SampledFunction& f, int i,
                             std::optional<double> sigma0 = {});

std::string to_json(const Decomposition& d, const TileCollection& s);

struct SingleTreeBound {
  double size;
  double bound;  // sup_{s in T} inf_{x in R_s} M_r f, dyadic maximal lower bound
  double ratio;
};

// Size of tree T measured in component i against the maximal-function bound.
SingleTreeBound single_tree_bound(const SizeContext& ctx, const Tree& t, const SampledFunction& f, int i, double r);

// sum over 2^{-n_i} <= sigma_i of 2^{-n1-n2-n3} min_i 2^{2 n_i} |f_i|_2^2, with
// the innermost sum done in closed form.
double lambda_bound(const std::array<double, 3>& sigma, const std::array<double, 3>& norms_sq);

struct ExceptionalResult {
  BitGrid residual;
  bool major;  // |E'| >= |E| / 2
  std::size_t removed;
};

// E' = E minus {M_{1+eps} 1_{F} >= c0 (|F| / |E|)^{1/(1+eps)}} for every
// reference set F. The tripling upper bound stands in for M, so the removal
// is a superset of the one for the true maximal function.
ExceptionalResult exceptional_set(const BitGrid& shrink, const std::vector<BitGrid>& refs, double eps,
                                  double c0 = 4);

}  // namespace bplab
