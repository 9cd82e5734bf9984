#pragma once

#include "bplab/rational.hpp"

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bplab {

// (alpha1, alpha2, alpha3) = (1/p, 1/q, 1/r') on the plane alpha1 + alpha2 + alpha3 = 1.
class ExponentTriple {
 public:
  ExponentTriple(Rational a1, Rational a2, Rational a3);
  // Third coordinate from the simplex identity.
  static ExponentTriple from_pair(Rational a1, Rational a2) { return {a1, a2, Rational(1) - a1 - a2}; }
  const Rational& operator[](int i) const { return a_[static_cast<std::size_t>(i)]; }
  // (alpha2, alpha1, alpha3)
  ExponentTriple bar() const { return {a_[1], a_[0], a_[2]}; }
  // (alpha1, alpha3, alpha2)
  ExponentTriple swap23() const { return {a_[0], a_[2], a_[1]}; }
  friend bool operator==(const ExponentTriple&, const ExponentTriple&) = default;

 private:
  std::array<Rational, 3> a_;
};

std::string to_string(const ExponentTriple& a);
// "a,b,c" with rational or decimal entries.
ExponentTriple parse_triple(const std::string& text);

struct Classification {
  bool admissible;
  std::vector<int> good;  // 1-based indices with alpha_i > 0
  std::vector<int> bad;   // alpha_i <= 0
  bool pi0, pi1, pi2;
};
Classification classify_triple(const ExponentTriple& a);

// a . alpha + b > 0 (strict) or >= 0.
struct Constraint {
  std::array<Rational, 3> a;
  Rational b;
  bool strict = true;
  std::string label;
  bool holds(const ExponentTriple& x) const;
};

// Closure vertices counterclockwise in the (alpha1, alpha2) chart, with flags
// saying which vertices and open edges (v_k, v_k+1) belong to the set. A set
// with empty interior has no vertices.
struct Polygon {
  std::vector<ExponentTriple> vertices;
  std::vector<bool> vertex_closed;
  std::vector<bool> edge_closed;
  bool empty() const { return vertices.empty(); }
  bool contains(const ExponentTriple& x) const;
};

// Either an intersection of half-planes or, for hulls, a polygon.
struct Region {
  std::string id;
  std::optional<Rational> R;
  std::vector<Constraint> constraints;
  std::optional<Polygon> shape;
  bool contains(const ExponentTriple& x) const;
  // Label of the first failed inequality, if any.
  std::optional<std::string> violation(const ExponentTriple& x) const;
};

// Identifiers: pi0, pi1, pi2, main, T1, T2, T3, A, B, Aprime, AR, AR1, AR2 and
// AR_hull = Convex(AR1 u AR2). A_R is accepted as a spelling of AR. The AR
// family takes R in [4/3, 4]; at the end points AR is empty.
bool region_needs_R(const std::string& id);
Region make_region(const std::string& id, std::optional<Rational> R = {});
bool region_membership(const std::string& id, std::optional<Rational> R, const ExponentTriple& x);

Polygon region_polygon(const Region& r);

// Points of the step grid alpha1, alpha2 in k * step, alpha3 in [-1, 1].
std::vector<ExponentTriple> simplex_grid(const Rational& step);
// Grid points where predicate and polygon disagree.
std::vector<ExponentTriple> polygon_disagreement(const Region& r, const Rational& step);

ExponentTriple geometric_mean_combine(const ExponentTriple& a, const ExponentTriple& b, const Rational& theta);
// Exponents of K1 and K2 in K1^{1-theta} K2^theta.
std::pair<Rational, Rational> constant_exponents(const Rational& theta);

// Closed hull of finitely many points, and the hull of polygonal sets with
// boundary membership carried over from the inputs.
Polygon convex_hull(const std::vector<ExponentTriple>& points);
Polygon convex_hull(const std::vector<Polygon>& sets);
Region hull_region(const std::string& id, const std::vector<Region>& parts);

// (inner, outer) = ((1/P, 1/Q, 1/R'), (1/p, 1/q, 1/r')).
struct MixedTuple {
  ExponentTriple inner;
  ExponentTriple outer;
  MixedTuple bar() const { return {inner.bar(), outer.bar()}; }
  friend bool operator==(const MixedTuple&, const MixedTuple&) = default;
};
MixedTuple geometric_mean_combine(const MixedTuple& a, const MixedTuple& b, const Rational& theta);

// Bold A^R: inner = (0, 1/R, 1/R'), outer in A^R.
bool bold_AR_membership(const Rational& R, const MixedTuple& x);
// Calligraphic A^R: the tuple or its bar lies in bold A^R.
bool cal_AR_membership(const Rational& R, const MixedTuple& x);
// Convex(calligraphic A^R). The inner part must lie on the segment between
// (0, 1/R, 1/R') and (1/R, 0, 1/R'); at parameter t the outer slice is the
// Minkowski combination (1 - t) A^R + t bar(A^R).
bool mixed_hull_membership(const Rational& R, const MixedTuple& x);

std::string polygon_json(const Region& r, const Polygon& p);
// Ternary plot in the figure layout: X = 2(1 - a1) + (1 - a3), Y = -sqrt3 (1 - a3).
std::string figure_svg(const std::vector<std::pair<std::string, Polygon>>& layers);

}  // namespace bplab
