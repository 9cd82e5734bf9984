#include "bplab/regions.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace bplab;

namespace {

using R3 = ExponentTriple;
Rational q(std::int64_t a, std::int64_t b = 1) { return Rational(a, b); }
const Rational kHalf(1, 2);

Rational absq(const Rational& x) { return x < Rational(0) ? -x : x; }

bool admissible(const R3& a) {
  int neg = 0;
  for (int i = 0; i < 3; ++i) {
    if (a[i] >= Rational(1)) return false;
    if (a[i] < Rational(0)) ++neg;
  }
  return neg <= 1;
}

// Inequalities written straight from the theorem statements.
bool main_range(const R3& a) {
  return admissible(a) && a[0] > Rational(0) && a[1] > Rational(0) && a[0] + 2 * a[1] < Rational(2) &&
         2 * a[0] + a[1] < Rational(2);
}

bool ar_closed_form(const Rational& R, const R3& a) {
  const Rational d = absq(kHalf - Rational(1) / R);
  return admissible(a) && a[0] > Rational(0) && a[0] < 1 - 4 * d && absq(a[1] - a[2]) < 1 - 2 * d;
}

std::set<std::pair<Rational, Rational>> chart_set(const Polygon& p) {
  std::set<std::pair<Rational, Rational>> s;
  for (const auto& v : p.vertices) s.insert({v[0], v[1]});
  return s;
}

}  // namespace

TEST_CASE("classify triples") {
  auto c = classify_triple(R3(q(1, 3), q(1, 3), q(1, 3)));
  CHECK(c.admissible);
  CHECK(c.pi1);
  CHECK(c.pi2);
  c = classify_triple(R3(kHalf, kHalf, 0));
  CHECK(c.admissible);
  CHECK(c.bad == std::vector<int>{3});
  CHECK(!c.pi1);
  CHECK(!c.pi2);
  c = classify_triple(R3(q(-1, 4), q(3, 4), kHalf));
  CHECK(c.admissible);
  CHECK(c.pi0);
  CHECK(!c.pi1);
  CHECK(c.good == std::vector<int>{2, 3});
  c = classify_triple(R3(q(-1, 4), q(-1, 4), q(3, 2)));
  CHECK(!c.admissible);
  CHECK_THROWS_AS(R3(q(1, 2), q(1, 2), q(1, 2)), std::invalid_argument);
}

TEST_CASE("membership examples") {
  CHECK(region_membership("main", {}, R3(q(1, 3), q(1, 3), q(1, 3))));
  CHECK(region_membership("AR", Rational(2), R3(kHalf, q(1, 4), q(1, 4))));
  CHECK(region_membership("A_R", Rational(2), R3(kHalf, q(1, 4), q(1, 4))));
  CHECK(!region_membership("AR", q(4, 3), R3(q(1, 4), q(1, 4), kHalf)));
  CHECK(!region_membership("AR", q(4), R3(q(1, 4), q(1, 4), kHalf)));
  CHECK(!region_membership("A", {}, R3(-kHalf, 1 - q(1, 1000000), kHalf + q(1, 1000000))));
  CHECK(!region_membership("A", {}, R3(-kHalf, kHalf, Rational(1) - Rational(0))));
  CHECK(region_membership("A", {}, R3(q(-1, 3), q(2, 3), q(2, 3))));
  CHECK_THROWS_AS(make_region("AR", q(5)), std::invalid_argument);
  CHECK_THROWS_AS(make_region("AR"), std::invalid_argument);
  CHECK_THROWS_AS(make_region("nosuch"), std::invalid_argument);
  auto r = make_region("main");
  auto v = r.violation(R3(q(9, 10), q(9, 10), q(-4, 5)));
  REQUIRE(v.has_value());
  CHECK(!v->empty());
}

TEST_CASE("polygons of named regions") {
  auto pi2 = region_polygon(make_region("pi2"));
  CHECK(chart_set(pi2) == std::set<std::pair<Rational, Rational>>{{kHalf, kHalf}, {kHalf, 0}, {0, kHalf}});
  CHECK(std::none_of(pi2.edge_closed.begin(), pi2.edge_closed.end(), [](bool b) { return b; }));
  auto b = region_polygon(make_region("B"));
  CHECK(chart_set(b) == std::set<std::pair<Rational, Rational>>{{1, -kHalf}, {kHalf, 0}, {0, 0}});
  // A^2: 0 < alpha1 < 1 and |alpha2 - alpha3| < 1 inside pi0.
  auto a2 = region_polygon(make_region("AR", Rational(2)));
  CHECK(chart_set(a2) == std::set<std::pair<Rational, Rational>>{{0, 0}, {0, 1}, {1, -kHalf}, {1, kHalf}});
  for (const auto& id : {"pi0", "pi1", "pi2", "main", "T1", "T2", "T3", "A", "B", "Aprime"})
    CHECK(polygon_disagreement(make_region(id), q(1, 64)).empty());
  for (const auto& R : {q(3, 2), q(2), q(3), q(7, 4)})
    for (const auto& id : {"AR", "AR1", "AR2", "AR_hull"})
      CHECK(polygon_disagreement(make_region(id, R), q(1, 64)).empty());
}

TEST_CASE("region predicates agree with the closed forms on the 1/64 grid") {
  const auto grid = simplex_grid(q(1, 64));
  REQUIRE(grid.size() > 1000);
  const auto main = make_region("main"), t1 = make_region("T1"), t2 = make_region("T2"), t3 = make_region("T3");
  for (const auto& a : grid) {
    CHECK(main.contains(a) == main_range(a));
    CHECK(main.contains(a) == (t1.contains(a) && t2.contains(a) && t3.contains(a)));
  }
  for (const auto& R : {q(3, 2), q(2), q(5, 2), q(7, 2)}) {
    const Rational Rp = R / (R - 1);
    const auto ar = make_region("AR", R), hull = make_region("AR_hull", R);
    const auto ar1p = make_region("AR1", Rp), ar2 = make_region("AR2", R);
    for (const auto& a : grid) {
      CHECK(ar.contains(a) == ar_closed_form(R, a));
      CHECK(hull.contains(a) == ar.contains(a));
      CHECK(ar2.contains(a) == ar1p.contains(a.swap23()));
    }
  }
}

TEST_CASE("bar and swap are involutions") {
  const R3 a(q(-1, 5), q(7, 10), kHalf);
  CHECK(a.bar().bar() == a);
  CHECK(a.swap23().swap23() == a);
  MixedTuple m{R3(0, kHalf, kHalf), a};
  CHECK(m.bar().bar() == m);
}

TEST_CASE("convex hulls") {
  std::vector<R3> pts{R3(0, 0, 1), R3(1, 0, 0), R3(0, 1, 0)};
  auto tri = convex_hull(pts);
  CHECK(chart_set(tri) == std::set<std::pair<Rational, Rational>>{{0, 0}, {1, 0}, {0, 1}});
  pts.push_back(R3(q(1, 4), q(1, 4), kHalf));
  CHECK(chart_set(convex_hull(pts)) == chart_set(tri));
  CHECK(convex_hull(std::vector<R3>{}).empty());

  const auto a = region_polygon(make_region("A")), b = region_polygon(make_region("B"));
  auto h = convex_hull(std::vector<Polygon>{a});
  CHECK(chart_set(h) == chart_set(a));
  auto hh = convex_hull(std::vector<Polygon>{h});
  CHECK(chart_set(hh) == chart_set(h));
  auto ab = convex_hull(std::vector<Polygon>{a, b});
  for (const auto& x : simplex_grid(q(1, 32)))
    if (a.contains(x) || b.contains(x)) CHECK(ab.contains(x));
}

TEST_CASE("geometric means") {
  const R3 a(q(1, 5), q(3, 10), kHalf);
  CHECK(geometric_mean_combine(a, a, q(2, 7)) == a);
  CHECK(geometric_mean_combine(R3(0, kHalf, kHalf), R3(kHalf, kHalf, 0), kHalf) == R3(q(1, 4), kHalf, q(1, 4)));
  CHECK(constant_exponents(q(1, 3)) == std::pair{q(2, 3), q(1, 3)});
  CHECK_THROWS_AS(geometric_mean_combine(a, a, 0), std::invalid_argument);
  CHECK_THROWS_AS(constant_exponents(1), std::invalid_argument);
  MixedTuple m{R3(0, kHalf, kHalf), a}, n{R3(kHalf, 0, kHalf), a.bar()};
  auto c = geometric_mean_combine(m, n, kHalf);
  CHECK(c.inner == R3(q(1, 4), q(1, 4), kHalf));
  CHECK(c.outer == R3(q(1, 4), q(1, 4), kHalf));
}

TEST_CASE("vector-valued exponent sets") {
  const Rational R = 2;
  const R3 inner(0, kHalf, kHalf), x(kHalf, q(1, 4), q(1, 4));
  CHECK(bold_AR_membership(R, {inner, x}));
  CHECK(!bold_AR_membership(R, {R3(kHalf, 0, kHalf), x}));
  CHECK(cal_AR_membership(R, MixedTuple{inner, x}.bar()));
  // Midpoint of a tuple and its bar lies in the hull but not in the union.
  auto mid = geometric_mean_combine(MixedTuple{inner, x}, MixedTuple{inner, x}.bar(), kHalf);
  CHECK(mixed_hull_membership(R, mid));
  CHECK(!cal_AR_membership(R, mid));
  // alpha1 = -3/10 would need a bar(A^2) point with alpha1 < -3/5.
  CHECK(!mixed_hull_membership(R, {R3(q(1, 4), q(1, 4), kHalf), R3(q(-3, 10), q(3, 5), q(7, 10))}));
}

TEST_CASE("figure export") {
  auto svg = figure_svg({{"pi2", region_polygon(make_region("pi2"))}});
  CHECK(svg.find("<svg") != std::string::npos);
  auto json = polygon_json(make_region("pi2"), region_polygon(make_region("pi2")));
  CHECK(json.find("vertices") != std::string::npos);
}
