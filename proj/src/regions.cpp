#include "bplab/regions.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace bplab {

namespace {

const Rational kZero(0), kOne(1), kHalf(1, 2);

int sign(const Rational& q) { return q.numerator() > 0 ? 1 : (q.numerator() < 0 ? -1 : 0); }

// Points in the (alpha1, alpha2) chart.
struct P2 {
  Rational x, y;
  friend bool operator==(const P2&, const P2&) = default;
  friend bool operator<(const P2& a, const P2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }
};

P2 chart(const ExponentTriple& a) { return {a[0], a[1]}; }
ExponentTriple lift(const P2& p) { return ExponentTriple::from_pair(p.x, p.y); }

Rational cross(const P2& o, const P2& a, const P2& b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Strictly between a and b on their common line.
bool strictly_inside_segment(const P2& a, const P2& b, const P2& p) {
  Rational d = (p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y);
  Rational len = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y);
  return sign(d) > 0 && d < len;
}

// Counterclockwise hull without collinear points.
std::vector<P2> hull_points(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<P2> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && sign(cross(h[k - 2], h[k - 1], p)) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && sign(cross(h[k - 2], h[k - 1], pts[i])) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

Constraint lin(Rational a1, Rational a2, Rational a3, Rational b, std::string label, bool strict = true) {
  return Constraint{{a1, a2, a3}, b, strict, std::move(label)};
}

void add_pi0(std::vector<Constraint>& c) {
  c.push_back(lin(-1, 0, 0, 1, "alpha1 < 1"));
  c.push_back(lin(0, -1, 0, 1, "alpha2 < 1"));
  c.push_back(lin(0, 0, -1, 1, "alpha3 < 1"));
}

void add_positive12(std::vector<Constraint>& c) {
  c.push_back(lin(1, 0, 0, 0, "alpha1 > 0"));
  c.push_back(lin(0, 1, 0, 0, "alpha2 > 0"));
}

std::vector<Constraint> open_triangle(const std::array<ExponentTriple, 3>& v) {
  std::array<P2, 3> p{chart(v[0]), chart(v[1]), chart(v[2])};
  if (sign(cross(p[0], p[1], p[2])) < 0) std::swap(p[1], p[2]);
  std::vector<Constraint> c;
  for (int k = 0; k < 3; ++k) {
    const P2& a = p[static_cast<std::size_t>(k)];
    const P2& b = p[static_cast<std::size_t>((k + 1) % 3)];
    Rational dx = b.x - a.x, dy = b.y - a.y;
    c.push_back(lin(-dy, dx, 0, dy * a.x - dx * a.y,
                    "inside edge " + to_string(lift(a)) + " -> " + to_string(lift(b))));
  }
  return c;
}

void check_R(const Rational& R) {
  if (R < Rational(4, 3) || R > Rational(4)) throw std::invalid_argument("R must lie in [4/3, 4], got " + to_string(R));
}

Rational dual(const Rational& R) { return R / (R - 1); }

std::vector<Constraint> ar1_constraints(const Rational& R) {
  const Rational inv = kOne / R, c = abs(inv - kHalf);
  std::vector<Constraint> k;
  add_pi0(k);
  k.push_back(lin(1, 0, 0, 0, "alpha1 > 0"));
  k.push_back(lin(0, 1, 0, -inv, "alpha2 > 1/R"));
  // 1/2 - alpha1/2 - |alpha2 - 1/2| - |1/R - 1/2| > 0, both signs of the modulus
  k.push_back(lin(-kHalf, -1, 0, kOne - c, "1/2 - alpha1/2 - |alpha2 - 1/2| - |1/R - 1/2| > 0"));
  k.push_back(lin(-kHalf, 1, 0, -c, "1/2 - alpha1/2 - |alpha2 - 1/2| - |1/R - 1/2| > 0"));
  k.push_back(lin(-kHalf, 0, 0, inv - c, "|1/R - 1/2| + alpha1/2 < 1/R"));
  return k;
}

}  // namespace

ExponentTriple::ExponentTriple(Rational a1, Rational a2, Rational a3) : a_{a1, a2, a3} {
  if (a1 + a2 + a3 != kOne) throw std::invalid_argument("exponent triple must sum to 1");
}

std::string to_string(const ExponentTriple& a) {
  return "(" + to_string(a[0]) + ", " + to_string(a[1]) + ", " + to_string(a[2]) + ")";
}

ExponentTriple parse_triple(const std::string& text) {
  std::vector<Rational> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(parse_rational(item));
  if (v.size() != 3) throw std::invalid_argument("expected three comma-separated exponents, got '" + text + "'");
  return ExponentTriple(v[0], v[1], v[2]);
}

Classification classify_triple(const ExponentTriple& a) {
  Classification c{};
  int negative = 0;
  bool below_one = true, l2 = true;
  for (int i = 0; i < 3; ++i) {
    if (sign(a[i]) > 0) c.good.push_back(i + 1);
    else c.bad.push_back(i + 1);
    if (sign(a[i]) < 0) ++negative;
    if (a[i] >= kOne) below_one = false;
    if (!(sign(a[i]) > 0 && a[i] < kHalf)) l2 = false;
  }
  c.admissible = below_one && negative <= 1;
  c.pi0 = c.admissible;
  c.pi1 = c.admissible && c.bad.empty();
  c.pi2 = c.admissible && l2;
  return c;
}

bool Constraint::holds(const ExponentTriple& x) const {
  Rational v = a[0] * x[0] + a[1] * x[1] + a[2] * x[2] + b;
  return strict ? sign(v) > 0 : sign(v) >= 0;
}

bool Polygon::contains(const ExponentTriple& x) const {
  if (vertices.empty()) return false;
  const P2 p = chart(x);
  const std::size_t n = vertices.size();
  for (std::size_t k = 0; k < n; ++k)
    if (chart(vertices[k]) == p) return vertex_closed[k];
  bool boundary = false;
  for (std::size_t k = 0; k < n; ++k) {
    const P2 a = chart(vertices[k]), b = chart(vertices[(k + 1) % n]);
    int s = sign(cross(a, b, p));
    if (s < 0) return false;
    if (s == 0) {
      if (strictly_inside_segment(a, b, p)) return edge_closed[k];
      boundary = true;
    }
  }
  // On an edge line but outside every edge segment only happens outside.
  return !boundary;
}

bool Region::contains(const ExponentTriple& x) const {
  if (shape) return shape->contains(x);
  return std::all_of(constraints.begin(), constraints.end(), [&](const Constraint& c) { return c.holds(x); });
}

std::optional<std::string> Region::violation(const ExponentTriple& x) const {
  if (shape) return shape->contains(x) ? std::nullopt : std::optional<std::string>(id + " hull");
  for (const auto& c : constraints)
    if (!c.holds(x)) return c.label;
  return std::nullopt;
}

bool region_needs_R(const std::string& id) {
  return id == "AR" || id == "A_R" || id == "AR1" || id == "AR2" || id == "AR_hull";
}

Region make_region(const std::string& raw, std::optional<Rational> R) {
  const std::string id = raw == "A_R" ? "AR" : raw;
  Region r{id, {}, {}, {}};
  if (region_needs_R(id)) {
    if (!R) throw std::invalid_argument("region " + id + " needs the parameter R");
    check_R(*R);
    r.R = R;
  }
  auto& c = r.constraints;
  if (id == "pi0") {
    add_pi0(c);
  } else if (id == "pi1") {
    add_pi0(c);
    add_positive12(c);
    c.push_back(lin(0, 0, 1, 0, "alpha3 > 0"));
  } else if (id == "pi2") {
    for (int i = 0; i < 3; ++i) {
      std::array<Rational, 3> e{0, 0, 0};
      e[static_cast<std::size_t>(i)] = 1;
      const std::string name = "alpha" + std::to_string(i + 1);
      c.push_back(lin(e[0], e[1], e[2], 0, name + " > 0"));
      c.push_back(lin(-e[0], -e[1], -e[2], kHalf, name + " < 1/2"));
    }
  } else if (id == "main" || id == "T1" || id == "T2" || id == "T3") {
    add_pi0(c);
    add_positive12(c);
    if (id == "main" || id == "T1") c.push_back(lin(-1, -2, 0, 2, "1/p + 2/q < 2"));
    if (id == "main" || id == "T2") c.push_back(lin(-2, -1, 0, 2, "2/p + 1/q < 2"));
    if (id == "T3") c.push_back(lin(0, 0, 1, kHalf, "r > 2/3"));
  } else if (id == "A") {
    c = open_triangle({ExponentTriple(Rational(-1, 2), 1, kHalf), ExponentTriple(Rational(-1, 2), kHalf, 1),
                       ExponentTriple(0, kHalf, kHalf)});
  } else if (id == "B") {
    c = open_triangle({ExponentTriple(1, Rational(-1, 2), kHalf), ExponentTriple(kHalf, 0, kHalf),
                       ExponentTriple(0, 0, 1)});
  } else if (id == "Aprime") {
    c = open_triangle({ExponentTriple(0, kHalf, kHalf), ExponentTriple(Rational(-1, 2), 1, kHalf),
                       ExponentTriple(Rational(-1, 4), kHalf, Rational(3, 4))});
  } else if (id == "AR") {
    const Rational d = abs(kHalf - kOne / *R);
    add_pi0(c);
    c.push_back(lin(1, 0, 0, 0, "alpha1 > 0"));
    c.push_back(lin(-1, 0, 0, kOne - 4 * d, "alpha1 < 1 - 4|1/2 - 1/R|"));
    c.push_back(lin(0, -1, 1, kOne - 2 * d, "|alpha2 - alpha3| < 1 - 2|1/2 - 1/R|"));
    c.push_back(lin(0, 1, -1, kOne - 2 * d, "|alpha2 - alpha3| < 1 - 2|1/2 - 1/R|"));
  } else if (id == "AR1") {
    c = ar1_constraints(*R);
  } else if (id == "AR2") {
    // alpha in AR2 iff (alpha1, alpha3, alpha2) in AR1 at the dual exponent.
    for (auto k : ar1_constraints(dual(*R))) {
      std::swap(k.a[1], k.a[2]);
      k.label = "swapped (R'): " + k.label;
      c.push_back(std::move(k));
    }
  } else if (id == "AR_hull") {
    Region h = hull_region(id, {make_region("AR1", R), make_region("AR2", R)});
    h.R = R;
    return h;
  } else {
    throw std::invalid_argument("unknown region '" + raw + "'");
  }
  return r;
}

bool region_membership(const std::string& id, std::optional<Rational> R, const ExponentTriple& x) {
  return make_region(id, R).contains(x);
}

Polygon region_polygon(const Region& r) {
  if (r.shape) return *r.shape;
  // Closure vertices: pairwise intersections of boundary lines that satisfy
  // every inequality in its closed form.
  struct Line {
    Rational c1, c2, c0;
  };
  std::vector<Line> lines;
  for (const auto& k : r.constraints)
    lines.push_back({k.a[0] - k.a[2], k.a[1] - k.a[2], k.a[2] + k.b});
  std::vector<P2> pts;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const Line &l = lines[i], &m = lines[j];
      Rational det = l.c1 * m.c2 - l.c2 * m.c1;
      if (sign(det) == 0) continue;
      P2 p{(l.c2 * m.c0 - l.c0 * m.c2) / det, (m.c1 * l.c0 - l.c1 * m.c0) / det};
      bool ok = std::all_of(lines.begin(), lines.end(),
                            [&](const Line& q) { return sign(q.c1 * p.x + q.c2 * p.y + q.c0) >= 0; });
      if (ok) pts.push_back(p);
    }
  }
  auto h = hull_points(pts);
  Polygon out;
  if (h.size() < 3) return out;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const P2& a = h[k];
    const P2& b = h[(k + 1) % h.size()];
    out.vertices.push_back(lift(a));
    out.vertex_closed.push_back(r.contains(lift(a)));
    out.edge_closed.push_back(r.contains(lift(P2{(a.x + b.x) / 2, (a.y + b.y) / 2})));
  }
  return out;
}

std::vector<ExponentTriple> simplex_grid(const Rational& step) {
  if (sign(step) <= 0 || step.numerator() != 1) throw std::invalid_argument("grid step must be 1/n");
  const std::int64_t n = step.denominator();
  std::vector<ExponentTriple> out;
  for (std::int64_t a = -n; a <= n; ++a)
    for (std::int64_t b = -n; b <= n; ++b) {
      Rational a1(a, n), a2(b, n), a3 = kOne - a1 - a2;
      if (a3 >= Rational(-1) && a3 <= kOne) out.emplace_back(a1, a2, a3);
    }
  return out;
}

std::vector<ExponentTriple> polygon_disagreement(const Region& r, const Rational& step) {
  const Polygon p = region_polygon(r);
  std::vector<ExponentTriple> bad;
  for (const auto& x : simplex_grid(step))
    if (p.contains(x) != r.contains(x)) bad.push_back(x);
  return bad;
}

ExponentTriple geometric_mean_combine(const ExponentTriple& a, const ExponentTriple& b, const Rational& theta) {
  if (sign(theta) <= 0 || theta >= kOne) throw std::invalid_argument("theta must lie in (0, 1)");
  const Rational s = kOne - theta;
  return {s * a[0] + theta * b[0], s * a[1] + theta * b[1], s * a[2] + theta * b[2]};
}

std::pair<Rational, Rational> constant_exponents(const Rational& theta) {
  if (sign(theta) <= 0 || theta >= kOne) throw std::invalid_argument("theta must lie in (0, 1)");
  return {kOne - theta, theta};
}

MixedTuple geometric_mean_combine(const MixedTuple& a, const MixedTuple& b, const Rational& theta) {
  return {geometric_mean_combine(a.inner, b.inner, theta), geometric_mean_combine(a.outer, b.outer, theta)};
}

Polygon convex_hull(const std::vector<ExponentTriple>& points) {
  std::vector<P2> pts;
  for (const auto& p : points) pts.push_back(chart(p));
  auto h = hull_points(pts);
  Polygon out;
  if (h.size() < 3) return out;
  for (const auto& p : h) out.vertices.push_back(lift(p));
  out.vertex_closed.assign(h.size(), true);
  out.edge_closed.assign(h.size(), true);
  return out;
}

Polygon convex_hull(const std::vector<Polygon>& sets) {
  std::vector<P2> pts;
  for (const auto& s : sets)
    for (const auto& v : s.vertices) pts.push_back(chart(v));
  auto h = hull_points(pts);
  Polygon out;
  if (h.size() < 3) return out;
  auto member = [&](const P2& p) {
    return std::any_of(sets.begin(), sets.end(), [&](const Polygon& s) { return s.contains(lift(p)); });
  };
  for (std::size_t k = 0; k < h.size(); ++k) {
    const P2 u = h[k], v = h[(k + 1) % h.size()];
    const Rational len = (v.x - u.x) * (v.x - u.x) + (v.y - u.y) * (v.y - u.y);
    auto param = [&](const P2& p) { return ((p.x - u.x) * (v.x - u.x) + (p.y - u.y) * (v.y - u.y)) / len; };
    // Included pieces of the inputs on the supporting line, as parameters.
    std::optional<Rational> lo, hi;
    bool lo_in = false, hi_in = false;
    auto take = [&](const Rational& t, bool closed) {
      if (!lo || t < *lo) { lo = t; lo_in = closed; }
      else if (t == *lo) lo_in = lo_in || closed;
      if (!hi || t > *hi) { hi = t; hi_in = closed; }
      else if (t == *hi) hi_in = hi_in || closed;
    };
    for (const auto& s : sets) {
      const std::size_t n = s.vertices.size();
      for (std::size_t i = 0; i < n; ++i) {
        const P2 a = chart(s.vertices[i]), b = chart(s.vertices[(i + 1) % n]);
        const bool a_on = sign(cross(u, v, a)) == 0, b_on = sign(cross(u, v, b)) == 0;
        if (a_on && s.vertex_closed[i]) take(param(a), true);
        if (a_on && b_on && s.edge_closed[i]) {
          // The open edge contributes its end points as limits only.
          take(param(a), false);
          take(param(b), false);
        }
      }
    }
    out.vertices.push_back(lift(u));
    out.vertex_closed.push_back(member(u));
    if (!lo) {
      out.edge_closed.push_back(false);
      continue;
    }
    const bool reaches_u = sign(*lo) == 0, reaches_v = *hi == kOne;
    if (reaches_u && reaches_v) {
      out.edge_closed.push_back(true);
      continue;
    }
    // Partial cover: split the edge at the ends of the covered interval.
    auto at = [&](const Rational& t) { return P2{u.x + t * (v.x - u.x), u.y + t * (v.y - u.y)}; };
    if (!reaches_u) {
      out.edge_closed.push_back(false);
      out.vertices.push_back(lift(at(*lo)));
      out.vertex_closed.push_back(lo_in);
    }
    if (*hi == *lo && !reaches_u) {
      out.edge_closed.push_back(false);
      continue;
    }
    if (!reaches_v) {
      out.edge_closed.push_back(true);
      out.vertices.push_back(lift(at(*hi)));
      out.vertex_closed.push_back(hi_in);
      out.edge_closed.push_back(false);
    } else {
      out.edge_closed.push_back(true);
    }
  }
  return out;
}

Region hull_region(const std::string& id, const std::vector<Region>& parts) {
  std::vector<Polygon> polys;
  for (const auto& p : parts) polys.push_back(region_polygon(p));
  return Region{id, {}, {}, convex_hull(polys)};
}

bool bold_AR_membership(const Rational& R, const MixedTuple& x) {
  const Region ar = make_region("AR", R);
  return x.inner == ExponentTriple(0, kOne / R, kOne - kOne / R) && ar.contains(x.outer);
}

bool cal_AR_membership(const Rational& R, const MixedTuple& x) {
  return bold_AR_membership(R, x) || bold_AR_membership(R, x.bar());
}

bool mixed_hull_membership(const Rational& R, const MixedTuple& x) {
  const Region ar = make_region("AR", R);
  const Rational inv = kOne / R;
  if (x.inner[2] != kOne - inv || sign(x.inner[0]) < 0 || sign(x.inner[1]) < 0) return false;
  const Rational t = x.inner[0] * R;
  if (sign(t) == 0) return ar.contains(x.outer);
  if (t == kOne) return ar.contains(x.outer.bar());
  const Polygon p = region_polygon(ar);
  if (p.empty()) return false;
  std::vector<ExponentTriple> sums;
  for (const auto& v : p.vertices)
    for (const auto& w : p.vertices) {
      const auto wb = w.bar();
      sums.emplace_back((kOne - t) * v[0] + t * wb[0], (kOne - t) * v[1] + t * wb[1], (kOne - t) * v[2] + t * wb[2]);
    }
  Polygon slice = convex_hull(sums);
  // The slice is a Minkowski combination of open sets, hence open.
  slice.vertex_closed.assign(slice.vertices.size(), false);
  slice.edge_closed.assign(slice.vertices.size(), false);
  return slice.contains(x.outer);
}

std::string polygon_json(const Region& r, const Polygon& p) {
  nlohmann::json j;
  j["id"] = r.id;
  if (r.R) j["R"] = to_string(*r.R);
  auto verts = nlohmann::json::array();
  for (const auto& v : p.vertices) verts.push_back({to_string(v[0]), to_string(v[1]), to_string(v[2])});
  j["vertices"] = verts;
  j["vertex_closed"] = p.vertex_closed;
  j["edge_closed"] = p.edge_closed;
  return j.dump(2);
}

std::string figure_svg(const std::vector<std::pair<std::string, Polygon>>& layers) {
  const double unit = 100, margin = 60;
  auto fx = [&](double a1, double a3) { return margin + unit * (2 * (1 - a1) + (1 - a3)); };
  auto fy = [&](double a3) { return margin + unit * std::sqrt(3.0) * (1 - a3); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  std::ostringstream os;
  const double w = 2 * margin + 4 * unit, h = 2 * margin + 2 * std::sqrt(3.0) * unit;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h) << "\">\n";
  // Level lines alpha_i = c inside the triangle alpha_i <= 1.
  for (int i = 0; i < 3; ++i) {
    for (double c : {-0.5, 0.0, 0.5, 1.0}) {
      std::array<double, 3> p{}, q{};
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      p[static_cast<std::size_t>(i)] = q[static_cast<std::size_t>(i)] = c;
      p[static_cast<std::size_t>(j)] = 1;
      p[static_cast<std::size_t>(k)] = -c;
      q[static_cast<std::size_t>(j)] = -c;
      q[static_cast<std::size_t>(k)] = 1;
      os << "  <line x1=\"" << num(fx(p[0], p[2])) << "\" y1=\"" << num(fy(p[2])) << "\" x2=\"" << num(fx(q[0], q[2]))
         << "\" y2=\"" << num(fy(q[2])) << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    }
  }
  for (const auto& [label, poly] : layers) {
    if (poly.empty()) continue;
    os << "  <polygon points=\"";
    double cx = 0, cy = 0;
    for (std::size_t k = 0; k < poly.vertices.size(); ++k) {
      const auto& v = poly.vertices[k];
      const double x = fx(to_double(v[0]), to_double(v[2])), y = fy(to_double(v[2]));
      cx += x;
      cy += y;
      os << (k ? " " : "") << num(x) << "," << num(y);
    }
    const auto n = static_cast<double>(poly.vertices.size());
    os << "\" fill=\"gray\" fill-opacity=\"0.5\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    os << "  <text x=\"" << num(cx / n) << "\" y=\"" << num(cy / n) << "\" font-size=\"12\">" << label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace bplab
