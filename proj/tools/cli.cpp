#include "cli.hpp"

#include "bplab/errors.hpp"
#include "bplab/normprobe.hpp"
#include "bplab/operators.hpp"
#include "bplab/regions.hpp"
#include "bplab/tilegen.hpp"
#include "bplab/timefreq.hpp"
#include "bplab/wavepacket.hpp"

#include <CLI11.hpp>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace bplab::cli {

using nlohmann::json;

namespace {

enum class Kind { str, integer, number, any, int_list, str_list };

struct Field {
  std::string name;
  Kind kind;
  json def;  // null: optional without default
  std::string help;
};

std::vector<Field> schema(const std::string& command) {
  std::vector<Field> f{{"output", Kind::str, "", "output path (stdout when empty)"},
                       {"seed", Kind::integer, 1, "seed for every random choice"}};
  auto add = [&](std::initializer_list<Field> more) { f.insert(f.end(), more); };
  if (command == "lp-decompose") {
    add({{"f", Kind::any, "gaussian", "test family (name or JSON object)"},
         {"input", Kind::str, "", "binary function file instead of f"},
         {"grid", Kind::any, nullptr, "grid object {dim, nx, ny, period_x, period_y}"},
         {"axis", Kind::integer, 0, "1 = x, 2 = y, 0 = last axis"},
         {"jmin", Kind::integer, nullptr, "lowest scale"},
         {"jmax", Kind::integer, nullptr, "highest scale"},
         {"pieces_dir", Kind::str, "", "directory for the binary pieces"},
         {"tolerance", Kind::number, 1e-10, "telescoping tolerance"}});
  } else if (command == "apply-op") {
    add({{"kind", Kind::str, "bht", "bht paraproduct bp bp-single double-bht bp-tensor biparam-paraproduct"},
         {"scale", Kind::integer, 0, "j for bp-single"},
         {"f", Kind::any, "gaussian", "first input family"},
         {"g", Kind::any, "gaussian", "second input family"},
         {"f_input", Kind::str, "", "binary file for f"},
         {"g_input", Kind::str, "", "binary file for g"},
         {"grid", Kind::any, nullptr, "grid object"}});
  } else if (command == "model-sum") {
    add({{"collection", Kind::str, "", "collection file (generated when empty)"},
         {"count", Kind::integer, 100, "tiles to generate"},
         {"collection_spec", Kind::any, json::object(), "generator parameters"},
         {"f", Kind::any, "gaussian", "first input family"},
         {"g", Kind::any, "gaussian", "second input family"},
         {"h", Kind::any, nullptr, "dual function for the adjoint check"},
         {"eps", Kind::str, "ones", "ones, signs or phases"},
         {"filter", Kind::str, "all", "all, component or scale"},
         {"filter_value", Kind::integer, 0, "component or scale for the filter"},
         {"tolerance", Kind::number, 1e-10, "relative adjoint tolerance"}});
  } else if (command == "size-decompose") {
    add({{"collection", Kind::str, "", "collection file (generated when empty)"},
         {"count", Kind::integer, 60, "tiles to generate"},
         {"collection_spec", Kind::any, json::object(), "generator parameters"},
         {"f", Kind::any, "trig", "function family"},
         {"index", Kind::integer, 1, "component i"},
         {"sigma0", Kind::number, nullptr, "input size (default: measured size)"}});
  } else if (command == "region") {
    add({{"mode", Kind::str, nullptr, "membership, polygon or figure"},
         {"id", Kind::str, "main", "region identifier"},
         {"ids", Kind::str_list, nullptr, "regions drawn by figure"},
         {"R", Kind::str, nullptr, "inner exponent for the A^R family"},
         {"point", Kind::str, nullptr, "triple a1,a2,a3"},
         {"step", Kind::str, "1/64", "grid step of the round-trip check"}});
  } else if (command == "probe") {
    add({{"mode", Kind::str, "scalar", "scalar or vector"},
         {"op", Kind::str, "bht", "operator for scalar probes"},
         {"exponents", Kind::str, nullptr, "p,q,r"},
         {"levels", Kind::integer, nullptr, "refinement levels"},
         {"base", Kind::any, nullptr, "level 0 grid"},
         {"candidates", Kind::any, nullptr, "array of {name, f, g}"},
         {"steps", Kind::integer, nullptr, "local search steps per level"},
         {"amplitude", Kind::number, 0.25, "relative perturbation size"},
         {"R", Kind::number, 2, "inner exponent (vector mode)"},
         {"theorem", Kind::str, "AR", "AR or pi2 (vector mode)"},
         {"bands", Kind::int_list, json::array({0, 1, 2, 3}), "scales j (vector mode)"},
         {"contrast", Kind::str, nullptr, "exponents p,q,r run without the region check"},
         {"format", Kind::str, "csv", "csv or json"}});
  } else {
    throw UsageError("unknown command '" + command + "'");
  }
  return f;
}

double parse_number(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  if (s.find('/') != std::string::npos) return to_double(parse_rational(s));
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: " + s);
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

// Converts a command-line string to the field's JSON type.
json from_flag(const Field& f, const std::string& v) {
  try {
    switch (f.kind) {
      case Kind::str: return v;
      case Kind::integer: {
        std::size_t used = 0;
        long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
      }
      case Kind::number: return parse_number(v);
      case Kind::any: return !v.empty() && (v[0] == '{' || v[0] == '[') ? json::parse(v) : json(v);
      case Kind::int_list: {
        json a = json::array();
        for (const auto& s : split(v)) a.push_back(std::stoll(s));
        return a;
      }
      case Kind::str_list: return split(v);
    }
  } catch (const std::exception&) {
  }
  throw UsageError("field '" + f.name + "': cannot parse '" + v + "'");
}

void check_type(const Field& f, json& v) {
  auto bad = [&](const char* want) { throw UsageError("field '" + f.name + "' must be " + want); };
  switch (f.kind) {
    case Kind::str:
      if (v.is_number()) v = v.dump();
      if (!v.is_string()) bad("a string");
      break;
    case Kind::integer:
      if (!v.is_number_integer()) bad("an integer");
      break;
    case Kind::number:
      if (v.is_string()) v = from_flag(f, v.get<std::string>());
      if (!v.is_number()) bad("a number");
      break;
    case Kind::any: break;
    case Kind::int_list:
      if (!v.is_array()) bad("an array of integers");
      for (const auto& e : v)
        if (!e.is_number_integer()) bad("an array of integers");
      break;
    case Kind::str_list:
      if (v.is_string()) v = split(v.get<std::string>());
      if (!v.is_array()) bad("an array of strings");
      for (const auto& e : v)
        if (!e.is_string()) bad("an array of strings");
      break;
  }
}

// Typed readers for nested objects; unknown keys are named in the error.
void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw UsageError("'" + where + "' must be an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw UsageError("unknown key '" + where + "." + k + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError("field '" + where + "." + key + "' has the wrong type");
  }
}

TestFamily family_from_json(const json& j, const std::string& where) {
  TestFamily f;
  if (j.is_string()) {
    f.kind = j.get<std::string>();
    return f;
  }
  reject_unknown(j, where,
                 {"kind", "center", "width", "frequency", "rate", "lo", "hi", "degree", "seed", "level_scaled",
                  "pin_band", "factors"});
  read(j, "kind", f.kind, where);
  read(j, "center", f.center, where);
  read(j, "width", f.width, where);
  read(j, "frequency", f.frequency, where);
  read(j, "rate", f.rate, where);
  read(j, "lo", f.lo, where);
  read(j, "hi", f.hi, where);
  read(j, "degree", f.degree, where);
  read(j, "seed", f.seed, where);
  read(j, "level_scaled", f.level_scaled, where);
  if (j.contains("pin_band")) {
    int b = 0;
    read(j, "pin_band", b, where);
    f.pin_band = b;
  }
  if (j.contains("factors")) {
    if (!j["factors"].is_array()) throw UsageError("'" + where + ".factors' must be an array");
    for (std::size_t k = 0; k < j["factors"].size(); ++k)
      f.factors.push_back(family_from_json(j["factors"][k], where + ".factors[" + std::to_string(k) + "]"));
  }
  return f;
}

json family_to_json(const TestFamily& f) {
  json j{{"kind", f.kind},         {"center", f.center}, {"width", f.width}, {"frequency", f.frequency},
         {"rate", f.rate},         {"lo", f.lo},         {"hi", f.hi},       {"degree", f.degree},
         {"seed", f.seed},         {"level_scaled", f.level_scaled}};
  if (f.pin_band) j["pin_band"] = *f.pin_band;
  if (!f.factors.empty()) {
    j["factors"] = json::array();
    for (const auto& g : f.factors) j["factors"].push_back(family_to_json(g));
  }
  return j;
}

GridSpec grid_from_json(const json& j, GridSpec g, const std::string& where) {
  if (j.is_null()) return g;
  reject_unknown(j, where, {"dim", "nx", "ny", "period_x", "period_y"});
  read(j, "dim", g.dim, where);
  read(j, "nx", g.nx, where);
  read(j, "ny", g.ny, where);
  read(j, "period_x", g.period_x, where);
  read(j, "period_y", g.period_y, where);
  if (g.dim == 1) g.ny = 1;
  if (g.dim != 1 && g.dim != 2) throw UsageError("'" + where + ".dim' must be 1 or 2");
  if (g.nx < 2 || g.ny < 1 || !(g.period_x > 0) || !(g.period_y > 0))
    throw UsageError("'" + where + "' needs positive sizes and periods");
  return g;
}

json grid_to_json(const GridSpec& g) {
  return {{"dim", g.dim}, {"nx", g.nx}, {"ny", g.ny}, {"period_x", g.period_x}, {"period_y", g.period_y}};
}

CollectionSpec collection_spec_from_json(const json& j) {
  CollectionSpec s;
  const std::string w = "collection_spec";
  reject_unknown(j, w, {"nx", "ny", "period_x", "period_y", "x_scales", "offset", "y_scale", "overlapping", "csep"});
  read(j, "nx", s.gx.n, w);
  read(j, "ny", s.gy.n, w);
  read(j, "period_x", s.gx.period, w);
  read(j, "period_y", s.gy.period, w);
  read(j, "x_scales", s.x_scales, w);
  read(j, "offset", s.offset, w);
  read(j, "y_scale", s.y_scale, w);
  read(j, "overlapping", s.overlapping, w);
  read(j, "csep", s.csep, w);
  return s;
}

std::vector<Candidate> candidates_from_json(const json& j) {
  if (!j.is_array()) throw UsageError("'candidates' must be an array");
  std::vector<Candidate> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string w = "candidates[" + std::to_string(k) + "]";
    reject_unknown(j[k], w, {"name", "f", "g"});
    Candidate c{"c" + std::to_string(k), {}, {}};
    read(j[k], "name", c.name, w);
    if (j[k].contains("f")) c.f = family_from_json(j[k]["f"], w + ".f");
    if (j[k].contains("g")) c.g = family_from_json(j[k]["g"], w + ".g");
    out.push_back(c);
  }
  return out;
}

json candidates_to_json(const std::vector<Candidate>& cs) {
  json a = json::array();
  for (const auto& c : cs) a.push_back({{"name", c.name}, {"f", family_to_json(c.f)}, {"g", family_to_json(c.g)}});
  return a;
}

Exponents exponents_from(const std::string& text, const std::string& where) {
  auto parts = split(text);
  if (parts.size() != 3) throw UsageError("'" + where + "' needs three exponents p,q,r");
  try {
    return {parse_number(parts[0]), parse_number(parts[1]), parse_number(parts[2])};
  } catch (const std::exception&) {
    throw UsageError("'" + where + "': cannot parse '" + text + "'");
  }
}

void check_R_open(double R) {
  if (!(R > 4.0 / 3 && R < 4)) throw UsageError("field 'R' must satisfy 4/3 < R < 4");
}

void emit(const RunConfig& c, std::ostream& out, const std::string& text) {
  const std::string path = c.params["output"].get<std::string>();
  if (path.empty()) out << text;
  else write_atomic(path, text);
}

std::string binary(const SampledFunction& f) {
  std::ostringstream os;
  write_binary(os, f);
  return os.str();
}

SampledFunction read_function(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError("cannot open '" + path + "'");
  return read_binary(is);
}

SampledFunction input_function(const json& params, const char* family_key, const char* file_key, const GridSpec& g) {
  const std::string path = file_key ? params[file_key].get<std::string>() : "";
  if (!path.empty()) return read_function(path);
  return generate_test_function(family_from_json(params[family_key], family_key), g);
}

TileCollection load_collection(const json& p) {
  const std::string path = p["collection"].get<std::string>();
  if (!path.empty()) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot open '" + path + "'");
    return read_collection(is);
  }
  if (p["count"].get<long long>() <= 0) throw UsageError("field 'count' must be positive");
  return random_collection(collection_spec_from_json(p["collection_spec"]),
                           static_cast<std::size_t>(p["count"].get<long long>()),
                           static_cast<std::uint64_t>(p["seed"].get<long long>()));
}

std::vector<cplx> coefficients(const std::string& kind, std::size_t n, std::uint64_t seed) {
  std::vector<cplx> eps(n, 1.0);
  std::mt19937_64 rng(seed);
  if (kind == "ones") return eps;
  for (auto& e : eps) {
    if (kind == "signs") e = (rng() >> 63) ? 1.0 : -1.0;
    else if (kind == "phases") e = std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(rng() >> 11) * 0x1.0p-53);
    else throw UsageError("field 'eps' must be ones, signs or phases");
  }
  return eps;
}

// Grid of a collection's packet bank, as a 2D GridSpec.
GridSpec collection_grid(const CollectionSpec& s) { return {2, s.gx.n, s.gy.n, s.gx.period, s.gy.period}; }

CollectionSpec spec_for(const json& p, const TileCollection& s) {
  CollectionSpec spec = collection_spec_from_json(p["collection_spec"]);
  spec.csep = s.csep;
  return spec;
}

int cmd_lp_decompose(const RunConfig& c, std::ostream& out) {
  const auto& p = c.params;
  const SampledFunction f = input_function(p, "f", "input", grid_from_json(p["grid"], {1, 256, 1, 1, 1}, "grid"));
  int axis = static_cast<int>(p["axis"].get<long long>());
  if (axis == 0) axis = f.dim();
  if (axis < 1 || axis > f.dim()) throw UsageError("field 'axis' must name an axis of the function");
  auto [lo, hi] = axis == 1 ? lp_scale_range(f.n(), f.period_x()) : lp_scale_range(f.m(), f.period_y());
  if (!p["jmin"].is_null()) lo = static_cast<int>(p["jmin"].get<long long>());
  if (!p["jmax"].is_null()) hi = static_cast<int>(p["jmax"].get<long long>());
  if (lo > hi) throw UsageError("jmin must not exceed jmax");
  const LPFamily fam;
  std::vector<std::pair<std::string, SampledFunction>> pieces{{"low", lp_multiply(f, lo, LPMode::low, axis, fam)}};
  for (int j = lo; j <= hi; ++j) pieces.push_back({"band_" + std::to_string(j), lp_multiply(f, j, LPMode::band, axis, fam)});
  SampledFunction sum = pieces[0].second;
  for (std::size_t k = 1; k < pieces.size(); ++k) sum.values() += pieces[k].second.values();
  const SampledFunction top = lp_multiply(f, hi + 1, LPMode::low, axis, fam);
  const double norm = std::max(lp_norm(f, 2), std::numeric_limits<double>::min());
  SampledFunction diff = sum;
  diff.values() -= top.values();
  const double telescope = lp_norm(diff, 2) / norm;
  diff.values() = sum.values() - f.values();
  const double reconstruction = lp_norm(diff, 2) / norm;
  json j{{"axis", axis}, {"jmin", lo}, {"jmax", hi}, {"telescope_error", telescope},
         {"reconstruction_error", reconstruction}, {"pieces", json::array()}};
  const std::string dir = p["pieces_dir"].get<std::string>();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  for (const auto& [name, piece] : pieces) {
    j["pieces"].push_back({{"name", name}, {"l2_norm", lp_norm(piece, 2)}});
    if (!dir.empty()) write_atomic(dir + "/" + name + ".bin", binary(piece));
  }
  emit(c, out, j.dump(2) + "\n");
  if (!(telescope <= p["tolerance"].get<double>())) {
    std::cerr << "telescoping identity failed: relative error " << telescope << "\n";
    return 1;
  }
  return 0;
}

int cmd_apply_op(const RunConfig& c, std::ostream& out) {
  const auto& p = c.params;
  OperatorSpec op{p["kind"].get<std::string>(), static_cast<int>(p["scale"].get<long long>())};
  const int dim = operator_dim(op);
  GridSpec base = dim == 1 ? GridSpec{1, 256, 1, 1, 1} : GridSpec{2, 32, 32, 1, 1};
  const GridSpec grid = grid_from_json(p["grid"], base, "grid");
  const SampledFunction f = input_function(p, "f", "f_input", grid);
  const SampledFunction g = input_function(p, "g", "g_input", grid);
  if (f.dim() != dim || g.dim() != dim)
    throw UsageError("operator " + op.id + " takes " + std::to_string(dim) + "D inputs");
  const SampledFunction h = apply_operator(op, f, g);
  json j{{"kind", op.id}, {"n", h.n()}, {"m", h.m()}, {"l2_norm", lp_norm(h, 2)}, {"sup_norm", lp_norm(h, INFINITY)}};
  const std::string path = p["output"].get<std::string>();
  if (!path.empty()) write_atomic(path, binary(h));
  out << j.dump(2) << "\n";
  return 0;
}

int cmd_model_sum(const RunConfig& c, std::ostream& out) {
  const auto& p = c.params;
  const TileCollection s = load_collection(p);
  const CollectionSpec spec = spec_for(p, s);
  const GridSpec grid = collection_grid(spec);
  const SampledFunction f = input_function(p, "f", nullptr, grid), g = input_function(p, "g", nullptr, grid);
  const PacketBank bank(s, spec.gx, spec.gy);
  const auto eps = coefficients(p["eps"].get<std::string>(), s.tiles.size(), p["seed"].get<std::uint64_t>());
  ModelFilter filter;
  const std::string fk = p["filter"].get<std::string>();
  if (fk == "component") filter.kind = ModelFilter::Kind::component;
  else if (fk == "scale") filter.kind = ModelFilter::Kind::scale;
  else if (fk != "all") throw UsageError("field 'filter' must be all, component or scale");
  filter.value = static_cast<int>(p["filter_value"].get<long long>());
  const SampledFunction t = apply_model_sum(s, eps, f, g, bank, filter);
  json j{{"tiles", s.tiles.size()}, {"selected", filter_tiles(s, filter).size()}, {"l2_norm", lp_norm(t, 2)}};
  int status = 0;
  if (!p["h"].is_null()) {
    if (filter.kind != ModelFilter::Kind::all) throw UsageError("the adjoint check needs filter 'all'");
    const SampledFunction h = input_function(p, "h", nullptr, grid);
    const cplx lambda = trilinear_form(s, eps, f, g, h, bank);
    const cplx pairing = integrate_product(t, h);
    const double scale = std::max(lp_norm(t, 2) * lp_norm(h, 2), std::numeric_limits<double>::min());
    const double err = std::abs(pairing - lambda) / scale;
    j["lambda"] = {lambda.real(), lambda.imag()};
    j["adjoint_error"] = err;
    if (!(err <= p["tolerance"].get<double>())) {
      std::cerr << "adjoint identity failed: relative error " << err << "\n";
      status = 1;
    }
  }
  const std::string path = p["output"].get<std::string>();
  if (!path.empty()) write_atomic(path, binary(t));
  out << j.dump(2) << "\n";
  return status;
}

int cmd_size_decompose(const RunConfig& c, std::ostream& out) {
  const auto& p = c.params;
  const TileCollection s = load_collection(p);
  const CollectionSpec spec = spec_for(p, s);
  const SampledFunction f = input_function(p, "f", nullptr, collection_grid(spec));
  const PacketBank bank(s, spec.gx, spec.gy);
  const SizeContext ctx(s, bank);
  const int i = static_cast<int>(p["index"].get<long long>());
  if (i < 1 || i > 3) throw UsageError("field 'index' must be 1, 2 or 3");
  std::optional<double> sigma0;
  if (!p["sigma0"].is_null()) sigma0 = p["sigma0"].get<double>();
  const Decomposition d = size_decompose(ctx, f, i, sigma0);
  emit(c, out, to_json(d, s) + "\n");
  if (d.sigma > 0 && !(d.residual_size < d.sigma / 2)) {
    std::cerr << "size lemma postcondition failed: residual size " << d.residual_size << "\n";
    return 1;
  }
  return 0;
}

std::optional<Rational> region_R(const json& p, const std::vector<std::string>& ids) {
  bool needs = false;
  for (const auto& id : ids) needs = needs || region_needs_R(id);
  if (!needs) return {};
  if (p["R"].is_null()) throw UsageError("field 'R' is required for the A^R family");
  Rational R;
  try {
    R = parse_rational(p["R"].get<std::string>());
  } catch (const std::exception&) {
    throw UsageError("field 'R': cannot parse '" + p["R"].get<std::string>() + "'");
  }
  check_R_open(to_double(R));
  return R;
}

int cmd_region(const RunConfig& c, std::ostream& out) {
  const auto& p = c.params;
  const std::string mode = p["mode"].get<std::string>();
  std::vector<std::string> ids{p["id"].get<std::string>()};
  if (mode == "figure" && !p["ids"].is_null()) ids = p["ids"].get<std::vector<std::string>>();
  const auto R = region_R(p, ids);
  if (mode == "membership") {
    if (p["point"].is_null()) throw UsageError("membership needs 'point'");
    ExponentTriple x = [&] {
      try {
        return parse_triple(p["point"].get<std::string>());
      } catch (const std::exception& e) {
        throw UsageError(std::string("field 'point': ") + e.what());
      }
    }();
    emit(c, out, std::string(region_membership(ids[0], R, x) ? "true" : "false") + "\n");
    return 0;
  }
  if (mode != "polygon" && mode != "figure") throw UsageError("field 'mode' must be membership, polygon or figure");
  const Rational step = parse_rational(p["step"].get<std::string>());
  std::vector<std::pair<std::string, Polygon>> layers;
  int status = 0;
  for (const auto& id : ids) {
    const Region r = make_region(id, R);
    layers.push_back({id, region_polygon(r)});
    // Round trip: the emitted polygon must agree with the predicate on the grid.
    const auto bad = polygon_disagreement(r, step);
    if (!bad.empty()) {
      std::cerr << id << ": polygon disagrees with membership at " << bad.size() << " grid points, first "
                << to_string(bad.front()) << "\n";
      status = 1;
    }
  }
  if (mode == "polygon") emit(c, out, polygon_json(make_region(ids[0], R), layers[0].second) + "\n");
  else emit(c, out, figure_svg(layers));
  return status;
}

int cmd_probe(const RunConfig& c, std::ostream& out) {
  const auto& p = c.params;
  const std::string mode = p["mode"].get<std::string>();
  const std::string format = p["format"].get<std::string>();
  if (format != "csv" && format != "json") throw UsageError("field 'format' must be csv or json");
  const auto seed = p["seed"].get<std::uint64_t>();
  json echo = p;
  echo["command"] = c.command;
  echo.erase("output");
  ProbeResult res;
  if (mode == "scalar") {
    ProbeConfig cfg;
    cfg.op = {p["op"].get<std::string>(), 0};
    operator_dim(cfg.op);
    cfg.exponents = exponents_from(p["exponents"].is_null() ? "2,2,1" : p["exponents"].get<std::string>(), "exponents");
    cfg.base = grid_from_json(p["base"], default_base(cfg.op.id), "base");
    cfg.candidates = p["candidates"].is_null() ? default_candidates(cfg.op.id) : candidates_from_json(p["candidates"]);
    if (!p["levels"].is_null()) cfg.levels = static_cast<int>(p["levels"].get<long long>());
    cfg.search_steps = p["steps"].is_null() ? default_search_steps(cfg.op.id)
                                            : static_cast<int>(p["steps"].get<long long>());
    cfg.search_amplitude = p["amplitude"].get<double>();
    cfg.seed = seed;
    echo["base"] = grid_to_json(cfg.base);
    echo["candidates"] = candidates_to_json(cfg.candidates);
    echo["steps"] = cfg.search_steps;
    echo["levels"] = cfg.levels;
    echo["exponents"] = {cfg.exponents.p, cfg.exponents.q, cfg.exponents.r};
    res = probe_ratio(cfg);
  } else if (mode == "vector") {
    VectorProbeConfig cfg;
    if (!p["exponents"].is_null()) cfg.exponents = exponents_from(p["exponents"].get<std::string>(), "exponents");
    cfg.R = p["R"].get<double>();
    check_R_open(cfg.R);
    cfg.theorem = p["theorem"].get<std::string>();
    cfg.bands = p["bands"].get<std::vector<int>>();
    cfg.base = grid_from_json(p["base"], cfg.base, "base");
    cfg.candidates = p["candidates"].is_null() ? default_vector_candidates() : candidates_from_json(p["candidates"]);
    if (!p["levels"].is_null()) cfg.levels = static_cast<int>(p["levels"].get<long long>());
    if (!p["steps"].is_null()) cfg.search_steps = static_cast<int>(p["steps"].get<long long>());
    cfg.search_amplitude = p["amplitude"].get<double>();
    cfg.seed = seed;
    if (!p["contrast"].is_null()) cfg.contrast = exponents_from(p["contrast"].get<std::string>(), "contrast");
    echo["base"] = grid_to_json(cfg.base);
    echo["candidates"] = candidates_to_json(cfg.candidates);
    echo["steps"] = cfg.search_steps;
    echo["levels"] = cfg.levels;
    echo["exponents"] = {cfg.exponents.p, cfg.exponents.q, cfg.exponents.r};
    res = probe_vector_valued(cfg);
  } else {
    throw UsageError("field 'mode' must be scalar or vector");
  }
  emit(c, out, format == "csv" ? probe_csv(res) : probe_json(res, echo.dump()) + "\n");
  return 0;
}

}  // namespace

std::vector<std::string> commands() {
  return {"lp-decompose", "apply-op", "model-sum", "size-decompose", "region", "probe"};
}

RunConfig validate(const std::string& command, const json& params) {
  if (!params.is_object()) throw UsageError("configuration must be a JSON object");
  const auto fields = schema(command);
  RunConfig out{command, json::object()};
  for (const auto& [k, v] : params.items()) {
    if (k == "command") {
      if (v != command) throw UsageError("config command '" + v.dump() + "' does not match '" + command + "'");
      continue;
    }
    auto it = std::find_if(fields.begin(), fields.end(), [&](const Field& f) { return f.name == k; });
    if (it == fields.end()) throw UsageError("unknown key '" + k + "' for command " + command);
    json val = v;
    check_type(*it, val);
    out.params[k] = val;
  }
  for (const auto& f : fields)
    if (!out.params.contains(f.name)) out.params[f.name] = f.def;
  // Nested objects are checked here so that unknown keys fail before any work.
  for (const char* k : {"grid", "base"})
    if (out.params.contains(k)) grid_from_json(out.params[k], GridSpec{}, k);
  for (const char* k : {"f", "g", "h"})
    if (out.params.contains(k) && !out.params[k].is_null()) family_from_json(out.params[k], k);
  if (out.params.contains("collection_spec")) collection_spec_from_json(out.params["collection_spec"]);
  if (out.params.contains("candidates") && !out.params["candidates"].is_null())
    candidates_from_json(out.params["candidates"]);
  if (command == "region" && out.params["mode"].is_null())
    out.params["mode"] = out.params["point"].is_null() ? "polygon" : "membership";
  if (command == "region" && !out.params["R"].is_null()) {
    const auto ids = out.params["ids"].is_null() ? std::vector<std::string>{out.params["id"].get<std::string>()}
                                                 : out.params["ids"].get<std::vector<std::string>>();
    region_R(out.params, ids);
  }
  if (command == "probe" && out.params["mode"] == "vector") check_R_open(out.params["R"].get<double>());
  if (out.params["seed"].get<long long>() < 0) throw UsageError("field 'seed' must be nonnegative");
  return out;
}

namespace {

json load_json(const std::string& path_or_json) {
  json j;
  try {
    if (!path_or_json.empty() && path_or_json.front() == '{') {
      j = json::parse(path_or_json);
    } else {
      std::ifstream is(path_or_json);
      if (!is) throw UsageError("cannot read config '" + path_or_json + "'");
      j = json::parse(is);
    }
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  return j;
}

}  // namespace

RunConfig parse_config(const std::string& path_or_json, const std::string& command) {
  const json j = load_json(path_or_json);
  std::string cmd = command;
  if (cmd.empty()) {
    if (!j.is_object() || !j.contains("command") || !j["command"].is_string())
      throw UsageError("config needs a 'command' string");
    cmd = j["command"].get<std::string>();
  }
  return validate(cmd, j);
}

int execute(const RunConfig& c, std::ostream& out) {
  if (c.command == "lp-decompose") return cmd_lp_decompose(c, out);
  if (c.command == "apply-op") return cmd_apply_op(c, out);
  if (c.command == "model-sum") return cmd_model_sum(c, out);
  if (c.command == "size-decompose") return cmd_size_decompose(c, out);
  if (c.command == "region") return cmd_region(c, out);
  if (c.command == "probe") return cmd_probe(c, out);
  throw UsageError("unknown command '" + c.command + "'");
}

void write_atomic(const std::string& path, const std::string& bytes) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    os.flush();
    if (!os) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  std::filesystem::rename(tmp, target);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Computational lab for the bilinear Hilbert transform tensored with a paraproduct"};
  app.require_subcommand(0, 1);
  std::string config;
  app.add_option("--config", config, "JSON config file, or inline JSON starting with '{'");
  std::map<std::string, std::map<std::string, std::string>> flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->set_help_flag("--help", "print this help and exit");
    subs[name] = sub;
    sub->add_option("--config", config, "JSON config file or inline JSON");
    for (const auto& f : schema(name)) {
      std::string opt = "--" + f.name;
      std::string dashed = f.name;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      if (dashed != f.name) opt += ",--" + dashed;
      sub->add_option(opt, flags[name][f.name], f.help);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    std::string command;
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) command = name;
    json params = json::object();
    if (!config.empty()) {
      // Validated once on its own so errors name the config, then merged with flags.
      command = parse_config(config, command).command;
      params = load_json(config);
      params.erase("command");
    }
    if (command.empty()) {
      err << app.help();
      return 2;
    }
    for (const auto& f : schema(command)) {
      CLI::App* sub = subs[command];
      if (sub->count("--" + f.name) > 0) params[f.name] = from_flag(f, flags[command][f.name]);
    }
    return execute(validate(command, params), out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const ScaleOverflow& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const BandOverflow& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const InvariantViolation& e) {
    err << "invariant failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace bplab::cli
