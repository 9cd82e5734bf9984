#pragma once

#include "bplab/sampled.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bplab {

// Exponents applied innermost first: p[0] over the family index, then either
// one exponent for all spatial axes jointly or one per axis (y, then x).
// Infinity is the supremum.
struct MixedNormSpec {
  std::vector<double> p;
};

double mixed_norm(const std::vector<SampledFunction>& family, const MixedNormSpec& spec);

// Deterministic test functions, built from Fourier coefficients so that every
// refinement level samples the same trigonometric polynomial. Positions and
// widths are fractions of the period; frequencies are integer cycles per
// period. level_scaled families double frequency, rate and degree per level
// instead.
struct TestFamily {
  std::string kind = "gaussian";  // gaussian modulated chirp trig indicator tensor cross_chirp zero
  double center = 0.5;
  double width = 0.1;
  double frequency = 0;
  double rate = 0;
  double lo = 0.25, hi = 0.75;  // indicator end points
  int degree = 8;
  std::uint64_t seed = 1;
  bool level_scaled = false;
  std::optional<int> pin_band;       // keep only the plateau of psi_j on the last axis
  std::vector<TestFamily> factors;   // tensor: {x factor, y factor}; 1D kinds on a 2D grid use {f, f}
};

struct GridSpec {
  int dim = 1;
  Index nx = 128, ny = 1;
  double period_x = 1, period_y = 1;
};

SampledFunction generate_test_function(const TestFamily& family, const GridSpec& grid, int level = 0);

// Restricts the last-axis spectrum to the plateau of psi_j, so Pi^l_j g = g.
SampledFunction pin_to_band(const SampledFunction& g, int j);

struct Exponents {
  double p, q, r;
};
// Throws unless 1/p + 1/q = 1/r.
void check_holder(const Exponents& e);

struct OperatorSpec {
  std::string id = "bht";  // bht paraproduct bp bp-single double-bht bp-tensor biparam-paraproduct
  int scale = 0;           // j for bp-single
};
SampledFunction apply_operator(const OperatorSpec& op, const SampledFunction& f, const SampledFunction& g);
int operator_dim(const OperatorSpec& op);

struct Candidate {
  std::string name;
  TestFamily f, g;
};

// Level 0 grid and candidate pairs used when a probe configuration names none.
// The double BHT gets the cross chirp, which is not a tensor product.
GridSpec default_base(const std::string& op);
std::vector<Candidate> default_candidates(const std::string& op);
std::vector<Candidate> default_vector_candidates();
// The cross chirp is itself the adversary: random coefficient perturbations
// destroy its phase structure and mostly inflate the coarse levels, so the
// double BHT runs without local search by default.
int default_search_steps(const std::string& op);

struct LevelRecord {
  int level;
  Index n;
  double ratio;  // NaN when every candidate vanished
  std::string candidate;
  int improved_steps;
};

enum class Growth { stable, growing, inconclusive };
const char* to_string(Growth g);

struct ProbeResult {
  std::string op;
  Exponents exponents;
  std::vector<LevelRecord> levels;
  Growth classification = Growth::inconclusive;
  double growth_factor = 0;
  std::vector<LevelRecord> contrast;  // vector probes only
  std::optional<Exponents> contrast_exponents;
};

// Stable: ratio increase over the last min(3, levels - 1) doublings at most 2x.
// Growing: monotone over those doublings and at least 4x. Else inconclusive.
std::pair<Growth, double> classify_growth(const std::vector<double>& ratios);

struct ProbeConfig {
  OperatorSpec op;
  Exponents exponents{2, 2, 1};
  std::vector<Candidate> candidates;
  GridSpec base;  // level 0 grid; each level doubles every axis
  int levels = 4;
  int search_steps = 8;
  double search_amplitude = 0.25;
  std::uint64_t seed = 1;
};

ProbeResult probe_ratio(const ProbeConfig& cfg);

struct VectorProbeConfig {
  Exponents exponents{4, 4, 2};
  double R = 2;                      // inner exponent; f is measured in l^infinity
  std::string theorem = "AR";        // region checked: "AR" (with R) or "pi2"
  std::vector<int> bands{0, 1, 2, 3};
  std::vector<Candidate> candidates;  // g is pinned to each band in turn
  GridSpec base{2, 64, 64, 1, 1};
  int levels = 3;
  int search_steps = 4;
  double search_amplitude = 0.25;
  std::uint64_t seed = 1;
  std::optional<Exponents> contrast;  // evaluated without the region check
};

// {BP_j(f_j, g_j)} in L^r(l^R) against |f|_{L^p(l^inf)} |g|_{L^q(l^R)}.
ProbeResult probe_vector_valued(const VectorProbeConfig& cfg);

std::string probe_csv(const ProbeResult& r);
std::string probe_json(const ProbeResult& r, const std::string& config_echo);

}  // namespace bplab
