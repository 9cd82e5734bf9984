#pragma once

#include "bplab/grid.hpp"
#include "bplab/operators.hpp"
#include "bplab/sampled.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace bplab::testing {

// Uniform in [-1, 1].
inline double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2 - 1; }

// Random trigonometric polynomial with |frequency| <= degree on each axis.
SampledFunction random_trig(Index n, Index m, int degree_x, int degree_y, std::uint64_t seed);
inline SampledFunction random_trig_1d(Index n, int degree, std::uint64_t seed) {
  return random_trig(n, 1, degree, 0, seed);
}

// sum_s c_s phi_{s_i} with seeded coefficients; conjugate gives sum_s c_s conj(phi_{s_i}).
SampledFunction packet_superposition(const TileCollection& s, const PacketBank& bank, int component,
                                     std::uint64_t seed, bool conjugate = false);

// Evaluates the trigonometric polynomial behind f at an arbitrary point.
cplx evaluate(const ArrayC& coefficients_1d, double period, double x);

// Principal value of int f(z + t) g(z - t) dt / t over the line for periodic
// f, g: (pi / L) pv int_0^L h(t) cot(pi t / L) dt, folded onto (0, L/2) and
// integrated by composite Gauss-Legendre.
cplx bht_quadrature(const ArrayC& cf, const ArrayC& cg, double period, double z);

// Direct DFT with the normalized-coefficient convention.
ArrayC naive_coefficients(const SampledFunction& f);

// Plain triple loop over n1, n2, n3 up to a cutoff.
double lambda_bound_oracle(const std::array<double, 3>& sigma, const std::array<double, 3>& norms_sq, int cutoff);

// Size by enumerating every (type, top) pair with the tree relation written
// out from the definition.
double brute_size(const TileCollection& s, const PacketBank& bank, const SampledFunction& f, int i,
                  const std::vector<char>& active = {});

// Dyadic maximal average at sample a over every dyadic block containing it (1D).
double brute_dyadic_maximal(const Eigen::ArrayXd& values, Index a);

struct Calibration {
  double size_lemma_constant;
  double lambda_constant;
  double single_tree_ratio;
  double regression_factor;
  double exceptional_c0;  // threshold constant keeping the concentric-square case major and local
};
Calibration load_calibration();

}  // namespace bplab::testing
