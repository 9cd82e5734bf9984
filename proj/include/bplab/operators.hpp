#pragma once

#include "bplab/grid.hpp"
#include "bplab/sampled.hpp"
#include "bplab/wavepacket.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace bplab {

// Sign convention: B(f,g)(z) = p.v. int f(z+t) g(z-t) dt/t has symbol
// pi i sgn(xi1 - xi2), zero on the diagonal.
cplx bht_symbol(double xi1, double xi2, double beta = 1);

// hat K_j(xi) = sgn(xi) phi(xi / 2^j): smooth truncations of the Hilbert kernel.
class KernelFamily {
 public:
  explicit KernelFamily(LPFamily profile = LPFamily()) : profile_(profile) {}
  double operator()(int j, double xi) const;
  // Measured sup |xi|^a |d^a hat K_j(xi)| for a = 0..4 by central differences,
  // maximized over j in [jmin, jmax].
  std::array<double, 5> measured_constants(int jmin, int jmax) const;

 private:
  LPFamily profile_;
};

enum class SymbolKind { bht_sgn, paraproduct, bp_tensor, double_bht, biparam_paraproduct, custom };

const char* to_string(SymbolKind k);
SymbolKind symbol_kind_from_string(const std::string& s);

struct BilinearSymbol {
  SymbolKind kind = SymbolKind::bht_sgn;
  Rational slope = 1;      // Gamma_1 = {xi1 = slope * xi2} for bp_tensor
  LPFamily family{};       // smooth parts
  int kernel_scale = 0;    // custom: hat K_j(xi1 - xi2) in x
  void validate() const;
};

// Generic engines. m1(xi1, xi2) acts in 1D; the 2D engine takes a product
// symbol mx(xi1, xi2) * my(eta1, eta2) and evaluates the four-variable sum
// over nonzero coefficients.
using Symbol1D = std::function<cplx(double, double)>;
SampledFunction apply_symbol_1d(const SampledFunction& f, const SampledFunction& g, const Symbol1D& m);
SampledFunction apply_product_symbol_2d(const SampledFunction& f, const SampledFunction& g, const Symbol1D& mx,
                                        const Symbol1D& my);

struct BhtKernel {
  std::optional<int> scale;  // empty: sgn prototype; else hat K_j with this j
  KernelFamily family{};
};

SampledFunction apply_bht(const SampledFunction& f, const SampledFunction& g, const BhtKernel& kernel = {});

// sum_j Pi^o_{j-3} f * Pi^l_j g over every grid scale (or j >= min_scale).
SampledFunction apply_paraproduct(const SampledFunction& f, const SampledFunction& g,
                                  const LPFamily& family = LPFamily(), std::optional<int> min_scale = {});
// The paraproduct as a symbol: sum_j phi_{j-3}(xi1) psi_j(xi2) over the given scales.
double paraproduct_symbol(const LPFamily& family, int jmin, int jmax, double xi1, double xi2);

// Direct four-variable symbol sum for bp_tensor, double_bht, biparam_paraproduct.
SampledFunction apply_tensor(const SampledFunction& f, const SampledFunction& g, const BilinearSymbol& m);

// BP_j(f, g): x-direction BHT (slope beta) of the pair (Pi^o_{j-3} f, Pi^l_j g),
// the j-th term of the eta paraproduct. Throws ScaleOverflow past Nyquist.
SampledFunction apply_bp_single_scale(const SampledFunction& f, const SampledFunction& g, int j,
                                      const LPFamily& family = LPFamily(), const Rational& beta = 1);
// BP as the sum of its single-scale pieces (no overflow guard); agrees with apply_tensor.
SampledFunction apply_bp(const SampledFunction& f, const SampledFunction& g, const LPFamily& family = LPFamily(),
                         const Rational& beta = 1);

// Wave packets for every component of every tile of a collection, built once.
class PacketBank {
 public:
  PacketBank(const TileCollection& s, AxisGrid gx, AxisGrid gy, double decay_order = 4);
  struct Ref {
    const WavePacket& x;
    const WavePacket& y;
  };
  // component is 1-based
  Ref packet(std::size_t tile, int component) const;
  const AxisGrid& grid_x() const { return gx_; }
  const AxisGrid& grid_y() const { return gy_; }
  double decay_order() const { return decay_; }
  std::size_t size() const { return index_.size(); }
  // Largest recorded decay constant over all packets.
  double max_decay_constant() const;

 private:
  AxisGrid gx_, gy_;
  double decay_;
  std::vector<WavePacket> xs_, ys_;
  std::vector<std::array<std::pair<std::size_t, std::size_t>, 3>> index_;
};

struct ModelFilter {
  enum class Kind { all, component, scale } kind = Kind::all;
  int value = 0;  // component i (1..3) or scale j
};

// Coefficients for apply_model_sum and trilinear_form must satisfy |eps| <= 1.
void check_coefficients(const std::vector<cplx>& eps, std::size_t count);

// Tiles selected by the filter, as indices into s.tiles.
std::vector<std::size_t> filter_tiles(const TileCollection& s, const ModelFilter& filter);

SampledFunction apply_model_sum(const TileCollection& s, const std::vector<cplx>& eps, const SampledFunction& f,
                                const SampledFunction& g, const PacketBank& bank, const ModelFilter& filter = {});

// Lambda = sum eps |R|^{-1/2} <f1, phi_s1> <f2, phi_s2> <f3, conj phi_s3>, so that
// Lambda = int T(f1, f2) f3. dual[i] selects the conjugated packet for slot i.
cplx trilinear_form(const TileCollection& s, const std::vector<cplx>& eps, const SampledFunction& f1,
                    const SampledFunction& f2, const SampledFunction& f3, const PacketBank& bank,
                    std::array<bool, 3> dual = {false, false, true});

}  // namespace bplab
