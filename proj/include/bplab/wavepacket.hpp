#pragma once

#include "bplab/grid.hpp"
#include "bplab/sampled.hpp"

#include <cmath>

namespace bplab {

// phi = 1 on [-1, 1], 0 beyond 1 + sharpness, joined by the e^{-1/t} smooth step.
// psi(x) = phi(x/2) - phi(x); phi_j, psi_j are the L-infinity dilates by 2^j.
class LPFamily {
 public:
  explicit LPFamily(double sharpness = 1.0 / 20);

  double sharpness() const { return delta_; }
  double phi(double xi) const;
  double psi(double xi) const { return phi(xi / 2) - phi(xi); }
  double phi_j(int j, double xi) const { return phi(std::ldexp(xi, -j)); }
  double psi_j(int j, double xi) const { return psi(std::ldexp(xi, -j)); }

 private:
  double delta_;
};

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);

enum class LPMode { low, band };

// Pi^o_j (low, multiplier phi_j) or Pi^l_j (band, multiplier psi_j) on the given
// axis. Throws ScaleOverflow when 2^{j+2} exceeds the axis Nyquist frequency.
SampledFunction lp_project(const SampledFunction& f, int j, LPMode mode, int axis, const LPFamily& family);

// Same multipliers without the overflow guard, for internal sums that cover the
// whole spectrum.
SampledFunction lp_multiply(const SampledFunction& f, int j, LPMode mode, int axis, const LPFamily& family);

// Scales j whose psi_j is nonzero on some nonzero grid frequency of the axis.
std::pair<int, int> lp_scale_range(Index n, double period);

template <class Scalar>
Scalar chi_cutoff(Scalar center, Scalar length, Scalar power, Scalar x) {
  using std::pow;
  Scalar u = (x - center) / length;
  return pow(Scalar(1) + u * u, -power / Scalar(2));
}

struct AxisGrid {
  Index n;
  double period;
};

// Packet on a tile: Fourier support inside (9/10) omega, centered on I, unit L2 norm.
struct WavePacket {
  Tile tile;
  ArrayC values;       // n x 1
  double decay_order;  // M used for the recorded constant
  double decay_constant;
};

WavePacket make_wave_packet(const Tile& tile, const AxisGrid& grid, double decay_order = 4);

// Tensor product packet on s_i = B_i x P_i.
struct ProductPacket {
  WavePacket x;
  WavePacket y;
  ArrayC values() const { return x.values.matrix() * y.values.matrix().transpose(); }
};

ProductPacket make_product_packet(const Tile& bx, const Tile& py, const AxisGrid& gx, const AxisGrid& gy,
                                  double decay_order = 4);

// <f, phi_x (x) phi_y> by Riemann sum; conjugate_packet = false gives the
// pairing with the conjugated packet, sum f phi.
cplx packet_coefficient(const SampledFunction& f, const WavePacket& px, const WavePacket& py,
                        bool conjugate_packet = true);
inline cplx packet_coefficient(const SampledFunction& f, const ProductPacket& p, bool conjugate_packet = true) {
  return packet_coefficient(f, p.x, p.y, conjugate_packet);
}

enum class MaximalVariant { hl, strong };

struct MaximalResult {
  SampledFunction dyadic;  // sup over aligned dyadic blocks (a lower bound)
  SampledFunction upper;   // tripling-corrected upper bound for the full maximal function
};

// M_r f = (M |f|^r)^{1/r}: hl takes 1D input, strong takes 2D input.
MaximalResult maximal(const SampledFunction& f, MaximalVariant variant, double r = 1);

}  // namespace bplab
