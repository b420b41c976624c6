#pragma once

// Spatial vorticity diagnostics: the Coulomb energy of a cell-averaged
// vector field, its split at a distance scale, the spectral form of the
// near part, direction alignment, and the bound chain that turns aligned,
// energy-bounded vorticity into a V^{6/5,2} estimate.

#include <string>
#include <utility>
#include <vector>

#include "regladder/field.hpp"
#include "regladder/kernels.hpp"
#include "regladder/packing.hpp"

namespace regladder {

/// int_{[0,1]^3} int_{[0,1]^3} |x - y|^{-1} dx dy.
inline constexpr double kCubeSelfEnergy = 1.8823126443896603;

/// (1/8 pi) sum over ordered cell pairs of <f_c, g_d> h^6 / |x_c - x_d|
/// restricted to |x_c - x_d| <= cutoff, plus the same-cell terms
/// kCubeSelfEnergy h^5 <f_c, g_c>. Fields must share a cubic-cell grid.
double coulomb_bilinear(const GridField& f, const GridField& g, double cutoff = kInf, Exec exec = Exec::parallel);

/// H = (1/8 pi) int int <w(x), w(y)> / |x - y|.
double coulomb_energy(const GridField& w, Exec exec = Exec::parallel);

struct EnergyPartition3D {
  double delta = 0;
  double h_total = 0;
  double h_si = 0;  // pairs with |x - y| <= delta (and same-cell terms)
  double h_ie = 0;
};

/// Requires delta > h.
EnergyPartition3D partition_delta(const GridField& w, double delta, Exec exec = Exec::parallel);

/// (1 - cos(k delta)) / k^2, with the limit delta^2 / 2 at k = 0.
double eta_kernel(double k, double delta);

struct SpectralEnergy {
  double h_si = 0;
  double max_eta_ratio = 0;  // max over modes of eta(xi) |xi|^2 / 2 (must be <= 1)
  bool eta_bound() const { return max_eta_ratio <= 1; }
};

/// Near-part energy from the Fourier series of w zero-padded to twice the
/// box on every axis: (|box| / 2) sum_m |c_m|^2 eta(|xi_m|).
SpectralEnergy hsi_fourier(const GridField& w, double delta);

struct AlignmentParams {
  double delta = 0.1;  // alignment range
  double theta = 0.5;  // alignment defect, < 1
  double k0 = 1.0;     // height threshold
};

struct AlignmentResult {
  double theta = 0;             // max |xi(x) - xi(y)| / sqrt 2 over qualifying pairs
  std::size_t pairs = 0;        // qualifying ordered pairs
  std::size_t violations = 0;   // pairs with <w(x), w(y)> < (1 - theta^2)|w(x)||w(y)|
};

/// Pairs of distinct cells with |w| > k0 at both ends and |x - y| <= delta.
AlignmentResult alignment_measure(const GridField& w, double delta, double k0);

/// (w_minus, w_plus) with w_plus carrying the cells where |w| > k0.
std::pair<GridField, GridField> split_height(const GridField& w, double k0);

/// max over lattice cells of side `side` of max |w - cell average|.
double cell_constancy_defect(const GridField& w, double side);

struct ChainLink {
  std::string name;
  double lhs = 0, rhs = 0;
  bool holds() const { return lhs <= rhs + 1e-12 * (std::abs(lhs) + std::abs(rhs)); }
};

struct AlignmentChainReport {
  double theta_measured = 0;
  double theta = 0;
  bool applicable = true;  // theta_measured <= theta
  double h = 0, h0 = 0;
  double h_si = 0, h_ie = 0;
  double b_minus = 0, b_cross = 0, b_plus = 0;  // H_si(w-), H_si(w-, w+), H_si(w+)
  double const_k0 = 0;      // (pi / 24) K0^2 diam^3 delta^2
  double diameter = 0;      // of the support of w
  double r0 = 0;            // min(delta / 4, kDefaultR0)
  std::vector<Ball> balls;  // collection used for the lower bound
  double collection_sum = 0;  // sum_j m_j^2 / R_j for w+ over `balls`
  double lower_bound = 0;     // (1 - theta^2) / (16 pi) * collection_sum
  double final_rhs = 0;       // 32 pi / (1 - theta^2) (2 H0 + 7 Const_K0)
  double v_lattice_sq = 0;    // lattice V^{6/5,2} value of w+ squared (reported)
  double constancy_defect = 0;
  std::vector<ChainLink> links;
  bool all_hold() const;
};

/// Evaluates every inequality of the aligned-vorticity bound chain. Throws
/// PreconditionError when theta >= 1 or delta <= h.
AlignmentChainReport thm42_chain(const GridField& w, const AlignmentParams& params, double h0,
                                 Exec exec = Exec::parallel);

/// (1 - theta^2)/(16 pi) sum_j m_j^2 / R_j for the given balls, with masses
/// taken over cells whose centers lie in each ball.
double alignment_lower_bound(const GridField& w_plus, const std::vector<Ball>& balls, double theta);

struct MorreyVsVReport {
  double v_sq = 0;       // lattice V^{6/5,2} squared
  double morrey = 0;     // M^{3/2} norm
  double packing = 0;    // packing-measure estimate of the support
  double rhs = 0;        // packing * morrey^2
  bool applicable = true;  // false when the packing estimate diverges
  bool holds = false;
};

/// Compares the V^{6/5,2} lattice value of an atomic measure in R^3 with
/// (packing measure of its support) * (Morrey M^{3/2} norm)^2, using one
/// common finest scale r_min for all three estimators.
MorreyVsVReport morrey_vs_v_check(const AtomicMeasure& mu, const std::vector<Point>& support, double r_min,
                                  double r0 = kDefaultR0);

/// Cells with nonzero magnitude as weighted vector charges (weight w h^3).
Charges3D to_charges(const GridField& w);

}  // namespace regladder
