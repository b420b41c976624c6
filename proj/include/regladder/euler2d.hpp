#pragma once

// Planar vorticity diagnostics: vortex-blob dynamics, the log-kernel
// pseudo-energy and its self/interaction split, the energy lower bound
// for one-signed data, the concentrating steady-vortex family, and the
// Delort-kernel near/far split.

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "regladder/field.hpp"
#include "regladder/kernels.hpp"
#include "regladder/packing.hpp"

namespace regladder {

/// Point vortices carried as uniform patches of radius `delta`.
struct VortexState2D {
  Vortices2D vortices;
  double delta = 0.01;
  double t = 0;
  /// step() fails once a vortex leaves [-box, box]^2.
  double box = 1e3;

  std::size_t size() const { return vortices.size(); }
  void add(double x, double y, double gamma);

  static VortexState2D from_measure(const AtomicMeasure& mu, double delta);
  /// Atomic measure on `domain` with blob radius delta (atoms must lie inside).
  AtomicMeasure to_measure(const Domain& domain) const;
};

/// Velocity induced by the state at x (blob-regularized kernel).
std::array<double, 2> biot_savart(const VortexState2D& s, double x, double y);
/// Direct midpoint quadrature of K * omega on a grid, skipping the cell at x.
std::array<double, 2> biot_savart(const GridField& omega, double x, double y);

/// One classical RK4 step. Throws PreconditionError for dt <= 0 and
/// std::runtime_error when a vortex escapes the bounding box.
void step(VortexState2D& s, double dt, Exec exec = Exec::parallel);

enum class EnergyMode { blob, pairwise };

/// -(1/2 pi) sum_{i != j} G_i G_j log|x_i - x_j| plus, in blob mode, the
/// closed-form uniform-patch self-energies -(G_i^2 / 2 pi)(log delta - 1/4).
double pseudo_energy(const VortexState2D& s, EnergyMode mode = EnergyMode::blob, Exec exec = Exec::parallel);

struct Moments {
  double i0 = 0;  // total circulation
  double i2 = 0;  // sum G_i |x_i|^2
};
Moments moments(const VortexState2D& s);

using PartitionGeometry = std::variant<BallCollection, DyadicCubeCover>;

struct EnergyPartition2D {
  double h_total = 0;
  double h_si = 0;  // pairs (and self terms) inside one ball or cell
  double h_ie = 0;  // everything else
  std::vector<double> cell_mass;     // circulation captured by each piece
  std::vector<double> cell_diameter; // 2R for balls, side*sqrt(2) for cells
};

EnergyPartition2D energy_partition(const VortexState2D& s, const PartitionGeometry& geometry);

struct Lemma41Report {
  double h = 0, h_si = 0, h_ie = 0;
  double i0 = 0, i2 = 0;
  double si_lower = 0;    // (1/2 pi) sum_j |log 2R_j| m_j^2
  double const0 = 0;      // (2/pi) I_0 I_2
  double v_lattice = 0;   // V^{12}(log V)^{1/2} lattice estimate
  bool si_bound = false;  // si_lower <= H_si
  bool ie_bound = false;  // -H_ie <= const0
  bool v_bound = false;   // v_lattice^2 <= 2 pi (H + const0)
  bool all() const { return si_bound && ie_bound && v_bound; }
};

/// Requires nonnegative circulations and pieces with delta <= 2R_j < 1.
Lemma41Report lemma41_check(const VortexState2D& s, const PartitionGeometry& geometry,
                            const LatticeOptions& lattice = {});

/// Radial vorticity profile supported in (a, b) subset of (0, 1) with its
/// circulation function Gamma(r) = int_0^r s omega(s) ds tabulated.
class RadialProfile {
 public:
  RadialProfile(std::function<double(double)> omega, double a, double b, int table = 4096);
  /// Smooth bump centered in (0.1, 0.9).
  static RadialProfile bump();

  double omega(double r) const { return (r > a_ && r < b_) ? omega_(r) : 0.0; }
  double gamma(double r) const;
  double gamma_inf() const { return table_.back(); }
  double outer() const { return b_; }

 private:
  std::function<double(double)> omega_;
  double a_, b_;
  std::vector<double> table_;
};

/// omega^eps(x) = omega(|x|/eps) / (eps^2 sqrt|log eps|) and its steady
/// velocity u^eps(x) = x^perp Gamma(|x|/eps) / (|x|^2 sqrt|log eps|).
struct DmjFamily {
  const RadialProfile* profile;
  double eps;
  double scale() const;  // 1/sqrt|log eps|
  double vorticity(double x, double y) const;
  std::array<double, 2> velocity(double x, double y) const;
  double gamma_inf() const { return profile->gamma_inf(); }
};

DmjFamily dmj_family(const RadialProfile& profile, double eps);

/// Vorticity of the family sampled at cell centers of an n x n grid on
/// [-half, half]^2.
GridField sample_vorticity(const DmjFamily& fam, int n, double half = 1.0);

/// Planar velocity on a grid.
struct VectorGrid2D {
  GridField u, v;
};

VectorGrid2D sample_velocity(const DmjFamily& fam, int n, double half = 1.0, double shift_x = 0,
                             double shift_y = 0, double drift_x = 0, double drift_y = 0);

/// phi(x) = P(x - c) chi(|x - c|): a quadratic polynomial times a smooth
/// plateau cutoff (1 on [0, r_in], 0 beyond r_out).
struct TestFunction2D {
  double cx = 0, cy = 0;
  double r_in = 0.5, r_out = 0.95;
  // P(z) = c0 + c1 z1 + c2 z2 + c11 z1^2 + c12 z1 z2 + c22 z2^2
  double c0 = 1, c1 = 0, c2 = 0, c11 = 0, c12 = 0, c22 = 0;
  std::function<double(double)> psi = [](double) { return 1.0; };
  double psi_sup = 1.0;

  static TestFunction2D plateau(double r_in = 0.5, double r_out = 0.95);

  double value(double x, double y) const;
  std::array<double, 2> gradient(double x, double y) const;
  /// Sampled sup of the Hessian operator norm over the support, with a 5% margin.
  double hessian_bound() const;
};

struct ConcentrationRow {
  double eps = 0;
  double i11 = 0, i22 = 0, i12 = 0;
  double target = 0;  // pi Gamma_inf^2 phi(0)
  double rel_err = 0; // |i11 - target| / target (or |i11| when target = 0)
};

/// int phi u_i^eps u_j^eps by midpoint quadrature on an n x n grid.
std::vector<ConcentrationRow> concentration_check(const RadialProfile& profile, const TestFunction2D& phi,
                                                  const std::vector<double>& eps, int n, double half = 1.0);

/// max over the last half of the sequence of int_E |u - u^eps|^2.
double reduced_defect(const std::vector<VectorGrid2D>& seq, const VectorGrid2D& limit,
                      const std::vector<char>& mask);

/// ((grad phi(x) - grad phi(y)) / (4 pi |x - y|)) . ((x - y)^perp / |x - y|)
double delort_kernel(const TestFunction2D& phi, double x1, double x2, double y1, double y2);

/// Smooth radial cutoff equal to 1 on [0, 1] and 0 beyond 2.
double delort_cutoff(double t);

struct JDeltaSplit {
  double i_delta = 0;  // far part: (1 - rho) weighted
  double j_delta = 0;  // near part: rho weighted
  double j_bound = 0;  // 9 C_phi |psi|_inf |log 2 delta|^{-2 alpha} V_{2 delta}^2
  double v_2delta = 0; // V^{12}(log V)^alpha sum on the lattice of side 2 delta
  double c_phi = 0;
  bool holds() const { return std::abs(j_delta) <= j_bound * (1 + 1e-12); }
};

/// Splits sum_{i != j} G_i G_j H_phi(x_i, x_j) with the cutoff rho(|x - y| / delta).
JDeltaSplit jdelta_split(const VortexState2D& s, const TestFunction2D& phi, double delta, double alpha,
                         const std::function<double(double)>& rho = delort_cutoff, Exec exec = Exec::parallel);

/// Divergence-free test field Phi = psi(t) grad^perp chi with
/// chi(x) = (1 - |x - c|^2 / R^2)^4 on the disk of radius R.
struct DivFreeTest2D {
  double cx = 0, cy = 0, radius = 0.5;
  double horizon = 1.0;  // psi(t) = (1 + cos(pi t / T)) / 2 on [0, T]

  std::array<double, 2> field(double x, double y) const;
  /// D Phi (row i, column j: d Phi_i / d x_j).
  std::array<double, 4> jacobian(double x, double y) const;
  double psi(double t) const;
  double dpsi(double t) const;
};

struct VelocitySnapshot {
  double t = 0;
  VectorGrid2D u;
};

struct WeakResidual {
  double residual = 0;
  double time_term = 0;     // int int psi' Phi . u
  double flux_term = 0;     // int int psi (D Phi u) . u
  double initial_term = 0;  // psi(0) int Phi . u_0
  double scale = 0;         // sum of absolute term sizes
};

/// Space-time residual of the weak Euler form; snapshots must be equally
/// spaced in time, start at t = 0 and end at Phi's horizon.
WeakResidual weak_residual(const std::vector<VelocitySnapshot>& snaps, const DivFreeTest2D& phi);

/// Max |div Phi| over the grid cells (centered differences).
double divergence_defect(const DivFreeTest2D& phi, int n, double half = 1.0);

}  // namespace regladder
