#pragma once

// O(n^2) pair sums shared by the vorticity modules. Every kernel has a
// serial reference path and an OpenMP path selected by `Exec`; both visit
// the same pairs, so results differ only by summation order.

#include <span>
#include <vector>

namespace regladder {

enum class Exec { serial, parallel };

/// Planar vortices: positions and circulations.
struct Vortices2D {
  std::vector<double> x, y, w;
  std::size_t size() const { return w.size(); }
};

/// Log potential of a uniform disk of radius delta seen from distance r:
/// log r outside, log delta + (r^2/delta^2 - 1)/2 inside. delta = 0 gives log r.
double patch_potential(double r, double delta);

/// Velocity at the targets induced by uniform-patch vortices of radius
/// `delta` (rigid rotation inside, point vortex outside). Sources sitting
/// exactly on a target contribute nothing.
void patch_velocity_2d(const Vortices2D& src, double delta, std::span<const double> tx, std::span<const double> ty,
                       std::span<double> u, std::span<double> v, Exec exec = Exec::parallel);

/// sum_{i<j} w_i w_j patch_potential(|x_i - x_j|, delta)
double log_pair_sum_2d(const Vortices2D& src, double delta, Exec exec = Exec::parallel);

/// Vector charges in space (vorticity cells or atoms).
struct Charges3D {
  std::vector<double> x, y, z;
  std::vector<double> wx, wy, wz;
  std::size_t size() const { return x.size(); }
  void push(double px, double py, double pz, double ax, double ay, double az);
};

struct CoulombSplit {
  double near = 0;  // pairs with |x - y| <= cutoff
  double far = 0;
  double total() const { return near + far; }
};

/// sum_{i<j} <w_i, w_j> / |x_i - x_j|, split at `cutoff`.
CoulombSplit coulomb_pair_sum_3d(const Charges3D& c, double cutoff, Exec exec = Exec::parallel);

/// sum_{i,j} <a_i, b_j> / |x_i - x_j| over pairs at positive distance,
/// split at `cutoff`.
CoulombSplit coulomb_cross_sum_3d(const Charges3D& a, const Charges3D& b, double cutoff,
                                  Exec exec = Exec::parallel);

}  // namespace regladder
