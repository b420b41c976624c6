#pragma once

// Packing norms V^{pq}(log V)^alpha: l^q sums of radius-normalized,
// log-weighted masses over disjoint ball or cube collections. The true
// supremum over all collections is intractable, so three estimators are
// provided: dyadic lattices (certified lower bound), a greedy heuristic,
// and an exhaustive branch-and-bound on small candidate sets.

#include <string>
#include <vector>

#include "regladder/field.hpp"
#include "regladder/rearrangement.hpp"

namespace regladder {

struct NormParams {
  double p = 1;
  double q = 2;
  double alpha = 0;
  double r0 = kDefaultR0;

  /// Conjugate exponent p/(p-1); infinity for p = 1.
  double p_conj() const;
  /// Throws PreconditionError unless 1 <= p <= q <= inf, alpha >= 0, 0 < r0 < 1/2.
  void validate() const;
};

/// R^{-N/p'} |log R|^alpha, the weight multiplying a mass at scale R.
double term_weight(double radius, int dim, const NormParams& params);

/// ||t||_q for nonnegative t (q may be infinity).
double lq_norm(const std::vector<double>& terms, double q);

struct PackingTerm {
  enum class Shape { ball, cube } shape = Shape::ball;
  Point anchor{};      // ball center or cube lower corner
  double radius = 0;   // ball radius or cube side
  double mass = 0;
  double term = 0;
};

struct PackingEvaluation {
  std::vector<PackingTerm> terms;
  double lq_sum = 0;

  std::vector<double> term_values() const;
};

PackingEvaluation v_eval(MassView src, const NormParams& params, const BallCollection& balls);
PackingEvaluation v_eval(MassView src, const NormParams& params, const CubeCollection& cubes);
/// All occupied cells of one lattice, cube side as the scale.
PackingEvaluation v_eval(MassView src, const NormParams& params, const DyadicCubeCover& cover);

struct LatticeOptions {
  /// Finest level; -1 chooses the grid spacing for grid sources and
  /// `atom_max_level` for atomic sources (capped at side >= radius/8 when
  /// the atoms are smeared into blobs).
  int max_level = -1;
  int atom_max_level = 14;
  /// Shifts per axis: 2 gives the 2^N corner half-shifts.
  int shift_divisions = 2;
};

struct LatticeResult {
  double value = 0;
  bool divergence_flag = false;
  int best_level = -1;
  Point best_shift{};
  std::vector<int> levels;
  std::vector<double> per_level;  // best value at each level
  PackingEvaluation best;
};

/// Max of v_eval over dyadic levels with side <= r0 and the shifted lattices
/// of each level. `divergence_flag` marks values still growing at the
/// finest resolution.
LatticeResult vnorm_lattice(MassView src, const NormParams& params, const LatticeOptions& opts = {});

/// Levels visited by vnorm_lattice for this source.
std::vector<int> lattice_levels(MassView src, const NormParams& params, const LatticeOptions& opts = {});

struct CandidateOptions {
  int seeds = 5;        // balls kept per radius
  int radii = 4;        // radii r0 * 2^{-m}, m = 0..radii-1
  double min_radius = 0;
};

/// Candidate balls at each radius, seeded at the largest local masses with
/// non-maximum suppression so kept centers are at least one radius apart.
std::vector<Ball> candidate_universe(MassView src, const NormParams& params, const CandidateOptions& opts = {});

struct SearchResult {
  double value = 0;
  std::vector<Ball> collection;
};

/// Best-first, single-radius and 1-swap local search passes over a fixed
/// candidate set; returns the best disjoint sub-collection found.
SearchResult greedy_search(MassView src, const NormParams& params, const std::vector<Ball>& universe);

/// Greedy estimate on the candidate_universe built with `seeds` per radius.
SearchResult vnorm_greedy(MassView src, const NormParams& params, int seeds = 5, int radii = 4);

/// Exact maximum over disjoint sub-collections of `universe` (at most 24 balls).
SearchResult vnorm_bruteforce(MassView src, const NormParams& params, const std::vector<Ball>& universe);

struct MorreyOptions {
  double center_step = 0.25;  // center spacing as a fraction of the radius
  int radii_per_octave = 2;
  double min_radius = 0;      // 0 picks the grid spacing or 2^-14 for atoms
};

struct MorreyResult {
  double value = 0;
  Ball best{};
};

/// sup over single balls of R^{-N/p'}|log R|^alpha |f|(B_R).
MorreyResult morrey_norm(MassView src, double p, double alpha, double r0 = kDefaultR0, const MorreyOptions& opts = {});
/// Same sup restricted to the given balls.
MorreyResult morrey_over(MassView src, double p, double alpha, const std::vector<Ball>& balls);

/// (sum_j |B_j| (mass_j/|B_j|)^p)^{1/p}.
double haar_projection_lp(MassView src, double p, const BallCollection& balls);
double haar_projection_lp(MassView src, double p, const DyadicCubeCover& cover);

struct HolderCheck {
  double lhs = 0;  // sum_j (R_j^{-N/p'} int_{B_j}|f|)^p
  double rhs = 0;  // omega_N^{p-1} int_{union B_j} |f|^p
  bool holds() const { return lhs <= rhs * (1 + 1e-12) + 1e-300; }
};

/// Ball-wise Holder bound of the V^{pp} sum by the L^p integral, with the
/// unit-ball volume constant made explicit.
HolderCheck holder_check(const GridField& f, double p, const BallCollection& balls);

struct InterpolationCheck {
  double vq = 0, vp = 0, vinf = 0, bound = 0;
  bool holds() const { return vq <= bound * (1 + 1e-12) + 1e-300; }
};

/// Per-collection log-convexity ||t||_q <= ||t||_p^{p/q} ||t||_inf^{1-p/q}.
InterpolationCheck interpolation_check(const std::vector<double>& terms, double p, double q);

struct PackingMeasureResult {
  double estimate = 0;           // value at the finest radius
  std::vector<double> radii;     // decreasing
  std::vector<double> per_radius;
  bool divergence_flag = false;
};

/// Greedy h_1-packing proxy: sup of sum 2R over disjoint balls of radius R
/// centered in the support, for each R in `radii`.
PackingMeasureResult packing_measure_estimate(const std::vector<Point>& support, int dim,
                                              const std::vector<double>& radii);
/// Support taken as the centers of cells with nonzero magnitude.
PackingMeasureResult packing_measure_estimate(const GridField& mask, const std::vector<double>& radii);

struct LadderEntry {
  std::string name;
  double value = 0;
  bool finite = true;
};

struct LadderCheck {
  std::string name;
  double lhs = 0, rhs = 0;
  enum class Status { pass, fail, not_applicable } status = Status::pass;
};

struct LadderReport {
  std::vector<LadderEntry> entries;
  std::vector<LadderCheck> checks;
  bool all_pass() const;
};

LadderReport ladder_report(const GridField& f, double p, double alpha, double r0 = kDefaultR0,
                           const LatticeOptions& opts = {});

}  // namespace regladder
