#pragma once

// Orthonormal tensor Haar analysis, level energies and the estimates built
// on them: coefficient decay against the packing-norm shape, an H^{-1}
// upper bound, Besov sequence norms, and a spectral H^{-1} oracle.

#include <string>
#include <vector>

#include "regladder/field.hpp"

namespace regladder {

/// Haar coefficients of a cell-averaged field, zero-extended to a cube of
/// n = 2^J cells per axis. Detail levels carry absolute labels
/// k = k_coarse .. k_coarse + depth - 1 (support side 2^{-k} when the padded
/// box side is a power of two).
struct WaveletDecomposition {
  int dim = 1;
  int n = 1;             // padded cells per axis
  int depth = 0;         // number of detail levels
  int k_coarse = 0;      // label of the coarsest detail level
  double box_side = 1;   // padded box side
  Point origin{};        // lower corner of the padded box
  std::array<int, 3> source_shape{1, 1, 1};
  /// details[m]: level k_coarse + m, (2^N - 1) * 2^{(J - depth + m) N} values.
  std::vector<std::vector<double>> details;
  /// Scaling coefficients left at the coarsest level, row-major over
  /// 2^{(J - depth) N} positions.
  std::vector<double> scaling;

  int k_min() const { return k_coarse; }
  int k_max() const { return k_coarse + depth - 1; }
  const std::vector<double>& level(int k) const;
  double scaling_energy() const;
};

/// `depth` analysis steps from the finest level (-1: all the way down).
/// Grid sizes must be powers of two with equal spacing on every axis.
WaveletDecomposition haar_decompose(const GridField& f, int depth = -1);
/// Inverse transform, cropped back to the source shape.
GridField haar_reconstruct(const WaveletDecomposition& d, const Domain& domain);

/// Sum of squared coefficients at level k.
double level_energy(const WaveletDecomposition& d, int k);

struct DecayReport {
  std::vector<int> levels;
  std::vector<double> energies;
  std::vector<double> bounds;  // 2^{k(N - 2N/p')} (1 + k_+)^{-2 alpha}
  std::vector<double> ratios;
  double max_ratio = 0;
  double slope = 0;            // least-squares log2 slope of the energies
  double bound_slope = 0;      // N - 2N/p'
};

/// Level energies against the bound shape. Only levels >= `k_from` enter
/// the slope fit (default: all levels with nonzero energy).
DecayReport decay_check(const WaveletDecomposition& d, double p, double alpha, int k_from = -1000000);

/// sqrt(sum_k 2^{-2k} E_k + 2^{-2 k_coarse} |scaling|^2)
double hneg1_upper(const WaveletDecomposition& d);
/// sum_{k > K} 2^{-2k} E_k
double tail_hneg1(const WaveletDecomposition& d, int K);
/// Least-squares log2 slope of 2^{-2k} E_k over k >= k_from.
double tail_exponent(const WaveletDecomposition& d, int k_from);

/// (sum_m |c_m|^2 / (1 + |xi_m|^2) * |box|)^{1/2} with c_m the Fourier-series
/// coefficients of f on its periodized box.
double hneg1_fourier(const GridField& f);

struct BesovParams {
  double s = 0;
  double r = 2;    // primary integrability (1 and infinity allowed)
  double eta = 2;  // secondary index (infinity gives the sup over levels)
};

/// (sum_k [2^{k(s + N/2 - N/r)} ||d_k||_{l^r}]^eta)^{1/eta}; the scaling block
/// joins the coarsest level. With r = 2, s = 0 this is the L^2 norm and with
/// s = -1 it is hneg1_upper.
double besov_norm(const WaveletDecomposition& d, const BesovParams& bp);

enum class Embedding { compact, borderline, not_established };

struct EmbeddingVerdict {
  Embedding kind = Embedding::not_established;
  std::string rule;   // which inequality decided it
  std::string label;  // "X_2", "X_3" for the two named borderline spaces
  double lhs = 0;     // 1/p
  double rhs = 0;     // 1/q' - s/N
};

/// Compact embedding of V^{pq,alpha} into B^s_eta(L^q) in dimension N:
/// compact when 1/p < 1/q' - s/N, or on equality with alpha > 1/eta.
EmbeddingVerdict embedding_verdict(double p, double q, double alpha, double s, double eta, int N);

std::string to_string(Embedding e);

}  // namespace regladder
