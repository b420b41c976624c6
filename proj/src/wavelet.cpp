#include "regladder/wavelet.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>

#include "regladder/error.hpp"
#include "regladder/rearrangement.hpp"

namespace regladder {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

int log2_exact(long n) {
  int j = 0;
  while ((1L << j) < n) ++j;
  return (1L << j) == n ? j : -1;
}

struct Cube3 {
  int dim;
  long n;
  std::vector<double> v;
  std::size_t at(long i, long j, long k) const {
    const long nj = dim > 1 ? n : 1, nk = dim > 2 ? n : 1;
    return static_cast<std::size_t>((i * nj + j) * nk + k);
  }
};

std::array<long, 3> block_extent(int dim, long b) {
  std::array<long, 3> e{1, 1, 1};
  for (int a = 0; a < dim; ++a) e[a] = b;
  return e;
}

/// One forward Haar step on the leading block of side b, every axis.
void forward_step(Cube3& c, long b) {
  std::vector<double> line(static_cast<std::size_t>(b));
  const auto e = block_extent(c.dim, b);
  for (int axis = 0; axis < c.dim; ++axis) {
    std::array<long, 3> lim = e;
    lim[axis] = 1;
    for (long i = 0; i < lim[0]; ++i)
      for (long j = 0; j < lim[1]; ++j)
        for (long k = 0; k < lim[2]; ++k) {
          auto idx = [&](long t) {
            std::array<long, 3> p{i, j, k};
            p[axis] = t;
            return c.at(p[0], p[1], p[2]);
          };
          for (long t = 0; t < b; ++t) line[static_cast<std::size_t>(t)] = c.v[idx(t)];
          for (long t = 0; t < b / 2; ++t) {
            const double x0 = line[static_cast<std::size_t>(2 * t)], x1 = line[static_cast<std::size_t>(2 * t + 1)];
            c.v[idx(t)] = (x0 + x1) * kInvSqrt2;
            c.v[idx(t + b / 2)] = (x0 - x1) * kInvSqrt2;
          }
        }
  }
}

void inverse_step(Cube3& c, long b) {
  std::vector<double> line(static_cast<std::size_t>(b));
  const auto e = block_extent(c.dim, b);
  for (int axis = c.dim - 1; axis >= 0; --axis) {
    std::array<long, 3> lim = e;
    lim[axis] = 1;
    for (long i = 0; i < lim[0]; ++i)
      for (long j = 0; j < lim[1]; ++j)
        for (long k = 0; k < lim[2]; ++k) {
          auto idx = [&](long t) {
            std::array<long, 3> p{i, j, k};
            p[axis] = t;
            return c.at(p[0], p[1], p[2]);
          };
          for (long t = 0; t < b; ++t) line[static_cast<std::size_t>(t)] = c.v[idx(t)];
          for (long t = 0; t < b / 2; ++t) {
            const double lo = line[static_cast<std::size_t>(t)], hi = line[static_cast<std::size_t>(t + b / 2)];
            c.v[idx(2 * t)] = (lo + hi) * kInvSqrt2;
            c.v[idx(2 * t + 1)] = (lo - hi) * kInvSqrt2;
          }
        }
  }
}

/// Visits detail slots of the block of side b in (position, type) order.
template <class Fn>
void for_each_detail(int dim, long b, Fn&& fn) {
  const long half = b / 2;
  const auto hx = block_extent(dim, half);
  const int types = (1 << dim) - 1;
  for (long i = 0; i < hx[0]; ++i)
    for (long j = 0; j < hx[1]; ++j)
      for (long k = 0; k < hx[2]; ++k)
        for (int e = 1; e <= types; ++e) {
          std::array<long, 3> p{i, j, k};
          for (int a = 0; a < dim; ++a)
            if (e >> a & 1) p[a] += half;
          fn(p);
        }
}

template <class Fn>
void for_each_scaling(int dim, long half, Fn&& fn) {
  const auto hx = block_extent(dim, half);
  for (long i = 0; i < hx[0]; ++i)
    for (long j = 0; j < hx[1]; ++j)
      for (long k = 0; k < hx[2]; ++k) fn(std::array<long, 3>{i, j, k});
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace

const std::vector<double>& WaveletDecomposition::level(int k) const {
  require(k >= k_min() && k <= k_max(), "level_energy", "level " + std::to_string(k) + " out of range");
  return details[static_cast<std::size_t>(k - k_coarse)];
}

double WaveletDecomposition::scaling_energy() const {
  double s = 0;
  for (double c : scaling) s += c * c;
  return s;
}

WaveletDecomposition haar_decompose(const GridField& f, int depth) {
  require(f.components() == 1, "haar_decompose", "scalar field required");
  const int dim = f.dim();
  long n = 1;
  const double h = f.spacing(0);
  for (int a = 0; a < dim; ++a) {
    require(log2_exact(f.shape()[a]) >= 0, "haar_decompose", "grid sizes must be powers of two");
    require(std::abs(f.spacing(a) - h) <= 1e-12 * h, "haar_decompose", "grid spacing must agree on every axis");
    n = std::max<long>(n, f.shape()[a]);
  }
  const int J = log2_exact(n);
  if (depth < 0) depth = J;
  require(depth <= J, "haar_decompose", "depth exceeds log2 of the grid size");

  WaveletDecomposition d;
  d.dim = dim;
  d.n = static_cast<int>(n);
  d.depth = depth;
  d.box_side = static_cast<double>(n) * h;
  d.origin = f.domain().lower;
  d.source_shape = f.shape();
  const double lg = std::log2(d.box_side);
  const int k_box = std::abs(lg - std::round(lg)) < 1e-9 ? -static_cast<int>(std::lround(lg)) : 0;
  d.k_coarse = k_box + J - depth;

  Cube3 c{dim, n, {}};
  c.v.assign(static_cast<std::size_t>(std::pow(n, dim)), 0.0);
  const double norm = std::pow(h, dim / 2.0);
  for (std::size_t cell = 0; cell < f.cell_count(); ++cell) {
    const auto ijk = f.unravel(cell);
    c.v[c.at(ijk[0], ijk[1], ijk[2])] = f(cell) * norm;
  }

  d.details.resize(static_cast<std::size_t>(depth));
  for (int step = 0; step < depth; ++step) {
    const long b = n >> step;
    forward_step(c, b);
    auto& out = d.details[static_cast<std::size_t>(depth - 1 - step)];
    out.reserve(static_cast<std::size_t>(((1 << dim) - 1) * std::pow(b / 2, dim)));
    for_each_detail(dim, b, [&](const std::array<long, 3>& p) { out.push_back(c.v[c.at(p[0], p[1], p[2])]); });
  }
  for_each_scaling(dim, n >> depth, [&](const std::array<long, 3>& p) { d.scaling.push_back(c.v[c.at(p[0], p[1], p[2])]); });
  return d;
}

GridField haar_reconstruct(const WaveletDecomposition& d, const Domain& domain) {
  Cube3 c{d.dim, d.n, {}};
  c.v.assign(static_cast<std::size_t>(std::pow(d.n, d.dim)), 0.0);
  std::size_t s = 0;
  for_each_scaling(d.dim, d.n >> d.depth, [&](const std::array<long, 3>& p) { c.v[c.at(p[0], p[1], p[2])] = d.scaling[s++]; });
  for (int step = d.depth - 1; step >= 0; --step) {
    const long b = static_cast<long>(d.n) >> step;
    const auto& lv = d.details[static_cast<std::size_t>(d.depth - 1 - step)];
    std::size_t t = 0;
    for_each_detail(d.dim, b, [&](const std::array<long, 3>& p) { c.v[c.at(p[0], p[1], p[2])] = lv[t++]; });
    inverse_step(c, b);
  }
  GridField f(domain, d.source_shape, 1);
  require(std::abs(f.spacing(0) * d.n - d.box_side) <= 1e-9 * d.box_side, "haar_reconstruct",
          "domain does not match the decomposition");
  const double norm = std::pow(f.spacing(0), -d.dim / 2.0);
  for (std::size_t cell = 0; cell < f.cell_count(); ++cell) {
    const auto ijk = f.unravel(cell);
    f(cell) = c.v[c.at(ijk[0], ijk[1], ijk[2])] * norm;
  }
  return f;
}

double level_energy(const WaveletDecomposition& d, int k) {
  double s = 0;
  for (double x : d.level(k)) s += x * x;
  return s;
}

DecayReport decay_check(const WaveletDecomposition& d, double p, double alpha, int k_from) {
  require(p >= 1 && alpha >= 0, "decay_check", "need p >= 1 and alpha >= 0");
  const int N = d.dim;
  const double two_n_over_pc = p == 1 ? 0.0 : 2.0 * N * (p - 1) / p;
  DecayReport r;
  r.bound_slope = N - two_n_over_pc;
  std::vector<double> xs, ys;
  for (int k = d.k_min(); k <= d.k_max(); ++k) {
    const double E = level_energy(d, k);
    const double b = std::pow(2.0, k * r.bound_slope) * std::pow(1.0 + std::max(k, 0), -2 * alpha);
    r.levels.push_back(k);
    r.energies.push_back(E);
    r.bounds.push_back(b);
    r.ratios.push_back(E / b);
    r.max_ratio = std::max(r.max_ratio, E / b);
    if (E > 0 && k >= k_from) {
      xs.push_back(k);
      ys.push_back(std::log2(E));
    }
  }
  r.slope = lsq_slope(xs, ys);
  return r;
}

double hneg1_upper(const WaveletDecomposition& d) {
  double s = std::pow(2.0, -2.0 * d.k_coarse) * d.scaling_energy();
  for (int k = d.k_min(); k <= d.k_max(); ++k) s += std::pow(2.0, -2.0 * k) * level_energy(d, k);
  return std::sqrt(s);
}

double tail_hneg1(const WaveletDecomposition& d, int K) {
  require(K >= d.k_min() - 1 && K <= d.k_max(), "tail_hneg1", "K out of the level range");
  double s = 0;
  for (int k = K + 1; k <= d.k_max(); ++k) s += std::pow(2.0, -2.0 * k) * level_energy(d, k);
  return s;
}

double tail_exponent(const WaveletDecomposition& d, int k_from) {
  std::vector<double> xs, ys;
  for (int k = std::max(k_from, d.k_min()); k <= d.k_max(); ++k) {
    const double E = level_energy(d, k);
    if (E <= 0) continue;
    xs.push_back(k);
    ys.push_back(std::log2(E) - 2.0 * k);
  }
  return lsq_slope(xs, ys);
}

double hneg1_fourier(const GridField& f) {
  require(f.components() == 1, "hneg1_fourier", "scalar field required");
  const int dim = f.dim();
  std::array<int, 3> n = f.shape();
  const int last = n[dim - 1];
  const int half = last / 2 + 1;
  std::size_t total = f.cell_count();
  std::size_t out_size = total / static_cast<std::size_t>(last) * static_cast<std::size_t>(half);

  std::vector<double> in(f.values().begin(), f.values().end());
  std::vector<std::complex<double>> out(out_size);
  {
    static std::mutex planner;
    std::lock_guard<std::mutex> lock(planner);
    fftw_plan plan = fftw_plan_dft_r2c(dim, n.data(), in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                       FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  std::array<double, 3> kscale{};
  for (int a = 0; a < dim; ++a) kscale[a] = 2 * kPi / f.domain().extent(a);
  const std::array<int, 3> ext{n[0], dim > 1 ? n[1] : 1, dim > 2 ? n[2] : 1};
  std::array<int, 3> oext = ext;
  oext[dim - 1] = half;
  double sum = 0;
  std::size_t idx = 0;
  for (int i = 0; i < oext[0]; ++i)
    for (int j = 0; j < oext[1]; ++j)
      for (int k = 0; k < oext[2]; ++k, ++idx) {
        const std::array<int, 3> m{i, j, k};
        double xi2 = 0;
        for (int a = 0; a < dim; ++a) {
          const int s = m[a] <= ext[a] / 2 ? m[a] : m[a] - ext[a];
          xi2 += std::pow(kscale[a] * s, 2);
        }
        const int ml = m[dim - 1];
        const double mult = (ml == 0 || (last % 2 == 0 && ml == last / 2)) ? 1.0 : 2.0;
        const double c2 = std::norm(out[idx]) / (static_cast<double>(total) * static_cast<double>(total));
        sum += mult * c2 / (1 + xi2);
      }
  return std::sqrt(sum * f.domain().measure());
}

double besov_norm(const WaveletDecomposition& d, const BesovParams& bp) {
  require(bp.r >= 1 && bp.eta >= 1, "besov_norm", "need r >= 1 and eta >= 1");
  const int N = d.dim;
  const double n_over_r = std::isinf(bp.r) ? 0.0 : N / bp.r;
  auto lr = [&](const std::vector<double>& v, double acc_pow, double acc) {
    // acc carries the partial l^r sum (or max) of earlier blocks of the level.
    for (double x : v) acc = std::isinf(bp.r) ? std::max(acc, std::abs(x)) : acc + std::pow(std::abs(x), acc_pow);
    return acc;
  };
  double total = 0;
  const int k_hi = std::max(d.k_max(), d.k_coarse);
  for (int k = d.k_coarse; k <= k_hi; ++k) {
    double acc = 0;
    if (k == d.k_coarse) acc = lr(d.scaling, bp.r, acc);
    if (k <= d.k_max() && d.depth > 0) acc = lr(d.level(k), bp.r, acc);
    const double norm_k = std::isinf(bp.r) ? acc : std::pow(acc, 1.0 / bp.r);
    const double term = std::pow(2.0, k * (bp.s + N / 2.0 - n_over_r)) * norm_k;
    total = std::isinf(bp.eta) ? std::max(total, term) : total + std::pow(term, bp.eta);
  }
  return std::isinf(bp.eta) ? total : std::pow(total, 1.0 / bp.eta);
}

EmbeddingVerdict embedding_verdict(double p, double q, double alpha, double s, double eta, int N) {
  require(p >= 1 && q >= 1 && alpha >= 0 && eta >= 1, "embedding_verdict", "invalid exponents");
  require(N >= 1 && N <= 3, "embedding_verdict", "dimension must be 1, 2 or 3");
  EmbeddingVerdict v;
  v.lhs = 1.0 / p;
  const double inv_qc = std::isinf(q) ? 1.0 : 1.0 - 1.0 / q;
  v.rhs = inv_qc - s / N;
  const double tol = 1e-12;
  const double inv_eta = std::isinf(eta) ? 0.0 : 1.0 / eta;
  if (v.lhs < v.rhs - tol) {
    v.kind = Embedding::compact;
    v.rule = "1/p < 1/q' - s/N";
  } else if (std::abs(v.lhs - v.rhs) <= tol) {
    if (alpha > inv_eta + tol) {
      v.kind = Embedding::compact;
      v.rule = "1/p = 1/q' - s/N and alpha > 1/eta";
    } else {
      v.kind = Embedding::borderline;
      v.rule = "1/p = 1/q' - s/N and alpha <= 1/eta";
      const bool h1 = q == 2 && s == -1 && eta == 2;
      if (h1 && N == 2 && std::abs(p - 1) < tol && std::abs(alpha - 0.5) < tol) v.label = "X_2";
      if (h1 && N == 3 && std::abs(p - 1.2) < tol && alpha == 0) v.label = "X_3";
    }
  } else {
    v.kind = Embedding::not_established;
    v.rule = "1/p > 1/q' - s/N";
  }
  return v;
}

std::string to_string(Embedding e) {
  switch (e) {
    case Embedding::compact: return "compact";
    case Embedding::borderline: return "borderline";
    default: return "not-established";
  }
}

}  // namespace regladder
