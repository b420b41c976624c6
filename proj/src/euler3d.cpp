#include "regladder/euler3d.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>

#include "regladder/error.hpp"

namespace regladder {

namespace {

void require_vorticity(const GridField& w, const char* op) {
  require(w.dim() == 3 && w.components() == 3, op, "need a three-component field in 3D");
  const double h = w.spacing(0);
  require(std::abs(w.spacing(1) - h) <= 1e-12 * h && std::abs(w.spacing(2) - h) <= 1e-12 * h, op,
          "cells must be cubes");
}

double self_sum(const GridField& f, const GridField& g) {
  double s = 0;
  for (std::size_t c = 0; c < f.cell_count(); ++c)
    s += f(c, 0) * g(c, 0) + f(c, 1) * g(c, 1) + f(c, 2) * g(c, 2);
  return s;
}

double self_coefficient(const GridField& f) { return kCubeSelfEnergy * std::pow(f.spacing(0), 5); }

std::array<double, 3> vec(const GridField& w, std::size_t c) { return {w(c, 0), w(c, 1), w(c, 2)}; }

double norm3(const std::array<double, 3>& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

}  // namespace

Charges3D to_charges(const GridField& w) {
  require(w.components() == 3, "to_charges", "need a three-component field");
  Charges3D c;
  const double v = w.cell_volume();
  for (std::size_t i = 0; i < w.cell_count(); ++i) {
    if (w.magnitude(i) == 0) continue;
    const Point x = w.center(i);
    c.push(x[0], x[1], x[2], w(i, 0) * v, w(i, 1) * v, w(i, 2) * v);
  }
  return c;
}

double coulomb_bilinear(const GridField& f, const GridField& g, double cutoff, Exec exec) {
  require_vorticity(f, "coulomb_bilinear");
  require(f.domain() == g.domain() && f.shape() == g.shape() && g.components() == 3, "coulomb_bilinear",
          "fields must share a grid");
  const auto a = to_charges(f), b = to_charges(g);
  const double pairs = coulomb_cross_sum_3d(a, b, cutoff, exec).near;
  return (pairs + self_coefficient(f) * self_sum(f, g)) / (8 * kPi);
}

double coulomb_energy(const GridField& w, Exec exec) {
  require_vorticity(w, "coulomb_energy");
  const auto s = coulomb_pair_sum_3d(to_charges(w), kInf, exec);
  return (2 * s.total() + self_coefficient(w) * self_sum(w, w)) / (8 * kPi);
}

EnergyPartition3D partition_delta(const GridField& w, double delta, Exec exec) {
  require_vorticity(w, "partition_delta");
  require(delta > w.spacing(0), "partition_delta", "delta must exceed the grid spacing");
  const auto s = coulomb_pair_sum_3d(to_charges(w), delta, exec);
  EnergyPartition3D p;
  p.delta = delta;
  p.h_si = (2 * s.near + self_coefficient(w) * self_sum(w, w)) / (8 * kPi);
  p.h_ie = 2 * s.far / (8 * kPi);
  p.h_total = p.h_si + p.h_ie;
  return p;
}

double eta_kernel(double k, double delta) {
  const double x = k * delta;
  if (std::abs(x) < 1e-4) return delta * delta * (0.5 - x * x / 24);
  return (1 - std::cos(x)) / (k * k);
}

SpectralEnergy hsi_fourier(const GridField& w, double delta) {
  require_vorticity(w, "hsi_fourier");
  require(delta > 0, "hsi_fourier", "delta must be positive");
  std::array<int, 3> n{};
  std::array<double, 3> L{};
  for (int a = 0; a < 3; ++a) {
    n[a] = 2 * w.shape()[a];
    L[a] = 2 * w.domain().extent(a);
  }
  const std::size_t total = static_cast<std::size_t>(n[0]) * n[1] * n[2];
  const int half = n[2] / 2 + 1;
  const std::size_t out_size = static_cast<std::size_t>(n[0]) * n[1] * half;
  std::vector<double> in(total);
  std::vector<std::complex<double>> out(out_size);
  std::vector<double> power(out_size, 0.0);

  static std::mutex planner;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner);
    plan = fftw_plan_dft_r2c_3d(n[0], n[1], n[2], in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  for (int comp = 0; comp < 3; ++comp) {
    std::fill(in.begin(), in.end(), 0.0);
    for (std::size_t c = 0; c < w.cell_count(); ++c) {
      const auto ijk = w.unravel(c);
      in[(static_cast<std::size_t>(ijk[0]) * n[1] + ijk[1]) * n[2] + ijk[2]] = w(c, comp);
    }
    fftw_execute(plan);
    for (std::size_t m = 0; m < out_size; ++m) power[m] += std::norm(out[m]);
  }
  {
    std::lock_guard<std::mutex> lock(planner);
    fftw_destroy_plan(plan);
  }

  SpectralEnergy r;
  double sum = 0;
  const double inv_total2 = 1.0 / (static_cast<double>(total) * static_cast<double>(total));
  std::size_t idx = 0;
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < half; ++k, ++idx) {
        const int si = i <= n[0] / 2 ? i : i - n[0];
        const int sj = j <= n[1] / 2 ? j : j - n[1];
        const double x0 = 2 * kPi * si / L[0], x1 = 2 * kPi * sj / L[1], x2 = 2 * kPi * k / L[2];
        const double kk = std::sqrt(x0 * x0 + x1 * x1 + x2 * x2);
        const double eta = eta_kernel(kk, delta);
        if (kk > 0) r.max_eta_ratio = std::max(r.max_eta_ratio, (1 - std::cos(kk * delta)) / 2);
        const double mult = (k == 0 || (n[2] % 2 == 0 && k == n[2] / 2)) ? 1.0 : 2.0;
        sum += mult * power[idx] * inv_total2 * eta;
      }
  r.h_si = 0.5 * L[0] * L[1] * L[2] * sum;
  return r;
}

AlignmentResult alignment_measure(const GridField& w, double delta, double k0) {
  require(w.dim() == 3 && w.components() == 3, "alignment_measure", "need a three-component field in 3D");
  require(delta > 0 && k0 >= 0, "alignment_measure", "need delta > 0 and k0 >= 0");
  const auto& shape = w.shape();
  std::array<int, 3> reach{};
  for (int a = 0; a < 3; ++a) reach[a] = static_cast<int>(std::floor(delta / w.spacing(a) + 1e-9));
  std::vector<std::array<int, 3>> offsets;
  for (int i = -reach[0]; i <= reach[0]; ++i)
    for (int j = -reach[1]; j <= reach[1]; ++j)
      for (int k = -reach[2]; k <= reach[2]; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        const double d2 = std::pow(i * w.spacing(0), 2) + std::pow(j * w.spacing(1), 2) + std::pow(k * w.spacing(2), 2);
        if (d2 <= delta * delta * (1 + 1e-12)) offsets.push_back({i, j, k});
      }

  std::vector<std::size_t> hot;
  for (std::size_t c = 0; c < w.cell_count(); ++c)
    if (w.magnitude(c) > k0) hot.push_back(c);

  auto visit = [&](auto&& fn) {
    for (std::size_t c : hot) {
      const auto p = w.unravel(c);
      for (const auto& o : offsets) {
        const int i = p[0] + o[0], j = p[1] + o[1], k = p[2] + o[2];
        if (i < 0 || j < 0 || k < 0 || i >= shape[0] || j >= shape[1] || k >= shape[2]) continue;
        const std::size_t d = w.linear(i, j, k);
        if (w.magnitude(d) > k0) fn(c, d);
      }
    }
  };
  AlignmentResult r;
  double worst = 0;
  visit([&](std::size_t c, std::size_t d) {
    const auto a = vec(w, c), b = vec(w, d);
    const double na = norm3(a), nb = norm3(b);
    const double dx = a[0] / na - b[0] / nb, dy = a[1] / na - b[1] / nb, dz = a[2] / na - b[2] / nb;
    worst = std::max(worst, std::sqrt(dx * dx + dy * dy + dz * dz));
    ++r.pairs;
  });
  r.theta = std::min(1.0, worst / std::sqrt(2.0));
  visit([&](std::size_t c, std::size_t d) {
    const auto a = vec(w, c), b = vec(w, d);
    const double prod = norm3(a) * norm3(b);
    if (dot3(a, b) < (1 - r.theta * r.theta) * prod - 1e-12 * prod) ++r.violations;
  });
  return r;
}

std::pair<GridField, GridField> split_height(const GridField& w, double k0) {
  require(k0 >= 0, "split_height", "k0 must be nonnegative");
  GridField minus(w.domain(), w.shape(), w.components()), plus(w.domain(), w.shape(), w.components());
  for (std::size_t c = 0; c < w.cell_count(); ++c) {
    GridField& target = w.magnitude(c) > k0 ? plus : minus;
    for (int q = 0; q < w.components(); ++q) target(c, q) = w(c, q);
  }
  return {std::move(minus), std::move(plus)};
}

double cell_constancy_defect(const GridField& w, double side) {
  require(side > 0, "cell_constancy_defect", "side must be positive");
  const auto& lo = w.domain().lower;
  auto key = [&](std::size_t c) {
    const Point x = w.center(c);
    std::array<long, 3> k{};
    for (int a = 0; a < w.dim(); ++a) k[a] = static_cast<long>(std::floor((x[a] - lo[a]) / side));
    return k;
  };
  std::map<std::array<long, 3>, std::pair<std::array<double, 3>, int>> avg;
  for (std::size_t c = 0; c < w.cell_count(); ++c) {
    auto& e = avg[key(c)];
    for (int q = 0; q < w.components(); ++q) e.first[q] += w(c, q);
    ++e.second;
  }
  double worst = 0;
  for (std::size_t c = 0; c < w.cell_count(); ++c) {
    const auto& e = avg.at(key(c));
    double s = 0;
    for (int q = 0; q < w.components(); ++q) s += std::pow(w(c, q) - e.first[q] / e.second, 2);
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

double alignment_lower_bound(const GridField& w_plus, const std::vector<Ball>& balls, double theta) {
  double sum = 0;
  for (const auto& b : balls) {
    double m = 0;
    for (std::size_t c = 0; c < w_plus.cell_count(); ++c)
      if (distance(w_plus.center(c), b.center, 3) <= b.radius) m += w_plus.magnitude(c);
    m *= w_plus.cell_volume();
    sum += m * m / b.radius;
  }
  return (1 - theta * theta) / (16 * kPi) * sum;
}

bool AlignmentChainReport::all_hold() const {
  return std::all_of(links.begin(), links.end(), [](const ChainLink& l) { return l.holds(); });
}

AlignmentChainReport thm42_chain(const GridField& w, const AlignmentParams& params, double h0, Exec exec) {
  require_vorticity(w, "thm42_chain");
  require(params.theta >= 0 && params.theta < 1, "thm42_chain", "theta must lie in [0, 1)");
  require(params.delta > w.spacing(0), "thm42_chain", "delta must exceed the grid spacing");
  const double h = w.spacing(0);

  AlignmentChainReport r;
  r.theta = params.theta;
  r.h0 = h0;
  r.theta_measured = alignment_measure(w, params.delta, params.k0).theta;
  r.applicable = r.theta_measured <= params.theta + 1e-12;

  const auto [minus, plus] = split_height(w, params.k0);
  const auto part = partition_delta(w, params.delta, exec);
  r.h = part.h_total;
  r.h_si = part.h_si;
  r.h_ie = part.h_ie;
  r.b_minus = coulomb_bilinear(minus, minus, params.delta, exec);
  r.b_cross = coulomb_bilinear(minus, plus, params.delta, exec);
  r.b_plus = coulomb_bilinear(plus, plus, params.delta, exec);

  const auto support = to_charges(w);
  double diam2 = 0;
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t j = i + 1; j < support.size(); ++j)
      diam2 = std::max(diam2, std::pow(support.x[i] - support.x[j], 2) + std::pow(support.y[i] - support.y[j], 2) +
                                  std::pow(support.z[i] - support.z[j], 2));
  r.diameter = support.size() ? std::sqrt(diam2) + h * std::sqrt(3.0) : 0.0;
  r.const_k0 = kPi / 24 * params.k0 * params.k0 * std::pow(r.diameter, 3) * params.delta * params.delta;

  r.r0 = std::min(params.delta / 4, kDefaultR0);
  const NormParams vp{1.2, 2, 0, r.r0};
  CandidateOptions copt;
  copt.min_radius = h;
  const auto universe = candidate_universe(plus, vp, copt);
  r.balls = greedy_search(plus, vp, universe).collection;
  const double one_minus = 1 - params.theta * params.theta;
  r.lower_bound = alignment_lower_bound(plus, r.balls, params.theta);
  r.collection_sum = r.lower_bound * 16 * kPi / one_minus;
  r.final_rhs = 32 * kPi / one_minus * (2 * h0 + 7 * r.const_k0);
  const double lat = vnorm_lattice(plus, vp).value;
  r.v_lattice_sq = lat * lat;
  r.constancy_defect = cell_constancy_defect(w, params.delta);

  const double scale = std::abs(r.b_minus) + 2 * std::abs(r.b_cross) + std::abs(r.b_plus);
  r.links = {
      {"positivity of H_si(w-)", -r.b_minus, 0},
      {"positivity of H_si(w+)", -r.b_plus, 0},
      {"bilinear expansion of H_si", std::abs(r.b_minus + 2 * r.b_cross + r.b_plus - r.h_si), 1e-9 * scale},
      {"Cauchy-Schwarz", std::abs(r.b_cross), std::sqrt(std::max(0.0, r.b_minus * r.b_plus))},
      {"weighted AM-GM", 2 * std::abs(r.b_cross), 0.5 * r.b_plus + 8 * r.b_minus},
      {"H_si <= 2H", r.h_si, 2 * r.h},
      {"H <= H0", r.h, h0},
      {"bounded part below Const_K0", r.b_minus, r.const_k0},
      {"H_si(w+)/2 <= 2 H0 + 7 Const_K0", 0.5 * r.b_plus, 2 * h0 + 7 * r.const_k0},
      {"ball-collection lower bound", r.lower_bound, r.b_plus},
      {"V^{6/5,2} bound", r.collection_sum, r.final_rhs},
  };
  return r;
}

MorreyVsVReport morrey_vs_v_check(const AtomicMeasure& mu, const std::vector<Point>& support, double r_min,
                                  double r0) {
  require(mu.dim() == 3, "morrey_vs_v_check", "need a measure in R^3");
  require(r_min > 0 && r_min < r0, "morrey_vs_v_check", "need 0 < r_min < r0");
  MorreyVsVReport r;
  const double E = mu.domain().max_extent();
  LatticeOptions lopt;
  lopt.max_level = static_cast<int>(std::floor(std::log2(E / r_min) + 1e-9));
  const double v = vnorm_lattice(mu, NormParams{1.2, 2, 0, r0}, lopt).value;
  r.v_sq = v * v;
  MorreyOptions mopt;
  mopt.min_radius = r_min;
  r.morrey = morrey_norm(mu, 1.5, 0, r0, mopt).value;
  std::vector<double> radii;
  for (double R = r0; R >= r_min * (1 - 1e-9); R /= 2) radii.push_back(R);
  const auto pm = packing_measure_estimate(support, 3, radii);
  r.packing = pm.estimate;
  r.applicable = !pm.divergence_flag;
  r.rhs = r.packing * r.morrey * r.morrey;
  r.holds = r.v_sq <= r.rhs * (1 + 1e-12);
  return r;
}

}  // namespace regladder
