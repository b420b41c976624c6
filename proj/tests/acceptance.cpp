// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset, or --calibrate to print the band used by
// criterion 5.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "regladder/euler2d.hpp"
#include "regladder/euler3d.hpp"
#include "regladder/field.hpp"
#include "regladder/packing.hpp"
#include "regladder/rearrangement.hpp"
#include "regladder/wavelet.hpp"

using namespace regladder;

namespace {

// Ratio hneg1_upper / hneg1_fourier on smooth_field_2d(seed) for seeds
// 1000-1099 spans [1.3932, 5.4347]; the band widens that by 10% each way.
constexpr double kHneg1BandLo = 1.3932 / 1.1;
constexpr double kHneg1BandHi = 5.4347 * 1.1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string paper_text() {
  std::ifstream in(REGLADDER_PAPER);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool paper_has(const std::string& snippet) {
  static const std::string text = paper_text();
  return text.find(snippet) != std::string::npos;
}

double bump4(double r, double R) {
  if (r >= R) return 0.0;
  const double q = 1 - r * r / (R * R);
  return q * q * q * q;
}

GridField random_cells(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0, 1);
  GridField f(Domain::cube(2, 0, 1), {n, n, 1});
  for (auto& v : f.values()) v = u(rng);
  return f;
}

GridField smooth_field_2d(std::uint64_t seed, int n = 64) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(0.25, 0.75), r(0.08, 0.2), a(-1, 1);
  struct B {
    double x, y, r, a;
  };
  std::vector<B> bs;
  for (int k = 0; k < 4; ++k) bs.push_back({c(rng), c(rng), r(rng), a(rng)});
  return GridField::sample(Domain::cube(2, 0, 1), {n, n, 1}, [&](const Point& x) {
    double s = 0;
    for (const auto& b : bs) s += b.a * bump4(std::hypot(x[0] - b.x, x[1] - b.y), b.r);
    return s;
  });
}

// ------------------------------------------------------------------------

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const NormParams prm{1.5, 2, 0.5, 0.25};
  int violations = 0, equal = 0, oversize = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const auto f = random_cells(rng, 8);
    const auto universe = candidate_universe(f, prm, {5, 4, 0});
    oversize += universe.size() > 20;
    const double g = vnorm_greedy(f, prm, 5, 4).value;
    const double b = vnorm_bruteforce(f, prm, universe).value;
    violations += g > b * (1 + 1e-12);
    equal += g >= b * (1 - 1e-12);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {violations == 0 && equal >= 80 && oversize == 0 && secs < 60,
          fmt("violations=%d equal=%d/100 oversize=%d runtime=%.1fs", violations, equal, oversize, secs)};
}

Outcome criterion2() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  int holder_bad = 0, interp_bad = 0;
  for (int draw = 0; draw < 200; ++draw) {
    const auto f = (draw % 2 == 0) ? random_cells(rng, 32) : smooth_field_2d(rng(), 32);
    const double p = 1 + 3 * u(rng);
    const double q = (draw % 5 == 0) ? kInf : p * (1 + 3 * u(rng));
    const double alpha = (draw % 3 == 0) ? 0.0 : u(rng);
    std::vector<Ball> balls;
    const int want = 1 + static_cast<int>(u(rng) * 12);
    for (int tries = 0; tries < 400 && static_cast<int>(balls.size()) < want; ++tries) {
      const double r = 0.02 + 0.2 * u(rng);
      Ball b{{r + (1 - 2 * r) * u(rng), r + (1 - 2 * r) * u(rng), 0}, r};
      bool ok = true;
      for (const auto& x : balls) ok &= BallCollection::disjoint(x, b, 2);
      if (ok) balls.push_back(b);
    }
    const BallCollection coll(balls, 2);
    holder_bad += !holder_check(f, p, coll).holds();
    const auto ev = v_eval(f, NormParams{p, q, alpha, 0.25}, coll);
    if (!std::isinf(q)) interp_bad += !interpolation_check(ev.term_values(), p, q).holds();
  }
  return {holder_bad == 0 && interp_bad == 0, fmt("holder violations=%d interpolation violations=%d over 200 draws",
                                                  holder_bad, interp_bad)};
}

Outcome criterion3() {
  bool ok = paper_has("lies *strictly* inside");
  std::string detail = ok ? "" : "paper snippet missing; ";
  for (double p : {1.5, 2.0, 3.0}) {
    const double pc = p / (p - 1);
    std::vector<double> lj, lv, morrey;
    for (int J = 4; J <= 12; ++J) {
      const int n = 1 << (J + 4);
      const double h = 1.0 / n;
      GridField f(Domain::cube(1, 0, 1), {n, 1, 1});
      for (int i = 0; i < n; ++i) f(i) = pc * (std::pow((i + 1) * h, 1 / pc) - std::pow(i * h, 1 / pc)) / h;
      std::vector<Cube> cubes;
      for (int k = 2; k < J + 2; ++k) cubes.push_back({{std::ldexp(1.0, -k), 0, 0}, std::ldexp(1.0, -k)});
      const double v = v_eval(f, NormParams{p, p, 0, 0.25}, CubeCollection(cubes, 1)).lq_sum;
      lj.push_back(std::log(J));
      lv.push_back(std::log(v));
      morrey.push_back(morrey_norm(f, p, 0, 0.25).value);
    }
    const double s = slope(lj, lv);
    const double band = *std::max_element(morrey.begin(), morrey.end()) / *std::min_element(morrey.begin(), morrey.end());
    const bool good = std::abs(s - 1 / p) <= 0.05 && band <= 1.5;
    ok &= good;
    detail += fmt("p=%.1f slope=%.4f (1/p=%.4f) morrey band=%.3f; ", p, s, 1 / p, band);
  }
  return {ok, detail};
}

Outcome criterion4() {
  bool ok = true;
  std::string detail;
  for (double p : {1.5, 2.0, 3.0}) {
    double lo = kInf, hi = 0;
    for (int field = 0; field < 50; ++field) {
      std::mt19937_64 rng(4000 + field);
      const auto base = field % 2 == 0 ? random_cells(rng, 8) : smooth_field_2d(rng(), 8);
      for (int level = 0; level < 4; ++level) {
        const int n = 16 << level;
        GridField f = field % 2 == 1 ? smooth_field_2d(4000 + field, n) : GridField(base.domain(), {n, n, 1});
        if (field % 2 == 0)
          for (std::size_t c = 0; c < f.cell_count(); ++c) {
            const auto ij = f.unravel(c);
            f(c) = base(base.linear(ij[0] * 8 / n, ij[1] * 8 / n));
          }
        const double weak = lorentz_zygmund_norm(f, p, kInf, 0).value;
        const double v = vnorm_lattice(f, NormParams{p, p, 0, 0.25}).value;
        const double ratio = weak / v;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    }
    ok &= hi / lo <= 10;
    detail += fmt("p=%.1f ratio in [%.3f, %.3f] spread=%.2f; ", p, lo, hi, hi / lo);
  }
  return {ok, detail};
}

double hneg1_ratio(std::uint64_t seed, double* parseval_err) {
  const auto f = smooth_field_2d(seed);
  const auto d = haar_decompose(f);
  double e = d.scaling_energy();
  for (int k = d.k_min(); k <= d.k_max(); ++k) e += level_energy(d, k);
  const double l2 = std::pow(f.l2_norm(), 2);
  if (parseval_err) *parseval_err = std::abs(e - l2) / l2;
  return hneg1_upper(d) / hneg1_fourier(f);
}

Outcome criterion5() {
  double worst = 0, lo = kInf, hi = 0;
  int outside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    double err = 0;
    const double r = hneg1_ratio(seed, &err);
    worst = std::max(worst, err);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    outside += r < kHneg1BandLo || r > kHneg1BandHi;
  }
  return {worst <= 1e-9 && outside == 0,
          fmt("max Parseval rel err=%.2e; ratio in [%.4f, %.4f], band [%.4f, %.4f], outside=%d", worst, lo, hi,
              kHneg1BandLo, kHneg1BandHi, outside)};
}

Outcome criterion6() {
  bool ok = true;
  std::string detail;
  for (int dim = 1; dim <= 3; ++dim) {
    const int n = dim == 1 ? 1024 : dim == 2 ? 256 : 64;
    std::array<int, 3> shape{1, 1, 1};
    for (int a = 0; a < dim; ++a) shape[a] = n;
    GridField f(Domain::cube(dim, 0, 1), shape);
    f(f.linear(n / 2 + 3, dim > 1 ? n / 3 : 0, dim > 2 ? n / 5 : 0)) = 1.0 / f.cell_volume();
    const double s = decay_check(haar_decompose(f), 1.0, 0.0).slope;
    ok &= std::abs(s - dim) <= 0.2;
    detail += fmt("N=%d slope=%.3f; ", dim, s);
  }
  const int n = 128;
  GridField seg(Domain::cube(3, 0, 1), {n, n, n});
  const double h = 1.0 / n;
  for (int i = n / 4; i < 3 * n / 4; ++i) seg(seg.linear(i, 45, 83)) = h / seg.cell_volume();
  const double e = tail_exponent(haar_decompose(seg), 2);
  const auto verdict = embedding_verdict(1.2, 2, 0, -1, 2, 3);
  ok &= std::abs(e) <= 0.15 && verdict.kind == Embedding::borderline;
  detail += fmt("segment tail exponent=%.4f verdict(N=3,p=6/5)=%s", e, to_string(verdict.kind).c_str());
  return {ok, detail};
}

Outcome criterion7() {
  VortexState2D s;
  s.delta = 0.01;
  s.add(-0.5, 0.0, 1.0);
  s.add(0.5, 0.0, 1.0);
  const double d = 1.0, gamma_sum = 2.0;
  const double period = 4 * kPi * kPi * d * d / gamma_sum;
  const double dt = 1e-3;
  const double h0 = pseudo_energy(s);
  const auto m0 = moments(s);
  const long steps = std::lround(10 * period / dt);
  double angle = 0, prev = std::atan2(s.vortices.y[1] - s.vortices.y[0], s.vortices.x[1] - s.vortices.x[0]);
  double drift_h = 0, drift_i0 = 0, drift_i2 = 0;
  for (long k = 1; k <= steps; ++k) {
    step(s, dt, Exec::serial);
    const double a = std::atan2(s.vortices.y[1] - s.vortices.y[0], s.vortices.x[1] - s.vortices.x[0]);
    double da = a - prev;
    if (da > kPi) da -= 2 * kPi;
    if (da < -kPi) da += 2 * kPi;
    angle += da;
    prev = a;
    if (k % 1000 == 0 || k == steps) {
      const auto m = moments(s);
      drift_h = std::max(drift_h, std::abs(pseudo_energy(s) - h0) / std::abs(h0));
      drift_i0 = std::max(drift_i0, std::abs(m.i0 - m0.i0) / std::abs(m0.i0));
      drift_i2 = std::max(drift_i2, std::abs(m.i2 - m0.i2) / std::abs(m0.i2));
    }
  }
  const double measured = 2 * kPi * s.t / angle;
  const double err = std::abs(measured - period) / period;
  const bool paper = paper_has("it is an invariant quantity") && paper_has("global invariants of 2D flows");
  return {paper && err <= 1e-3 && drift_h <= 1e-4 && drift_i0 <= 1e-4 && drift_i2 <= 1e-4,
          fmt("period rel err=%.2e; drift H=%.2e I0=%.2e I2=%.2e over 10 periods", err, drift_h, drift_i0, drift_i2)};
}

Outcome criterion8() {
  const Domain dom = Domain::cube(2, -1, 1);
  std::vector<PartitionGeometry> geoms{DyadicCubeCover(dom, 2), DyadicCubeCover(dom, 3), DyadicCubeCover(dom, 4),
                                       BallCollection({Ball{{0, 0, 0}, 0.45}}, 2)};
  {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-0.4, 0.4), r(0.1, 0.2);
    std::vector<Ball> balls;
    for (int tries = 0; tries < 500 && balls.size() < 10; ++tries) {
      Ball b{{u(rng), u(rng), 0}, r(rng)};
      bool ok = true;
      for (const auto& x : balls) ok &= BallCollection::disjoint(x, b, 2);
      if (ok) balls.push_back(b);
    }
    geoms.emplace_back(BallCollection(balls, 2));
  }
  int violations = 0, checks = 0;
  double worst = 0;
  for (int cfg = 0; cfg < 100; ++cfg) {
    std::mt19937_64 rng(8000 + cfg);
    std::uniform_real_distribution<double> pos(-0.4, 0.4), g(0.05, 1.0);
    std::uniform_int_distribution<int> count(5, 40);
    VortexState2D s;
    s.delta = 0.01;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      const double x = pos(rng), y = pos(rng);
      s.add(x, y, g(rng) / n);
    }
    for (const auto& geom : geoms) {
      const auto rep = lemma41_check(s, geom);
      ++checks;
      violations += !rep.all();
      worst = std::max(worst, rep.v_lattice * rep.v_lattice / (2 * kPi * (rep.h + rep.const0)));
    }
  }
  return {violations == 0, fmt("violations=%d over %d checks; max V^2 / 2pi(H + (2/pi) I0 I2)=%.3f", violations,
                               checks, worst)};
}

Outcome criterion9() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto profile = RadialProfile::bump();
  const auto phi = TestFunction2D::plateau(0.5, 0.9);
  const auto rows = concentration_check(profile, phi, {std::ldexp(1.0, -10)}, 4096, 1.0);
  const auto& r = rows.front();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double off = std::abs(r.i12) / std::abs(r.i11);
  const bool paper = paper_has("\\pi \\Gamma^2(\\infty) \\delta(x) \\delta_{ij}");
  return {paper && r.rel_err <= 0.1 && off < 0.05 && secs < 300,
          fmt("int phi u1^2=%.5f target=%.5f rel err=%.4f; |off-diagonal|/diagonal=%.2e; runtime=%.1fs", r.i11,
              r.target, r.rel_err, off, secs)};
}

Outcome criterion10() {
  bool ok = true;
  std::string detail;
  auto phi = TestFunction2D::plateau(0.6, 0.95);
  phi.c0 = 0;
  phi.c12 = 1;
  for (double alpha : {0.5, 1.0}) {
    auto M = [&](double r) { return std::pow(std::abs(std::log(r)), -alpha) / alpha; };
    VortexState2D s;
    s.delta = 1e-3;
    const int K = 120;
    for (int k = 2; k < K; ++k) s.add(std::ldexp(1.0, -k), 0.0, M(std::ldexp(1.0, -k)) - M(std::ldexp(1.0, -k - 1)));
    for (int i = 0; i < 64; ++i) s.add(std::ldexp(1.0 + i / 64.0, -K), 0.0, M(std::ldexp(1.0, -K)) / 64);
    int violations = 0;
    std::vector<double> lx, ly;
    for (int j = 10; j <= 80; j += 5) {
      const double delta = std::ldexp(1.0, -j);
      const auto js = jdelta_split(s, phi, delta, alpha);
      violations += !js.holds();
      lx.push_back(std::log(std::abs(std::log(delta))));
      ly.push_back(std::log(std::abs(js.j_delta)));
    }
    const double e = slope(lx, ly);
    ok &= violations == 0 && std::abs(e + 2 * alpha) <= 0.3;
    detail += fmt("alpha=%.1f violations=%d exponent=%.3f (target %.1f); ", alpha, violations, e, -2 * alpha);
  }
  return {ok, detail};
}

GridField smooth_field_3d(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(-0.12, 0.12), r(0.12, 0.2), v(-1, 1);
  struct B {
    Point c;
    double r;
    std::array<double, 3> v;
  };
  std::vector<B> bs;
  for (int k = 0; k < 3; ++k) bs.push_back({{c(rng), c(rng), c(rng)}, r(rng), {v(rng), v(rng), v(rng)}});
  return GridField::sample_vector(Domain::cube(3, -0.5, 0.5), {n, n, n}, [&](const Point& x) {
    std::array<double, 3> w{};
    for (const auto& b : bs) {
      const double s = bump4(distance(x, b.c, 3), b.r);
      for (int q = 0; q < 3; ++q) w[q] += s * b.v[q];
    }
    return w;
  });
}

Outcome criterion11() {
  const double delta = 0.15;
  double worst = 0;
  bool eta_ok = true;
  for (int field = 0; field < 20; ++field) {
    const auto w = smooth_field_3d(11000 + field, 64);
    const auto spec = hsi_fourier(w, delta);
    const double spatial = partition_delta(w, delta).h_si;
    worst = std::max(worst, std::abs(spec.h_si - spatial) / spatial);
    eta_ok &= spec.eta_bound();
  }
  for (double k = 1e-3; k < 1e4; k *= 1.01) eta_ok &= eta_kernel(k, delta) <= 2 / (k * k);
  return {worst <= 0.03 && eta_ok, fmt("max spectral/spatial rel diff=%.4f over 20 fields at 64^3; eta bound %s",
                                       worst, eta_ok ? "exact" : "violated")};
}

GridField aligned_tube(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(2, 5), core(0.1, 0.18), len(0.25, 0.4), tilt(0, 0.5), off(-0.05, 0.05);
  const double a = amp(rng), R = core(rng), L = len(rng), t = tilt(rng), ox = off(rng), oy = off(rng);
  return GridField::sample_vector(Domain::cube(3, -0.5, 0.5), {48, 48, 48}, [&](const Point& x) {
    const double px = x[0] - ox, py = x[1] - oy;
    const double s = a * bump4(std::hypot(px, py), R) * bump4(std::abs(x[2]), L);
    const double ang = t * px / R;
    return std::array<double, 3>{s * std::sin(ang), 0.0, s * std::cos(ang)};
  });
}

Outcome criterion12() {
  const double delta = 0.1, k0 = 1.0;
  int violations = 0, inapplicable = 0, empty = 0;
  AlignmentChainReport first;
  GridField first_field;
  for (int field = 0; field < 30; ++field) {
    const auto w = aligned_tube(12000 + field);
    const double theta = std::min(0.95, alignment_measure(w, delta, k0).theta + 0.02);
    const auto rep = thm42_chain(w, AlignmentParams{delta, theta, k0}, coulomb_energy(w));
    inapplicable += !rep.applicable;
    empty += rep.balls.empty();
    for (const auto& l : rep.links) violations += !l.holds();
    if (field == 0) {
      first = rep;
      first_field = w;
    }
  }
  const auto w_plus = split_height(first_field, k0).second;
  double worst = 0;
  for (double th = 0; th < 0.95; th += 0.1) {
    const double lb = alignment_lower_bound(w_plus, first.balls, th);
    const double expect = first.lower_bound * (1 - th * th) / (1 - first.theta * first.theta);
    worst = std::max(worst, std::abs(lb - expect) / expect);
  }
  return {violations == 0 && inapplicable == 0 && empty == 0 && worst <= 0.01,
          fmt("link violations=%d inapplicable=%d empty collections=%d over 30 fields; (1-theta^2) sweep max rel "
              "err=%.2e",
              violations, inapplicable, empty, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--calibrate") {
      double lo = kInf, hi = 0;
      for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
        const double r = hneg1_ratio(seed, nullptr);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      std::printf("hneg1 ratio over seeds 1000-1099: [%.6f, %.6f]\n", lo, hi);
      return 0;
    }
    only.insert(std::stoi(a));
  }

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"packing-norm oracle equivalence", criterion1},
      {"interpolation and Holder inequalities", criterion2},
      {"DeVore counterexample growth", criterion3},
      {"weak-L^p over V^{pp} ratio bounded", criterion4},
      {"wavelet Parseval and H^-1 calibration band", criterion5},
      {"Dirac slope and borderline flat tail", criterion6},
      {"co-rotating pair period and invariants", criterion7},
      {"2D energy bound chain", criterion8},
      {"concentration of u^eps products", criterion9},
      {"near-part J_delta bound and decay", criterion10},
      {"spectral vs spatial near energy", criterion11},
      {"3D aligned-vorticity bound chain", criterion12},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s  criterion %2d  %-44s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
