#include "regladder/euler2d.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "regladder/error.hpp"

namespace regladder {

namespace {

constexpr double kTwoPi = 2 * kPi;

double smooth_transition(double s) {
  auto f = [](double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; };
  if (s <= 0) return 1.0;
  if (s >= 1) return 0.0;
  const double a = f(1 - s), b = f(s);
  return a / (a + b);
}

double smooth_transition_deriv(double s) {
  if (s <= 0 || s >= 1) return 0.0;
  auto f = [](double t) { return std::exp(-1.0 / t); };
  auto fp = [&](double t) { return f(t) / (t * t); };
  const double a = f(1 - s), b = f(s);
  const double den = a + b;
  return (-fp(1 - s) * b - a * fp(s)) / (den * den);
}

std::vector<double> velocities(const Vortices2D& v, double delta, Exec exec) {
  const std::size_t n = v.size();
  std::vector<double> out(2 * n);
  patch_velocity_2d(v, delta, v.x, v.y, std::span<double>(out.data(), n), std::span<double>(out.data() + n, n),
                    exec);
  return out;
}

double self_energy_coefficient(double delta) { return std::log(delta) - 0.25; }

}  // namespace

// ------------------------------------------------------------- state

void VortexState2D::add(double x, double y, double gamma) {
  require(std::isfinite(x) && std::isfinite(y) && std::isfinite(gamma), "VortexState2D", "non-finite vortex");
  vortices.x.push_back(x);
  vortices.y.push_back(y);
  vortices.w.push_back(gamma);
}

VortexState2D VortexState2D::from_measure(const AtomicMeasure& mu, double delta) {
  require(mu.dim() == 2 && mu.components() == 1, "VortexState2D", "need a scalar planar measure");
  require(delta > 0, "VortexState2D", "blob radius must be positive");
  VortexState2D s;
  s.delta = delta;
  for (const auto& a : mu.atoms()) s.add(a.position[0], a.position[1], a.weight[0]);
  return s;
}

AtomicMeasure VortexState2D::to_measure(const Domain& domain) const {
  AtomicMeasure mu(domain, 1, delta);
  for (std::size_t i = 0; i < size(); ++i) mu.add({vortices.x[i], vortices.y[i], 0}, vortices.w[i]);
  return mu;
}

std::array<double, 2> biot_savart(const VortexState2D& s, double x, double y) {
  double u = 0, v = 0;
  const double tx[1] = {x}, ty[1] = {y};
  patch_velocity_2d(s.vortices, s.delta, tx, ty, std::span<double>(&u, 1), std::span<double>(&v, 1), Exec::serial);
  return {u, v};
}

std::array<double, 2> biot_savart(const GridField& omega, double x, double y) {
  require(omega.dim() == 2 && omega.components() == 1, "biot_savart", "need a scalar planar grid");
  const auto& d = omega.domain();
  const double hx = omega.spacing(0), hy = omega.spacing(1);
  const int nx = omega.shape()[0], ny = omega.shape()[1];
  const long skip_i = static_cast<long>(std::floor((x - d.lower[0]) / hx));
  const long skip_j = static_cast<long>(std::floor((y - d.lower[1]) / hy));
  double u = 0, v = 0;
#pragma omp parallel for reduction(+ : u, v) schedule(static)
  for (int i = 0; i < nx; ++i) {
    const double cx = d.lower[0] + (i + 0.5) * hx;
    for (int j = 0; j < ny; ++j) {
      if (i == skip_i && j == skip_j) continue;
      const double w = omega(omega.linear(i, j));
      if (w == 0) continue;
      const double cy = d.lower[1] + (j + 0.5) * hy;
      const double dx = x - cx, dy = y - cy;
      const double r2 = dx * dx + dy * dy;
      u += -dy * w / r2;
      v += dx * w / r2;
    }
  }
  const double c = omega.cell_volume() / kTwoPi;
  return {u * c, v * c};
}

void step(VortexState2D& s, double dt, Exec exec) {
  require(dt > 0, "step", "dt must be positive");
  const std::size_t n = s.size();
  auto advance = [&](const Vortices2D& base, const std::vector<double>& k, double h) {
    Vortices2D out = base;
    for (std::size_t i = 0; i < n; ++i) {
      out.x[i] += h * k[i];
      out.y[i] += h * k[n + i];
    }
    return out;
  };
  const auto k1 = velocities(s.vortices, s.delta, exec);
  const auto k2 = velocities(advance(s.vortices, k1, dt / 2), s.delta, exec);
  const auto k3 = velocities(advance(s.vortices, k2, dt / 2), s.delta, exec);
  const auto k4 = velocities(advance(s.vortices, k3, dt), s.delta, exec);
  for (std::size_t i = 0; i < n; ++i) {
    s.vortices.x[i] += dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    s.vortices.y[i] += dt / 6 * (k1[n + i] + 2 * k2[n + i] + 2 * k3[n + i] + k4[n + i]);
    if (!(std::abs(s.vortices.x[i]) <= s.box && std::abs(s.vortices.y[i]) <= s.box))
      throw std::runtime_error("step: vortex " + std::to_string(i) + " left the bounding box at t = " +
                               std::to_string(s.t + dt));
  }
  s.t += dt;
}

double pseudo_energy(const VortexState2D& s, EnergyMode mode, Exec exec) {
  if (mode == EnergyMode::pairwise) {
    const double pair = log_pair_sum_2d(s.vortices, 0.0, exec);
    require(std::isfinite(pair), "pseudo_energy", "coincident vortices in pairwise mode");
    return -pair / kPi;
  }
  require(s.delta > 0, "pseudo_energy", "blob mode needs a positive blob radius");
  double self = 0;
  for (double g : s.vortices.w) self += g * g;
  const double pair = log_pair_sum_2d(s.vortices, s.delta, exec);
  return -(2 * pair + self * self_energy_coefficient(s.delta)) / kTwoPi;
}

Moments moments(const VortexState2D& s) {
  Moments m;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double g = s.vortices.w[i];
    m.i0 += g;
    m.i2 += g * (s.vortices.x[i] * s.vortices.x[i] + s.vortices.y[i] * s.vortices.y[i]);
  }
  return m;
}

// --------------------------------------------------------- partition

EnergyPartition2D energy_partition(const VortexState2D& s, const PartitionGeometry& geometry) {
  require(s.delta > 0, "energy_partition", "blob radius must be positive");
  const std::size_t n = s.size();
  std::vector<long> piece(n, -1);
  EnergyPartition2D out;

  if (const auto* balls = std::get_if<BallCollection>(&geometry)) {
    require(balls->dim() == 2, "energy_partition", "planar balls required");
    const auto& bs = balls->balls();
    out.cell_mass.assign(bs.size(), 0.0);
    for (const auto& b : bs) out.cell_diameter.push_back(2 * b.radius);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < bs.size(); ++j)
        if (std::hypot(s.vortices.x[i] - bs[j].center[0], s.vortices.y[i] - bs[j].center[1]) <= bs[j].radius) {
          piece[i] = static_cast<long>(j);
          break;
        }
  } else {
    const auto& cover = std::get<DyadicCubeCover>(geometry);
    require(cover.domain().dim == 2, "energy_partition", "planar cover required");
    std::map<std::pair<long, long>, long> ids;
    for (std::size_t i = 0; i < n; ++i) {
      const Point x{s.vortices.x[i], s.vortices.y[i], 0};
      if (!cover.domain().contains(x)) continue;
      const auto idx = cover.locate(x);
      auto [it, fresh] = ids.try_emplace({idx[0], idx[1]}, static_cast<long>(ids.size()));
      if (fresh) {
        out.cell_mass.push_back(0.0);
        out.cell_diameter.push_back(cover.side() * std::sqrt(2.0));
      }
      piece[i] = it->second;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (piece[i] >= 0) out.cell_mass[static_cast<std::size_t>(piece[i])] += s.vortices.w[i];

  const double coeff = self_energy_coefficient(s.delta);
  double si = 0, ie = 0;
  const long ln = static_cast<long>(n);
#pragma omp parallel for schedule(static, 16) reduction(+ : si, ie)
  for (long i = 0; i < ln; ++i) {
    const double gi = s.vortices.w[i];
    double a = 0, b = 0;
    for (long j = i + 1; j < ln; ++j) {
      const double r = std::hypot(s.vortices.x[i] - s.vortices.x[j], s.vortices.y[i] - s.vortices.y[j]);
      const double t = 2 * gi * s.vortices.w[j] * patch_potential(r, s.delta);
      (piece[i] >= 0 && piece[i] == piece[j] ? a : b) += t;
    }
    const double self = gi * gi * coeff;
    (piece[i] >= 0 ? a : b) += self;
    si += a;
    ie += b;
  }
  out.h_si = -si / kTwoPi;
  out.h_ie = -ie / kTwoPi;
  out.h_total = out.h_si + out.h_ie;
  return out;
}

Lemma41Report lemma41_check(const VortexState2D& s, const PartitionGeometry& geometry, const LatticeOptions& lattice) {
  for (double g : s.vortices.w) require(g >= 0, "lemma41_check", "circulations must be one-signed (nonnegative)");
  const auto part = energy_partition(s, geometry);
  for (std::size_t j = 0; j < part.cell_mass.size(); ++j) {
    if (part.cell_mass[j] == 0) continue;
    require(part.cell_diameter[j] >= s.delta && part.cell_diameter[j] < 1.0, "lemma41_check",
            "pieces need delta <= 2R < 1");
  }
  Lemma41Report r;
  r.h = part.h_total;
  r.h_si = part.h_si;
  r.h_ie = part.h_ie;
  const auto m = moments(s);
  r.i0 = m.i0;
  r.i2 = m.i2;
  for (std::size_t j = 0; j < part.cell_mass.size(); ++j)
    r.si_lower += std::abs(std::log(part.cell_diameter[j])) * part.cell_mass[j] * part.cell_mass[j];
  r.si_lower /= kTwoPi;
  r.const0 = 2.0 / kPi * r.i0 * r.i2;

  double reach = 0.5;
  for (std::size_t i = 0; i < s.size(); ++i)
    reach = std::max({reach, std::abs(s.vortices.x[i]) + 2 * s.delta, std::abs(s.vortices.y[i]) + 2 * s.delta});
  const double half = std::exp2(std::ceil(std::log2(reach)));
  const auto mu = s.to_measure(Domain::cube(2, -half, half));
  r.v_lattice = vnorm_lattice(mu, NormParams{1, 2, 0.5, kDefaultR0}, lattice).value;

  const double tol = 1e-12 * (std::abs(r.h_si) + std::abs(r.h_ie) + 1e-300);
  r.si_bound = r.si_lower <= r.h_si + tol;
  r.ie_bound = -r.h_ie <= r.const0 + tol;
  r.v_bound = r.v_lattice * r.v_lattice <= kTwoPi * (r.h + r.const0) + kTwoPi * tol;
  return r;
}

// ------------------------------------------------ concentrating family

RadialProfile::RadialProfile(std::function<double(double)> omega, double a, double b, int table)
    : omega_(std::move(omega)), a_(a), b_(b) {
  require(0 < a && a < b && b <= 1, "RadialProfile", "support must lie in (0, 1)");
  require(table >= 16, "RadialProfile", "table too small");
  table_.assign(static_cast<std::size_t>(table) + 1, 0.0);
  const double h = 1.0 / table;
  for (int k = 0; k < table; ++k) {
    const double lo = k * h, hi = lo + h;
    double piece = 0;
    if (hi > a_ && lo < b_)
      piece = boost::math::quadrature::gauss<double, 10>::integrate([&](double r) { return r * omega_(r); }, lo, hi);
    table_[static_cast<std::size_t>(k) + 1] = table_[static_cast<std::size_t>(k)] + piece;
  }
}

RadialProfile RadialProfile::bump() {
  return RadialProfile(
      [](double r) {
        const double t = (r - 0.5) / 0.4;
        return std::abs(t) < 1 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
      },
      0.1, 0.9);
}

double RadialProfile::gamma(double r) const {
  if (r <= 0) return 0.0;
  if (r >= 1) return table_.back();
  const double pos = r * static_cast<double>(table_.size() - 1);
  const auto k = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(k);
  return table_[k] + f * (table_[k + 1] - table_[k]);
}

double DmjFamily::scale() const { return 1.0 / std::sqrt(std::abs(std::log(eps))); }

double DmjFamily::vorticity(double x, double y) const {
  return profile->omega(std::hypot(x, y) / eps) / (eps * eps) * scale();
}

std::array<double, 2> DmjFamily::velocity(double x, double y) const {
  const double r2 = x * x + y * y;
  if (r2 == 0) return {0.0, 0.0};
  const double c = profile->gamma(std::sqrt(r2) / eps) * scale() / r2;
  return {-y * c, x * c};
}

DmjFamily dmj_family(const RadialProfile& profile, double eps) {
  require(eps > 0 && eps < 0.5, "dmj_family", "eps must lie in (0, 1/2)");
  return DmjFamily{&profile, eps};
}

GridField sample_vorticity(const DmjFamily& fam, int n, double half) {
  return GridField::sample(Domain::cube(2, -half, half), {n, n, 1},
                           [&](const Point& x) { return fam.vorticity(x[0], x[1]); });
}

VectorGrid2D sample_velocity(const DmjFamily& fam, int n, double half, double shift_x, double shift_y,
                             double drift_x, double drift_y) {
  const Domain d = Domain::cube(2, -half, half);
  VectorGrid2D out{GridField(d, {n, n, 1}), GridField(d, {n, n, 1})};
  const long cells = static_cast<long>(out.u.cell_count());
#pragma omp parallel for schedule(static)
  for (long c = 0; c < cells; ++c) {
    const Point x = out.u.center(static_cast<std::size_t>(c));
    const auto v = fam.velocity(x[0] - shift_x, x[1] - shift_y);
    out.u(static_cast<std::size_t>(c)) = drift_x + v[0];
    out.v(static_cast<std::size_t>(c)) = drift_y + v[1];
  }
  return out;
}

// ----------------------------------------------------- test functions

TestFunction2D TestFunction2D::plateau(double r_in, double r_out) {
  require(0 < r_in && r_in < r_out, "TestFunction2D", "need 0 < r_in < r_out");
  TestFunction2D phi;
  phi.r_in = r_in;
  phi.r_out = r_out;
  return phi;
}

double TestFunction2D::value(double x, double y) const {
  const double z1 = x - cx, z2 = y - cy;
  const double r = std::hypot(z1, z2);
  if (r >= r_out) return 0.0;
  const double p = c0 + c1 * z1 + c2 * z2 + c11 * z1 * z1 + c12 * z1 * z2 + c22 * z2 * z2;
  return p * smooth_transition((r - r_in) / (r_out - r_in));
}

std::array<double, 2> TestFunction2D::gradient(double x, double y) const {
  const double z1 = x - cx, z2 = y - cy;
  const double r = std::hypot(z1, z2);
  if (r >= r_out) return {0.0, 0.0};
  const double p = c0 + c1 * z1 + c2 * z2 + c11 * z1 * z1 + c12 * z1 * z2 + c22 * z2 * z2;
  const double px = c1 + 2 * c11 * z1 + c12 * z2;
  const double py = c2 + c12 * z1 + 2 * c22 * z2;
  const double w = r_out - r_in;
  const double chi = smooth_transition((r - r_in) / w);
  const double dchi = r > 0 ? smooth_transition_deriv((r - r_in) / w) / w : 0.0;
  const double gx = r > 0 ? dchi * z1 / r : 0.0, gy = r > 0 ? dchi * z2 / r : 0.0;
  return {px * chi + p * gx, py * chi + p * gy};
}

double TestFunction2D::hessian_bound() const {
  const int m = 240;
  const double fd = 1e-5 * r_out;
  double best = 0;
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) {
      const double x = cx - r_out + 2 * r_out * i / m, y = cy - r_out + 2 * r_out * j / m;
      const auto gxp = gradient(x + fd, y), gxm = gradient(x - fd, y);
      const auto gyp = gradient(x, y + fd), gym = gradient(x, y - fd);
      const double a = (gxp[0] - gxm[0]) / (2 * fd), d = (gyp[1] - gym[1]) / (2 * fd);
      const double b = 0.5 * ((gxp[1] - gxm[1]) + (gyp[0] - gym[0])) / (2 * fd);
      const double norm = 0.5 * std::abs(a + d) + std::sqrt(0.25 * (a - d) * (a - d) + b * b);
      best = std::max(best, norm);
    }
  return 1.05 * best;
}

std::vector<ConcentrationRow> concentration_check(const RadialProfile& profile, const TestFunction2D& phi,
                                                  const std::vector<double>& eps, int n, double half) {
  require(n >= 8, "concentration_check", "grid too small");
  for (std::size_t k = 1; k < eps.size(); ++k)
    require(eps[k] < eps[k - 1], "concentration_check", "eps sequence must decrease");
  const double h = 2 * half / n;
  std::vector<ConcentrationRow> rows;
  for (double e : eps) {
    require(e >= h, "concentration_check", "eps below the grid spacing");
    const auto fam = dmj_family(profile, e);
    double s11 = 0, s22 = 0, s12 = 0;
#pragma omp parallel for schedule(static) reduction(+ : s11, s22, s12)
    for (int i = 0; i < n; ++i) {
      const double x = -half + (i + 0.5) * h;
      for (int j = 0; j < n; ++j) {
        const double y = -half + (j + 0.5) * h;
        const double f = phi.value(x, y);
        if (f == 0) continue;
        const auto u = fam.velocity(x, y);
        s11 += f * u[0] * u[0];
        s22 += f * u[1] * u[1];
        s12 += f * u[0] * u[1];
      }
    }
    ConcentrationRow row;
    row.eps = e;
    row.i11 = s11 * h * h;
    row.i22 = s22 * h * h;
    row.i12 = s12 * h * h;
    row.target = kPi * profile.gamma_inf() * profile.gamma_inf() * phi.value(0, 0);
    row.rel_err = row.target != 0 ? std::abs(row.i11 - row.target) / std::abs(row.target) : std::abs(row.i11);
    rows.push_back(row);
  }
  return rows;
}

double reduced_defect(const std::vector<VectorGrid2D>& seq, const VectorGrid2D& limit, const std::vector<char>& mask) {
  require(!seq.empty(), "reduced_defect", "empty sequence");
  const std::size_t cells = limit.u.cell_count();
  require(mask.size() == cells, "reduced_defect", "mask size differs from the grid");
  double worst = 0;
  for (std::size_t k = seq.size() / 2; k < seq.size(); ++k) {
    require(seq[k].u.cell_count() == cells && seq[k].u.domain() == limit.u.domain(), "reduced_defect",
            "sequence and limit must share a grid");
    double s = 0;
    for (std::size_t c = 0; c < cells; ++c) {
      if (!mask[c]) continue;
      const double du = limit.u(c) - seq[k].u(c), dv = limit.v(c) - seq[k].v(c);
      s += du * du + dv * dv;
    }
    worst = std::max(worst, s * limit.u.cell_volume());
  }
  return worst;
}

// ------------------------------------------------------ Delort kernel

double delort_kernel(const TestFunction2D& phi, double x1, double x2, double y1, double y2) {
  const double d1 = x1 - y1, d2 = x2 - y2;
  const double r2 = d1 * d1 + d2 * d2;
  require(r2 > 0, "delort_kernel", "x and y must differ");
  const auto gx = phi.gradient(x1, x2), gy = phi.gradient(y1, y2);
  const double g1 = gx[0] - gy[0], g2 = gx[1] - gy[1];
  return (g1 * -d2 + g2 * d1) / (4 * kPi * r2);
}

double delort_cutoff(double t) { return smooth_transition(t - 1.0); }

JDeltaSplit jdelta_split(const VortexState2D& s, const TestFunction2D& phi, double delta, double alpha,
                         const std::function<double(double)>& rho, Exec exec) {
  require(delta > 0 && alpha >= 0, "jdelta_split", "need delta > 0 and alpha >= 0");
  const auto& v = s.vortices;
  const long n = static_cast<long>(v.size());
  const double psi = phi.psi(s.t);
  double near = 0, far = 0;
  auto row = [&](long i, double& a, double& b) {
    for (long j = i + 1; j < n; ++j) {
      const double r = std::hypot(v.x[i] - v.x[j], v.y[i] - v.y[j]);
      if (r == 0) continue;
      const double w = 2 * v.w[i] * v.w[j] * delort_kernel(phi, v.x[i], v.y[i], v.x[j], v.y[j]);
      const double c = rho(r / delta);
      a += c * w;
      b += (1 - c) * w;
    }
  };
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i) row(i, near, far);
  } else {
#pragma omp parallel for schedule(static, 16) reduction(+ : near, far)
    for (long i = 0; i < n; ++i) row(i, near, far);
  }

  std::map<std::pair<long, long>, double> cells;
  const double side = 2 * delta;
  for (long i = 0; i < n; ++i)
    cells[{static_cast<long>(std::floor(v.x[i] / side)), static_cast<long>(std::floor(v.y[i] / side))}] +=
        std::abs(v.w[i]);
  double sum_sq = 0;
  for (const auto& [key, m] : cells) sum_sq += m * m;

  JDeltaSplit out;
  out.j_delta = psi * near;
  out.i_delta = psi * far;
  out.c_phi = phi.hessian_bound() / (4 * kPi);
  out.v_2delta = std::sqrt(std::pow(std::abs(std::log(side)), 2 * alpha) * sum_sq);
  out.j_bound = 9 * out.c_phi * phi.psi_sup * sum_sq;
  return out;
}

// ------------------------------------------------------ weak residual

std::array<double, 2> DivFreeTest2D::field(double x, double y) const {
  const double z1 = x - cx, z2 = y - cy, R2 = radius * radius;
  const double q = 1 - (z1 * z1 + z2 * z2) / R2;
  if (q <= 0) return {0.0, 0.0};
  const double c = 8 * q * q * q / R2;
  return {c * z2, -c * z1};
}

std::array<double, 4> DivFreeTest2D::jacobian(double x, double y) const {
  const double z1 = x - cx, z2 = y - cy, R2 = radius * radius;
  const double q = 1 - (z1 * z1 + z2 * z2) / R2;
  if (q <= 0) return {0, 0, 0, 0};
  const double a = 8 / R2, q3 = q * q * q, b = 6 * q * q / R2;
  return {a * (-b * z2 * z1), a * (q3 - b * z2 * z2), -a * (q3 - b * z1 * z1), -a * (-b * z1 * z2)};
}

double DivFreeTest2D::psi(double t) const { return 0.5 * (1 + std::cos(kPi * t / horizon)); }
double DivFreeTest2D::dpsi(double t) const { return -0.5 * kPi / horizon * std::sin(kPi * t / horizon); }

WeakResidual weak_residual(const std::vector<VelocitySnapshot>& snaps, const DivFreeTest2D& phi) {
  require(snaps.size() >= 2, "weak_residual", "need at least two snapshots");
  const std::size_t K = snaps.size() - 1;
  const double dt = snaps.back().t / static_cast<double>(K);
  require(std::abs(snaps.front().t) < 1e-12 && std::abs(snaps.back().t - phi.horizon) < 1e-9 * phi.horizon,
          "weak_residual", "snapshots must span [0, horizon]");
  for (std::size_t k = 0; k < snaps.size(); ++k)
    require(std::abs(snaps[k].t - static_cast<double>(k) * dt) < 1e-9 * phi.horizon, "weak_residual",
            "snapshots must be equally spaced");

  std::vector<double> a(snaps.size()), b(snaps.size());
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const auto& g = snaps[k].u;
    const long cells = static_cast<long>(g.u.cell_count());
    double sa = 0, sb = 0;
#pragma omp parallel for schedule(static) reduction(+ : sa, sb)
    for (long c = 0; c < cells; ++c) {
      const Point x = g.u.center(static_cast<std::size_t>(c));
      const double u = g.u(static_cast<std::size_t>(c)), v = g.v(static_cast<std::size_t>(c));
      const auto f = phi.field(x[0], x[1]);
      if (f[0] == 0 && f[1] == 0) continue;
      const auto J = phi.jacobian(x[0], x[1]);
      sa += f[0] * u + f[1] * v;
      sb += (J[0] * u + J[1] * v) * u + (J[2] * u + J[3] * v) * v;
    }
    a[k] = sa * g.u.cell_volume();
    b[k] = sb * g.u.cell_volume();
  }
  // Simpson when the interval count is even, trapezoid otherwise.
  auto integrate = [&](auto&& f) {
    double s = 0;
    if (K % 2 == 0) {
      for (std::size_t k = 0; k <= K; ++k) s += f(k) * ((k == 0 || k == K) ? 1.0 : (k % 2 ? 4.0 : 2.0));
      return s * dt / 3;
    }
    for (std::size_t k = 0; k <= K; ++k) s += f(k) * ((k == 0 || k == K) ? 0.5 : 1.0);
    return s * dt;
  };
  WeakResidual r;
  r.time_term = integrate([&](std::size_t k) { return phi.dpsi(snaps[k].t) * a[k]; });
  r.flux_term = integrate([&](std::size_t k) { return phi.psi(snaps[k].t) * b[k]; });
  r.initial_term = phi.psi(0) * a[0];
  r.residual = r.time_term + r.flux_term + r.initial_term;
  r.scale = std::abs(r.time_term) + std::abs(r.flux_term) + std::abs(r.initial_term);
  return r;
}

double divergence_defect(const DivFreeTest2D& phi, int n, double half) {
  const double h = 2 * half / n, fd = 1e-6;
  double worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = -half + (i + 0.5) * h, y = -half + (j + 0.5) * h;
      const double div = (phi.field(x + fd, y)[0] - phi.field(x - fd, y)[0] + phi.field(x, y + fd)[1] -
                          phi.field(x, y - fd)[1]) /
                         (2 * fd);
      worst = std::max(worst, std::abs(div));
    }
  return worst;
}

}  // namespace regladder
