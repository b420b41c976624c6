#include "regladder/kernels.hpp"

#include <cmath>

#include "regladder/error.hpp"

namespace regladder {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

inline void patch_kernel(double dx, double dy, double delta2, double& ku, double& kv) {
  const double r2 = dx * dx + dy * dy;
  if (r2 == 0) {
    ku = kv = 0;
    return;
  }
  const double inv = 1.0 / (kTwoPi * (r2 < delta2 ? delta2 : r2));
  ku = -dy * inv;
  kv = dx * inv;
}

}  // namespace

double patch_potential(double r, double delta) {
  if (r >= delta) return std::log(r);
  return std::log(delta) + 0.5 * (r * r / (delta * delta) - 1.0);
}

void patch_velocity_2d(const Vortices2D& src, double delta, std::span<const double> tx, std::span<const double> ty,
                       std::span<double> u, std::span<double> v, Exec exec) {
  require(tx.size() == ty.size() && u.size() == tx.size() && v.size() == tx.size(), "patch_velocity_2d",
          "target and output sizes differ");
  const double d2 = delta * delta;
  const long m = static_cast<long>(tx.size());
  const std::size_t n = src.size();
  auto body = [&](long t) {
    double su = 0, sv = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double ku, kv;
      patch_kernel(tx[t] - src.x[j], ty[t] - src.y[j], d2, ku, kv);
      su += src.w[j] * ku;
      sv += src.w[j] * kv;
    }
    u[t] = su;
    v[t] = sv;
  };
  if (exec == Exec::serial) {
    for (long t = 0; t < m; ++t) body(t);
  } else {
#pragma omp parallel for schedule(static)
    for (long t = 0; t < m; ++t) body(t);
  }
}

double log_pair_sum_2d(const Vortices2D& src, double delta, Exec exec) {
  const long n = static_cast<long>(src.size());
  auto row = [&](long i) {
    double s = 0;
    for (long j = i + 1; j < n; ++j) {
      const double r = std::hypot(src.x[i] - src.x[j], src.y[i] - src.y[j]);
      s += src.w[j] * patch_potential(r, delta);
    }
    return src.w[i] * s;
  };
  double total = 0;
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i) total += row(i);
  } else {
#pragma omp parallel for schedule(static, 16) reduction(+ : total)
    for (long i = 0; i < n; ++i) total += row(i);
  }
  return total;
}

void Charges3D::push(double px, double py, double pz, double ax, double ay, double az) {
  x.push_back(px);
  y.push_back(py);
  z.push_back(pz);
  wx.push_back(ax);
  wy.push_back(ay);
  wz.push_back(az);
}

namespace {

// Neumaier-compensated total of per-row partial sums.
double compensated_sum(const std::vector<double>& v) {
  double sum = 0, comp = 0;
  for (const double x : v) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

}  // namespace

CoulombSplit coulomb_pair_sum_3d(const Charges3D& c, double cutoff, Exec exec) {
  const long n = static_cast<long>(c.size());
  const double c2 = cutoff * cutoff;
  std::vector<double> near(n), far(n);
  auto row = [&](long i, double& sn, double& sf) {
    for (long j = i + 1; j < n; ++j) {
      const double dx = c.x[i] - c.x[j], dy = c.y[i] - c.y[j], dz = c.z[i] - c.z[j];
      const double r2 = dx * dx + dy * dy + dz * dz;
      const double t = (c.wx[i] * c.wx[j] + c.wy[i] * c.wy[j] + c.wz[i] * c.wz[j]) / std::sqrt(r2);
      (r2 <= c2 ? sn : sf) += t;
    }
  };
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i) row(i, near[i], far[i]);
  } else {
#pragma omp parallel for schedule(static, 16)
    for (long i = 0; i < n; ++i) row(i, near[i], far[i]);
  }
  return {compensated_sum(near), compensated_sum(far)};
}

CoulombSplit coulomb_cross_sum_3d(const Charges3D& a, const Charges3D& b, double cutoff, Exec exec) {
  const long n = static_cast<long>(a.size());
  const std::size_t m = b.size();
  const double c2 = cutoff * cutoff;
  std::vector<double> near(n), far(n);
  auto row = [&](long i, double& sn, double& sf) {
    for (std::size_t j = 0; j < m; ++j) {
      const double dx = a.x[i] - b.x[j], dy = a.y[i] - b.y[j], dz = a.z[i] - b.z[j];
      const double r2 = dx * dx + dy * dy + dz * dz;
      if (r2 == 0) continue;
      const double t = (a.wx[i] * b.wx[j] + a.wy[i] * b.wy[j] + a.wz[i] * b.wz[j]) / std::sqrt(r2);
      (r2 <= c2 ? sn : sf) += t;
    }
  };
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i) row(i, near[i], far[i]);
  } else {
#pragma omp parallel for schedule(static, 16)
    for (long i = 0; i < n; ++i) row(i, near[i], far[i]);
  }
  return {compensated_sum(near), compensated_sum(far)};
}

}  // namespace regladder
