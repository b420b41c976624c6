#include "regladder/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace regladder::geometry {

double interval_overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

namespace {

// Antiderivative of sqrt(r^2 - t^2).
double semicircle_primitive(double t, double r) {
  t = std::clamp(t, -r, r);
  const double s = std::sqrt(std::max(0.0, r * r - t * t));
  return 0.5 * (t * s + r * r * std::asin(t / r));
}

}  // namespace

double disk_rect_area(double cx, double cy, double r, double x0, double x1, double y0, double y1) {
  if (r <= 0) return 0.0;
  const double a = std::max(x0 - cx, -r);
  const double b = std::min(x1 - cx, r);
  if (b <= a) return 0.0;
  const double c = y0 - cy;
  const double d = y1 - cy;
  if (d <= c) return 0.0;

  // Integrand len([c,d] ∩ [-s(t), s(t)]) is piecewise {const, ±s(t)} with
  // kinks where s(t) = |c| or |d|.
  std::vector<double> knots{a, b};
  for (double y : {c, d}) {
    if (std::abs(y) < r) {
      const double t = std::sqrt(r * r - y * y);
      for (double k : {-t, t})
        if (k > a && k < b) knots.push_back(k);
    }
  }
  std::sort(knots.begin(), knots.end());

  double area = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double t0 = knots[i], t1 = knots[i + 1];
    if (t1 <= t0) continue;
    const double tm = 0.5 * (t0 + t1);
    const double sm = std::sqrt(std::max(0.0, r * r - tm * tm));
    const bool lower_is_disk = -sm > c;
    const bool upper_is_disk = sm < d;
    const double lo = lower_is_disk ? -sm : c;
    const double hi = upper_is_disk ? sm : d;
    if (hi <= lo) continue;
    const double s_int = semicircle_primitive(t1, r) - semicircle_primitive(t0, r);
    const double len = t1 - t0;
    const double upper = upper_is_disk ? s_int : d * len;
    const double lower = lower_is_disk ? -s_int : c * len;
    area += upper - lower;
  }
  return std::max(0.0, area);
}

double lens_area(double r1, double r2, double d) {
  if (d >= r1 + r2) return 0.0;
  const double rmin = std::min(r1, r2);
  if (d <= std::abs(r1 - r2)) return kPi * rmin * rmin;
  const double a1 = std::acos(std::clamp((d * d + r1 * r1 - r2 * r2) / (2 * d * r1), -1.0, 1.0));
  const double a2 = std::acos(std::clamp((d * d + r2 * r2 - r1 * r1) / (2 * d * r2), -1.0, 1.0));
  const double tri = 0.5 * std::sqrt(std::max(
      0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)));
  return r1 * r1 * a1 + r2 * r2 * a2 - tri;
}

double sphere_intersection_volume(double r1, double r2, double d) {
  if (d >= r1 + r2) return 0.0;
  const double rmin = std::min(r1, r2);
  if (d <= std::abs(r1 - r2)) return 4.0 / 3.0 * kPi * rmin * rmin * rmin;
  const double s = r1 + r2 - d;
  return kPi * s * s *
         (d * d + 2 * d * r2 - 3 * r2 * r2 + 2 * d * r1 + 6 * r1 * r2 - 3 * r1 * r1) / (12 * d);
}

double ball_box_volume_3d(const Point& c, double r, const Point& lo, const Point& hi, int m) {
  double near2 = 0, far2 = 0;
  for (int a = 0; a < 3; ++a) {
    const double dn = std::max({lo[a] - c[a], 0.0, c[a] - hi[a]});
    const double df = std::max(std::abs(c[a] - lo[a]), std::abs(c[a] - hi[a]));
    near2 += dn * dn;
    far2 += df * df;
  }
  const double vol = (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
  if (near2 >= r * r) return 0.0;
  if (far2 <= r * r) return vol;
  const double dx = (hi[0] - lo[0]) / m, dy = (hi[1] - lo[1]) / m, dz = (hi[2] - lo[2]) / m;
  long inside = 0;
  for (int i = 0; i < m; ++i) {
    const double x = lo[0] + (i + 0.5) * dx - c[0];
    for (int j = 0; j < m; ++j) {
      const double y = lo[1] + (j + 0.5) * dy - c[1];
      for (int k = 0; k < m; ++k) {
        const double z = lo[2] + (k + 0.5) * dz - c[2];
        if (x * x + y * y + z * z < r * r) ++inside;
      }
    }
  }
  return vol * static_cast<double>(inside) / (static_cast<double>(m) * m * m);
}

double ball_box_measure(int dim, const Point& c, double r, const Point& lo, const Point& hi) {
  switch (dim) {
    case 1:
      return interval_overlap(c[0] - r, c[0] + r, lo[0], hi[0]);
    case 2:
      return disk_rect_area(c[0], c[1], r, lo[0], hi[0], lo[1], hi[1]);
    default:
      return ball_box_volume_3d(c, r, lo, hi);
  }
}

double ball_ball_measure(int dim, const Point& c1, double r1, const Point& c2, double r2) {
  const double d = distance(c1, c2, dim);
  switch (dim) {
    case 1:
      return interval_overlap(c1[0] - r1, c1[0] + r1, c2[0] - r2, c2[0] + r2);
    case 2:
      return lens_area(r1, r2, d);
    default:
      return sphere_intersection_volume(r1, r2, d);
  }
}

}  // namespace regladder::geometry
