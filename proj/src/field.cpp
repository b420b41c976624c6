#include "regladder/field.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "regladder/error.hpp"
#include "regladder/geometry.hpp"

namespace regladder {

double distance(const Point& a, const Point& b, int dim) {
  double s = 0;
  for (int i = 0; i < dim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double unit_ball_volume(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return kPi;
    case 3: return 4.0 * kPi / 3.0;
    default: throw PreconditionError("unit_ball_volume", "dimension must be 1, 2 or 3");
  }
}

// ---------------------------------------------------------------- Domain

Domain::Domain(int dim_, Point lower_, Point upper_) : dim(dim_), lower(lower_), upper(upper_) {
  require(dim >= 1 && dim <= 3, "Domain", "dimension must be 1, 2 or 3");
  for (int a = 0; a < dim; ++a)
    require(lower[a] < upper[a], "Domain", "lower < upper required on every axis");
  for (int a = dim; a < 3; ++a) lower[a] = upper[a] = 0.0;
}

Domain Domain::cube(int dim, double lo, double hi) {
  return Domain(dim, {lo, lo, lo}, {hi, hi, hi});
}

double Domain::max_extent() const {
  double e = 0;
  for (int a = 0; a < dim; ++a) e = std::max(e, extent(a));
  return e;
}

double Domain::measure() const {
  double m = 1;
  for (int a = 0; a < dim; ++a) m *= extent(a);
  return m;
}

bool Domain::contains(const Point& x, double tol) const {
  for (int a = 0; a < dim; ++a)
    if (x[a] < lower[a] - tol || x[a] > upper[a] + tol) return false;
  return true;
}

// ------------------------------------------------------------- GridField

GridField::GridField(Domain domain, std::array<int, 3> shape, int components)
    : domain_(domain), components_(components) {
  require(components == 1 || components == 3, "GridField", "components must be 1 or 3");
  shape_ = {1, 1, 1};
  cell_volume_ = 1;
  for (int a = 0; a < domain_.dim; ++a) {
    require(shape[a] >= 1, "GridField", "grid sizes must be positive");
    shape_[a] = shape[a];
    h_[a] = domain_.extent(a) / shape[a];
    cell_volume_ *= h_[a];
  }
  for (int a = domain_.dim; a < 3; ++a) h_[a] = 1.0;
  cells_ = static_cast<std::size_t>(shape_[0]) * shape_[1] * shape_[2];
  values_.assign(cells_ * components_, 0.0);
}

GridField GridField::sample(const Domain& domain, std::array<int, 3> shape,
                            const std::function<double(const Point&)>& fn) {
  GridField f(domain, shape, 1);
  for (std::size_t c = 0; c < f.cell_count(); ++c) f(c) = fn(f.center(c));
  return f;
}

GridField GridField::sample_vector(
    const Domain& domain, std::array<int, 3> shape,
    const std::function<std::array<double, 3>(const Point&)>& fn) {
  GridField f(domain, shape, 3);
  for (std::size_t c = 0; c < f.cell_count(); ++c) {
    const auto v = fn(f.center(c));
    for (int q = 0; q < 3; ++q) f(c, q) = v[q];
  }
  return f;
}

std::array<int, 3> GridField::unravel(std::size_t cell) const {
  const int k = static_cast<int>(cell % shape_[2]);
  cell /= shape_[2];
  const int j = static_cast<int>(cell % shape_[1]);
  const int i = static_cast<int>(cell / shape_[1]);
  return {i, j, k};
}

Point GridField::center(std::size_t cell) const {
  const auto ijk = unravel(cell);
  Point x{};
  for (int a = 0; a < domain_.dim; ++a) x[a] = domain_.lower[a] + (ijk[a] + 0.5) * h_[a];
  return x;
}

Point GridField::cell_lower(std::size_t cell) const {
  const auto ijk = unravel(cell);
  Point x{};
  for (int a = 0; a < domain_.dim; ++a) x[a] = domain_.lower[a] + ijk[a] * h_[a];
  return x;
}

double GridField::magnitude(std::size_t cell) const {
  if (components_ == 1) return std::abs(values_[cell]);
  const double* v = &values_[cell * 3];
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

double GridField::total_mass() const {
  double s = 0;
  for (std::size_t c = 0; c < cells_; ++c) s += magnitude(c);
  return s * cell_volume_;
}

double GridField::l2_norm() const {
  double s = 0;
  for (double v : values_) s += v * v;
  return std::sqrt(s * cell_volume_);
}

bool GridField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

// --------------------------------------------------------- AtomicMeasure

AtomicMeasure::AtomicMeasure(Domain domain, int components, double blob_radius)
    : domain_(domain), components_(components), blob_radius_(blob_radius) {
  require(components == 1 || components == 3, "AtomicMeasure", "components must be 1 or 3");
  require(blob_radius >= 0, "AtomicMeasure", "blob radius must be >= 0");
}

void AtomicMeasure::add(const Point& position, double weight) {
  add(position, std::array<double, 3>{weight, 0.0, 0.0});
}

void AtomicMeasure::add(const Point& position, const std::array<double, 3>& weight) {
  require(domain_.contains(position), "AtomicMeasure", "atom position outside the domain box");
  for (double w : weight) require(std::isfinite(w), "AtomicMeasure", "non-finite weight");
  Atom a;
  a.position = position;
  for (int q = domain_.dim; q < 3; ++q) a.position[q] = 0.0;
  a.weight = weight;
  atoms_.push_back(a);
}

double AtomicMeasure::weight_magnitude(std::size_t i) const {
  const auto& w = atoms_[i].weight;
  if (components_ == 1) return std::abs(w[0]);
  return std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
}

double AtomicMeasure::total_mass() const {
  double s = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) s += weight_magnitude(i);
  return s;
}

// ------------------------------------------------------ Ball collections

bool BallCollection::disjoint(const Ball& a, const Ball& b, int dim) {
  return distance(a.center, b.center, dim) > a.radius + b.radius;
}

BallCollection::BallCollection(std::vector<Ball> balls, int dim) : balls_(std::move(balls)), dim_(dim) {
  for (const auto& b : balls_) require(b.radius > 0, "BallCollection", "radii must be positive");
  for (std::size_t i = 0; i < balls_.size(); ++i)
    for (std::size_t j = i + 1; j < balls_.size(); ++j)
      require(disjoint(balls_[i], balls_[j], dim_), "BallCollection",
              "balls " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
}

CubeCollection::CubeCollection(std::vector<Cube> cubes, int dim) : cubes_(std::move(cubes)), dim_(dim) {
  for (const auto& c : cubes_) require(c.side > 0, "CubeCollection", "sides must be positive");
  for (std::size_t i = 0; i < cubes_.size(); ++i)
    for (std::size_t j = i + 1; j < cubes_.size(); ++j) {
      bool separated = false;
      for (int a = 0; a < dim_; ++a) {
        const auto& p = cubes_[i];
        const auto& q = cubes_[j];
        if (p.lower[a] + p.side <= q.lower[a] + 1e-14 || q.lower[a] + q.side <= p.lower[a] + 1e-14)
          separated = true;
      }
      require(separated, "CubeCollection", "cubes " + std::to_string(i) + " and " +
                                               std::to_string(j) + " overlap");
    }
}

DyadicCubeCover::DyadicCubeCover(const Domain& domain, int level, Point shift)
    : domain_(domain), level_(level), shift_(shift) {
  require(level >= 0, "DyadicCubeCover", "level must be >= 0");
  side_ = std::ldexp(domain.max_extent(), -level);
  for (int a = 0; a < domain.dim; ++a) {
    require(shift[a] >= 0 && shift[a] < side_, "DyadicCubeCover", "shift must lie in [0, side)");
    counts_[a] = static_cast<long>(std::ceil((domain.extent(a) + shift[a]) / side_ - 1e-12));
  }
  for (int a = domain.dim; a < 3; ++a) {
    shift_[a] = 0;
    counts_[a] = 1;
  }
}

Cube DyadicCubeCover::cell(const Index3& j) const {
  Cube c;
  c.side = side_;
  for (int a = 0; a < domain_.dim; ++a) c.lower[a] = domain_.lower[a] - shift_[a] + j[a] * side_;
  return c;
}

Index3 DyadicCubeCover::locate(const Point& x) const {
  Index3 j{0, 0, 0};
  for (int a = 0; a < domain_.dim; ++a) {
    j[a] = static_cast<long>(std::floor((x[a] - domain_.lower[a] + shift_[a]) / side_));
    j[a] = std::clamp(j[a], 0L, counts_[a] - 1);
  }
  return j;
}

// ------------------------------------------------------------- MassView

const Domain& MassView::domain() const {
  return is_grid() ? grid().domain() : atoms().domain();
}

double MassView::total_mass() const { return is_grid() ? grid().total_mass() : atoms().total_mass(); }

namespace {

// Measure of a blob's uniform footprint inside a box, as a fraction of its
// total volume.
double blob_box_fraction(int dim, const Point& c, double r, const Point& lo, const Point& hi) {
  if (dim == 3) {
    return geometry::ball_box_volume_3d(c, r, lo, hi, 16) / (unit_ball_volume(3) * r * r * r);
  }
  return geometry::ball_box_measure(dim, c, r, lo, hi) / (unit_ball_volume(dim) * std::pow(r, dim));
}

bool in_box(const Point& x, const Point& lo, const Point& hi, int dim) {
  for (int a = 0; a < dim; ++a)
    if (x[a] < lo[a] || x[a] >= hi[a]) return false;
  return true;
}

}  // namespace

double MassView::box_mass(const Point& lo, const Point& hi) const {
  const int d = dim();
  if (is_grid()) {
    const auto& f = grid();
    std::array<int, 3> i0{0, 0, 0}, i1{1, 1, 1};
    for (int a = 0; a < d; ++a) {
      const double h = f.spacing(a);
      i0[a] = std::max(0, static_cast<int>(std::floor((lo[a] - f.domain().lower[a]) / h)));
      i1[a] = std::min(f.shape()[a], static_cast<int>(std::ceil((hi[a] - f.domain().lower[a]) / h)));
      if (i1[a] <= i0[a]) return 0.0;
    }
    double s = 0;
    for (int i = i0[0]; i < i1[0]; ++i)
      for (int j = i0[1]; j < i1[1]; ++j)
        for (int k = i0[2]; k < i1[2]; ++k) {
          const std::array<int, 3> ijk{i, j, k};
          double w = 1;
          for (int a = 0; a < d; ++a) {
            const double c0 = f.domain().lower[a] + ijk[a] * f.spacing(a);
            w *= geometry::interval_overlap(c0, c0 + f.spacing(a), lo[a], hi[a]);
          }
          if (w > 0) s += w * f.magnitude(f.linear(i, j, k));
        }
    return s;
  }
  const auto& mu = atoms();
  const double r = mu.blob_radius();
  double s = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto& x = mu.atoms()[i].position;
    if (r > 0)
      s += mu.weight_magnitude(i) * blob_box_fraction(d, x, r, lo, hi);
    else if (in_box(x, lo, hi, d))
      s += mu.weight_magnitude(i);
  }
  return s;
}

// ---------------------------------------------------------------- masses

std::vector<std::pair<std::size_t, double>> ball_weights(const GridField& f, const Ball& ball) {
  const int d = f.dim();
  std::array<int, 3> i0{0, 0, 0}, i1{1, 1, 1};
  for (int a = 0; a < d; ++a) {
    const double h = f.spacing(a);
    i0[a] = std::max(0, static_cast<int>(std::floor((ball.center[a] - ball.radius - f.domain().lower[a]) / h)));
    i1[a] = std::min(f.shape()[a],
                     static_cast<int>(std::ceil((ball.center[a] + ball.radius - f.domain().lower[a]) / h)));
  }
  std::vector<std::pair<std::size_t, double>> out;
  for (int i = i0[0]; i < i1[0]; ++i)
    for (int j = i0[1]; j < i1[1]; ++j)
      for (int k = i0[2]; k < i1[2]; ++k) {
        const std::size_t c = f.linear(i, j, k);
        const Point lo = f.cell_lower(c);
        Point hi = lo;
        for (int a = 0; a < d; ++a) hi[a] += f.spacing(a);
        const double w = geometry::ball_box_measure(d, ball.center, ball.radius, lo, hi);
        if (w > 0) out.emplace_back(c, w);
      }
  return out;
}

double ball_mass(MassView src, const Ball& ball) {
  const auto& dom = src.domain();
  const int d = dom.dim;
  require(ball.radius > 0, "ball_mass", "radius must be positive");
  for (int a = 0; a < d; ++a)
    require(ball.center[a] - ball.radius >= dom.lower[a] - 1e-12 &&
                ball.center[a] + ball.radius <= dom.upper[a] + 1e-12,
            "ball_mass", "ball is not contained in the domain");

  if (src.is_grid()) {
    const auto& f = src.grid();
    double s = 0;
    for (const auto& [c, w] : ball_weights(f, ball)) s += w * f.magnitude(c);
    return s;
  }
  const auto& mu = src.atoms();
  const double r = mu.blob_radius();
  double s = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto& x = mu.atoms()[i].position;
    if (r > 0) {
      const double overlap = geometry::ball_ball_measure(d, ball.center, ball.radius, x, r);
      s += mu.weight_magnitude(i) * overlap / (unit_ball_volume(d) * std::pow(r, d));
    } else if (distance(x, ball.center, d) <= ball.radius) {
      s += mu.weight_magnitude(i);
    }
  }
  return s;
}

double cube_mass(MassView src, const Cube& cube) {
  Point hi = cube.lower;
  for (int a = 0; a < src.dim(); ++a) hi[a] += cube.side;
  return src.box_mass(cube.lower, hi);
}

std::vector<CellMass> cell_masses(MassView src, const DyadicCubeCover& cover) {
  require(src.domain() == cover.domain(), "cell_masses", "cover built on a different domain");
  const int d = src.dim();
  const auto counts = cover.counts();
  const double side = cover.side();
  auto key = [&](const Index3& j) { return (j[0] * counts[1] + j[1]) * counts[2] + j[2]; };
  const auto& dom = src.domain();
  auto lattice_lo = [&](int a, long j) { return dom.lower[a] - cover.shift()[a] + j * side; };
  auto unkey = [&](long k) {
    Index3 j{};
    j[2] = k % counts[2];
    k /= counts[2];
    j[1] = k % counts[1];
    j[0] = k / counts[1];
    return j;
  };

  // Contributions are gathered as (key, mass) pairs and merged after sorting,
  // which keeps memory proportional to the occupied cells at fine levels.
  std::vector<std::pair<long, double>> contrib;

  if (src.is_grid()) {
    const auto& f = src.grid();
    contrib.reserve(f.cell_count());
    for (std::size_t c = 0; c < f.cell_count(); ++c) {
      const double m = f.magnitude(c);
      if (m == 0) continue;
      const Point lo = f.cell_lower(c);
      std::array<long, 3> j0{0, 0, 0}, j1{0, 0, 0};
      for (int a = 0; a < d; ++a) {
        j0[a] = static_cast<long>(std::floor((lo[a] - dom.lower[a] + cover.shift()[a]) / side));
        j1[a] = static_cast<long>(std::floor((lo[a] + f.spacing(a) - dom.lower[a] + cover.shift()[a]) / side));
        j0[a] = std::clamp(j0[a], 0L, counts[a] - 1);
        j1[a] = std::clamp(j1[a], 0L, counts[a] - 1);
      }
      for (long i = j0[0]; i <= j1[0]; ++i)
        for (long j = j0[1]; j <= j1[1]; ++j)
          for (long k = j0[2]; k <= j1[2]; ++k) {
            const Index3 idx{i, j, k};
            double w = 1;
            for (int a = 0; a < d; ++a) {
              const double l0 = lattice_lo(a, idx[a]);
              w *= geometry::interval_overlap(l0, l0 + side, lo[a], lo[a] + f.spacing(a));
            }
            if (w > 0) contrib.emplace_back(key(idx), w * m);
          }
    }
  } else {
    const auto& mu = src.atoms();
    const double r = mu.blob_radius();
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double m = mu.weight_magnitude(i);
      if (m == 0) continue;
      const auto& x = mu.atoms()[i].position;
      if (r == 0) {
        contrib.emplace_back(key(cover.locate(x)), m);
        continue;
      }
      Point lo = x, hi = x;
      for (int a = 0; a < d; ++a) {
        lo[a] -= r;
        hi[a] += r;
      }
      const Index3 j0 = cover.locate(lo), j1 = cover.locate(hi);
      for (long a0 = j0[0]; a0 <= j1[0]; ++a0)
        for (long a1 = j0[1]; a1 <= j1[1]; ++a1)
          for (long a2 = j0[2]; a2 <= j1[2]; ++a2) {
            const Index3 idx{a0, a1, a2};
            const Cube cell = cover.cell(idx);
            Point chi = cell.lower;
            for (int a = 0; a < d; ++a) chi[a] += side;
            const double frac = blob_box_fraction(d, x, r, cell.lower, chi);
            if (frac > 0) contrib.emplace_back(key(idx), m * frac);
          }
    }
  }

  std::sort(contrib.begin(), contrib.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<CellMass> out;
  for (std::size_t i = 0; i < contrib.size();) {
    const long k = contrib[i].first;
    double m = 0;
    for (; i < contrib.size() && contrib[i].first == k; ++i) m += contrib[i].second;
    if (m > 0) out.push_back({unkey(k), m});
  }
  return out;
}

// ------------------------------------------------------------ mollifier

double bump_normalization(int dim) {
  static const std::array<double, 4> cache = [] {
    std::array<double, 4> c{};
    for (int n = 1; n <= 3; ++n) {
      const double surface = n == 1 ? 2.0 : (n == 2 ? 2 * kPi : 4 * kPi);
      const double radial = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [n](double r) { return r >= 1 ? 0.0 : std::pow(r, n - 1) * std::exp(-1.0 / (1.0 - r * r)); },
          0.0, 1.0, 15, 1e-14);
      c[n] = 1.0 / (surface * radial);
    }
    return c;
  }();
  require(dim >= 1 && dim <= 3, "bump", "dimension must be 1, 2 or 3");
  return cache[dim];
}

double bump(double r, int dim) {
  if (r >= 1.0) return 0.0;
  return bump_normalization(dim) * std::exp(-1.0 / (1.0 - r * r));
}

namespace {

double max_spacing(const GridField& f) {
  double h = 0;
  for (int a = 0; a < f.dim(); ++a) h = std::max(h, f.spacing(a));
  return h;
}

}  // namespace

GridField mollify(const GridField& f, double eps) {
  require(eps > 0, "mollify", "eps must be positive");
  require(eps >= 2 * max_spacing(f) - 1e-15, "mollify", "eps < 2h: mollifier is not resolvable");
  const int d = f.dim();
  std::array<int, 3> reach{0, 0, 0};
  for (int a = 0; a < d; ++a) reach[a] = static_cast<int>(std::ceil(eps / f.spacing(a)));

  struct Tap {
    std::array<int, 3> off;
    double w;
  };
  std::vector<Tap> taps;
  double wsum = 0;
  for (int i = -reach[0]; i <= reach[0]; ++i)
    for (int j = -reach[1]; j <= reach[1]; ++j)
      for (int k = -reach[2]; k <= reach[2]; ++k) {
        const std::array<int, 3> off{i, j, k};
        double r2 = 0;
        for (int a = 0; a < d; ++a) r2 += std::pow(off[a] * f.spacing(a) / eps, 2);
        const double w = bump(std::sqrt(r2), d);
        if (w > 0) {
          taps.push_back({off, w});
          wsum += w;
        }
      }
  for (auto& t : taps) t.w /= wsum;

  GridField out(f.domain(), f.shape(), f.components());
  const auto& n = f.shape();
  for (std::size_t c = 0; c < f.cell_count(); ++c) {
    const auto ijk = f.unravel(c);
    bool nonzero = false;
    for (int q = 0; q < f.components(); ++q) nonzero |= f(c, q) != 0;
    if (!nonzero) continue;
    for (const auto& t : taps) {
      std::array<int, 3> dst{};
      bool ok = true;
      for (int a = 0; a < 3; ++a) {
        dst[a] = ijk[a] + t.off[a];
        ok &= dst[a] >= 0 && dst[a] < n[a];
      }
      if (!ok) continue;
      const std::size_t cd = f.linear(dst[0], dst[1], dst[2]);
      for (int q = 0; q < f.components(); ++q) out(cd, q) += t.w * f(c, q);
    }
  }
  return out;
}

GridField mollify(const AtomicMeasure& mu, double eps, std::array<int, 3> shape) {
  GridField out(mu.domain(), shape, mu.components());
  require(eps > 0, "mollify", "eps must be positive");
  require(eps >= 2 * max_spacing(out) - 1e-15, "mollify", "eps < 2h: mollifier is not resolvable");
  const int d = mu.dim();
  const auto& dom = mu.domain();
  for (const auto& atom : mu.atoms()) {
    std::array<long, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      lo[a] = static_cast<long>(std::floor((atom.position[a] - eps - dom.lower[a]) / out.spacing(a)));
      hi[a] = static_cast<long>(std::ceil((atom.position[a] + eps - dom.lower[a]) / out.spacing(a)));
    }
    // Normalize over the untruncated stencil so cells outside the box
    // genuinely lose their share.
    std::vector<std::pair<std::array<long, 3>, double>> taps;
    double wsum = 0;
    for (long i = lo[0]; i <= hi[0]; ++i)
      for (long j = lo[1]; j <= hi[1]; ++j)
        for (long k = lo[2]; k <= hi[2]; ++k) {
          const std::array<long, 3> ijk{i, j, k};
          double r2 = 0;
          for (int a = 0; a < d; ++a) {
            const double xc = dom.lower[a] + (ijk[a] + 0.5) * out.spacing(a);
            r2 += std::pow((xc - atom.position[a]) / eps, 2);
          }
          const double w = bump(std::sqrt(r2), d);
          if (w > 0) {
            taps.emplace_back(ijk, w);
            wsum += w;
          }
        }
    for (const auto& [ijk, w] : taps) {
      bool ok = true;
      for (int a = 0; a < d; ++a) ok &= ijk[a] >= 0 && ijk[a] < shape[a];
      if (!ok) continue;
      const std::size_t c = out.linear(static_cast<int>(ijk[0]), static_cast<int>(ijk[1]), static_cast<int>(ijk[2]));
      const double density = w / wsum / out.cell_volume();
      for (int q = 0; q < mu.components(); ++q) out(c, q) += density * atom.weight[q];
    }
  }
  return out;
}

}  // namespace regladder
