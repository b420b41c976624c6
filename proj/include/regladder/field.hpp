#pragma once

// Domain geometry and the two source representations (sampled densities and
// atomic measures) consumed by every norm and diagnostic in the library.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace regladder {

using Point = std::array<double, 3>;  // unused trailing coordinates are 0
using Index3 = std::array<long, 3>;

inline constexpr double kPi = 3.14159265358979323846;

/// Default upper bound on admissible ball radii.
inline constexpr double kDefaultR0 = 0.25;

double distance(const Point& a, const Point& b, int dim);

/// Volume of the unit ball in dimension `dim` (2, pi, 4pi/3).
double unit_ball_volume(int dim);

struct Domain {
  int dim = 1;
  Point lower{};
  Point upper{};

  Domain() = default;
  Domain(int dim, Point lower, Point upper);

  /// [lo, hi]^dim
  static Domain cube(int dim, double lo, double hi);

  double extent(int axis) const { return upper[axis] - lower[axis]; }
  double max_extent() const;
  double measure() const;
  bool contains(const Point& x, double tol = 1e-12) const;
  bool operator==(const Domain&) const = default;
};

/// Cell-averaged density on a uniform grid. Scalar fields have one
/// component; vorticity fields in 3D carry three.
class GridField {
 public:
  GridField() = default;
  GridField(Domain domain, std::array<int, 3> shape, int components = 1);

  /// Samples `fn` at cell centers (scalar).
  static GridField sample(const Domain& domain, std::array<int, 3> shape,
                          const std::function<double(const Point&)>& fn);

  /// Samples a vector-valued `fn` at cell centers (three components).
  static GridField sample_vector(const Domain& domain, std::array<int, 3> shape,
                                 const std::function<std::array<double, 3>(const Point&)>& fn);

  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim; }
  const std::array<int, 3>& shape() const { return shape_; }
  int components() const { return components_; }
  double spacing(int axis) const { return h_[axis]; }
  double cell_volume() const { return cell_volume_; }
  std::size_t cell_count() const { return cells_; }

  std::size_t linear(int i, int j = 0, int k = 0) const {
    return (static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k;
  }
  std::array<int, 3> unravel(std::size_t cell) const;
  Point center(std::size_t cell) const;
  /// Lower corner of the cell along each axis.
  Point cell_lower(std::size_t cell) const;

  double& operator()(std::size_t cell, int comp = 0) { return values_[cell * components_ + comp]; }
  double operator()(std::size_t cell, int comp = 0) const {
    return values_[cell * components_ + comp];
  }

  /// |f| for scalars, Euclidean norm for vector fields.
  double magnitude(std::size_t cell) const;

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  /// Integral of |f| over the domain.
  double total_mass() const;
  double l2_norm() const;
  bool all_finite() const;

 private:
  Domain domain_;
  std::array<int, 3> shape_{1, 1, 1};
  int components_ = 1;
  std::array<double, 3> h_{1, 1, 1};
  double cell_volume_ = 1;
  std::size_t cells_ = 1;
  std::vector<double> values_;
};

struct Atom {
  Point position{};
  std::array<double, 3> weight{};  // scalar measures use weight[0]
};

/// Finite signed (or vector) point masses, optionally smeared into uniform
/// balls of radius `blob_radius`.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  AtomicMeasure(Domain domain, int components = 1, double blob_radius = 0.0);

  void add(const Point& position, double weight);
  void add(const Point& position, const std::array<double, 3>& weight);

  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim; }
  int components() const { return components_; }
  double blob_radius() const { return blob_radius_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  double weight_magnitude(std::size_t i) const;
  /// Total variation sum |w_i|.
  double total_mass() const;

 private:
  Domain domain_;
  int components_ = 1;
  double blob_radius_ = 0.0;
  std::vector<Atom> atoms_;
};

struct Ball {
  Point center{};
  double radius = 0;
};

/// Pairwise disjoint balls; the constructor rejects overlapping pairs.
class BallCollection {
 public:
  BallCollection() = default;
  BallCollection(std::vector<Ball> balls, int dim);

  const std::vector<Ball>& balls() const { return balls_; }
  int dim() const { return dim_; }
  std::size_t size() const { return balls_.size(); }

  static bool disjoint(const Ball& a, const Ball& b, int dim);

 private:
  std::vector<Ball> balls_;
  int dim_ = 1;
};

struct Cube {
  Point lower{};
  double side = 0;
};

/// Disjoint axis-aligned cubes of possibly different sides (half-open).
class CubeCollection {
 public:
  CubeCollection() = default;
  CubeCollection(std::vector<Cube> cubes, int dim);

  const std::vector<Cube>& cubes() const { return cubes_; }
  int dim() const { return dim_; }

 private:
  std::vector<Cube> cubes_;
  int dim_ = 1;
};

/// Lattice of half-open cubes of side 2^-level times the domain's largest
/// extent, anchored at (lower - shift).
class DyadicCubeCover {
 public:
  DyadicCubeCover(const Domain& domain, int level, Point shift = {});

  int level() const { return level_; }
  double side() const { return side_; }
  const Point& shift() const { return shift_; }
  const Domain& domain() const { return domain_; }
  /// Number of lattice cells along each axis needed to tile the box.
  const std::array<long, 3>& counts() const { return counts_; }

  Cube cell(const Index3& j) const;
  /// Lattice index of the cell containing x.
  Index3 locate(const Point& x) const;

 private:
  Domain domain_;
  int level_;
  Point shift_;
  double side_;
  std::array<long, 3> counts_{1, 1, 1};
};

struct CellMass {
  Index3 index{};
  double mass = 0;
};

/// Non-owning view over either source representation.
class MassView {
 public:
  MassView(const GridField& f) : src_(&f) {}        // NOLINT(implicit)
  MassView(const AtomicMeasure& m) : src_(&m) {}    // NOLINT(implicit)

  const Domain& domain() const;
  int dim() const { return domain().dim; }
  bool is_grid() const { return std::holds_alternative<const GridField*>(src_); }
  const GridField& grid() const { return *std::get<const GridField*>(src_); }
  const AtomicMeasure& atoms() const { return *std::get<const AtomicMeasure*>(src_); }

  double total_mass() const;
  /// Mass of |src| inside an axis-aligned (half-open) box.
  double box_mass(const Point& lower, const Point& upper) const;

 private:
  std::variant<const GridField*, const AtomicMeasure*> src_;
};

/// Integral of |f| (or |mu|) over a ball contained in the domain.
double ball_mass(MassView src, const Ball& ball);

/// Quadrature weights (cell, |cell ∩ ball|) used by ball_mass on grids.
std::vector<std::pair<std::size_t, double>> ball_weights(const GridField& f, const Ball& ball);

/// Nonzero masses of the lattice cells of `cover`, sorted by index.
std::vector<CellMass> cell_masses(MassView src, const DyadicCubeCover& cover);

double cube_mass(MassView src, const Cube& cube);

/// Standard bump exp(-1/(1-|x|^2)) normalized to unit mass in R^dim.
double bump(double r, int dim);
double bump_normalization(int dim);

/// Convolution with the scaled bump of radius eps. Requires eps >= 2h.
GridField mollify(const GridField& f, double eps);
GridField mollify(const AtomicMeasure& mu, double eps, std::array<int, 3> shape);

}  // namespace regladder
