#include <doctest.h>

#include <cmath>
#include <random>

#include "regladder/error.hpp"
#include "regladder/field.hpp"
#include "regladder/geometry.hpp"

using namespace regladder;

TEST_CASE("ball_mass of a zero field is zero") {
  GridField f(Domain::cube(2, 0, 1), {16, 16, 1});
  CHECK(ball_mass(f, Ball{{0.5, 0.5, 0}, 0.2}) == 0.0);
}

TEST_CASE("ball_mass of the unit density equals the disk area") {
  GridField f = GridField::sample(Domain::cube(2, 0, 1), {64, 64, 1}, [](const Point&) { return 1.0; });
  for (double r : {0.05, 0.13, 0.25, 0.31}) {
    CHECK(ball_mass(f, Ball{{0.5, 0.5, 0}, r}) == doctest::Approx(kPi * r * r).epsilon(1e-12));
    CHECK(ball_mass(f, Ball{{0.47, 0.52, 0}, r}) == doctest::Approx(kPi * r * r).epsilon(1e-12));
  }
}

TEST_CASE("ball_mass in 3D uses the sub-cell rule") {
  GridField f = GridField::sample(Domain::cube(3, 0, 1), {24, 24, 24}, [](const Point&) { return 1.0; });
  const double r = 0.3;
  CHECK(ball_mass(f, Ball{{0.5, 0.5, 0.5}, r}) == doctest::Approx(4.0 / 3.0 * kPi * r * r * r).epsilon(2e-3));
}

TEST_CASE("ball_mass counts atoms by closed-ball inclusion") {
  AtomicMeasure mu(Domain::cube(2, -1, 1));
  mu.add({0, 0, 0}, 1.0);
  mu.add({0.3, 0, 0}, 2.0);
  mu.add({0.9, 0, 0}, 5.0);
  CHECK(ball_mass(mu, Ball{{0, 0, 0}, 0.5}) == doctest::Approx(3.0));
}

TEST_CASE("blob masses are apportioned by overlap fraction") {
  AtomicMeasure mu(Domain::cube(2, -1, 1), 1, 0.1);
  mu.add({0, 0, 0}, 2.0);
  CHECK(ball_mass(mu, Ball{{0, 0, 0}, 0.5}) == doctest::Approx(2.0));
  // A ball of equal radius centered on the blob boundary picks up the lens.
  const double lens = geometry::lens_area(0.1, 0.1, 0.1);
  CHECK(ball_mass(mu, Ball{{0.1, 0, 0}, 0.1}) == doctest::Approx(2.0 * lens / (kPi * 0.01)));
}

TEST_CASE("ball outside the domain is rejected") {
  GridField f(Domain::cube(2, 0, 1), {8, 8, 1});
  CHECK_THROWS_AS(ball_mass(f, Ball{{0.95, 0.5, 0}, 0.1}), PreconditionError);
}

TEST_CASE("cell_masses of a single atom") {
  AtomicMeasure mu(Domain::cube(2, -1, 1));
  mu.add({0, 0, 0}, 1.0);
  for (int level : {0, 1, 3, 6}) {
    const auto cells = cell_masses(mu, DyadicCubeCover(mu.domain(), level));
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].mass == 1.0);
  }
}

TEST_CASE("cell_masses of the unit density on the unit square at level 1") {
  GridField f = GridField::sample(Domain::cube(2, 0, 1), {32, 32, 1}, [](const Point&) { return 1.0; });
  const auto cells = cell_masses(f, DyadicCubeCover(f.domain(), 1));
  REQUIRE(cells.size() == 4);
  for (const auto& c : cells) CHECK(c.mass == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("dyadic interval masses of x^(-1/2)") {
  // Exact cell averages of x^{-1/2}: (2/h)(sqrt(b) - sqrt(a)).
  const int n = 1 << 14;
  GridField f(Domain::cube(1, 0, 1), {n, 1, 1});
  const double h = 1.0 / n;
  for (int i = 0; i < n; ++i) f(i) = 2.0 * (std::sqrt((i + 1) * h) - std::sqrt(i * h)) / h;
  const double c2 = 2.0 * (std::sqrt(2.0) - 1.0);
  for (int j = 1; j <= 10; ++j) {
    const Cube interval{{std::ldexp(1.0, -j), 0, 0}, std::ldexp(1.0, -j)};
    CHECK(cube_mass(f, interval) * std::pow(2.0, j / 2.0) == doctest::Approx(c2).epsilon(1e-12));
  }
}

TEST_CASE("cell masses sum to the total mass at every level and shift") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  GridField f(Domain({2, {-0.3, 0.1, 0}, {0.9, 0.8, 0}}), {37, 23, 1});
  for (auto& v : f.values()) v = g(rng);
  for (int level = 0; level <= 6; ++level) {
    const double side = std::ldexp(f.domain().max_extent(), -level);
    for (Point shift : {Point{0, 0, 0}, Point{side / 2, 0, 0}, Point{side / 2, side / 2, 0}}) {
      double s = 0;
      for (const auto& c : cell_masses(f, DyadicCubeCover(f.domain(), level, shift))) s += c.mass;
      CHECK(s == doctest::Approx(f.total_mass()).epsilon(1e-9));
    }
  }
}

TEST_CASE("blob cell masses sum to the total mass") {
  AtomicMeasure mu(Domain::cube(3, 0, 1), 1, 0.05);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int i = 0; i < 20; ++i) mu.add({u(rng), u(rng), u(rng)}, u(rng));
  double s = 0;
  for (const auto& c : cell_masses(mu, DyadicCubeCover(mu.domain(), 3))) s += c.mass;
  CHECK(s == doctest::Approx(mu.total_mass()).epsilon(1e-3));
}

TEST_CASE("ball_mass is monotone in radius and additive over disjoint balls") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  GridField f = GridField::sample(Domain::cube(2, 0, 1), {48, 48, 1}, [&](const Point&) { return u(rng); });
  for (int trial = 0; trial < 50; ++trial) {
    const Point c{0.3 + 0.4 * u(rng), 0.3 + 0.4 * u(rng), 0};
    double prev = 0;
    for (double r = 0.01; r <= 0.25; r += 0.02) {
      const double m = ball_mass(f, Ball{c, r});
      CHECK(m >= prev - 1e-15);
      prev = m;
    }
  }
  // Additivity: two half-disjoint balls versus the box mass of their union.
  const Ball a{{0.25, 0.5, 0}, 0.2}, b{{0.75, 0.5, 0}, 0.2};
  const double both = ball_mass(f, a) + ball_mass(f, b);
  double direct = 0;
  for (const auto& [c, w] : ball_weights(f, a)) direct += w * f.magnitude(c);
  for (const auto& [c, w] : ball_weights(f, b)) direct += w * f.magnitude(c);
  CHECK(both == doctest::Approx(direct));
}

TEST_CASE("BallCollection rejects overlapping pairs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.02, 0.02);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Ball> balls;
    for (int i = 0; i < 4; ++i) balls.push_back({{0.1 + 0.2 * i, 0.5, 0}, 0.09});
    CHECK_NOTHROW(BallCollection(balls, 2));
    const int k = trial % 3;
    balls[k + 1].center[0] = balls[k].center[0] + 0.18 - std::abs(u(rng)) - 1e-9;
    balls[k + 1].center[1] += u(rng) * 0.01;
    if (distance(balls[k].center, balls[k + 1].center, 2) <= 0.18) {
      CHECK_THROWS_AS(BallCollection(balls, 2), PreconditionError);
    }
  }
}

TEST_CASE("mollify a Dirac preserves unit mass") {
  AtomicMeasure mu(Domain::cube(2, -1, 1));
  mu.add({0.013, -0.021, 0}, 1.0);
  const GridField g = mollify(mu, 0.1, {128, 128, 1});
  CHECK(g.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("mollify two distant Diracs gives two separate bumps") {
  AtomicMeasure mu(Domain::cube(2, -1, 1));
  mu.add({-0.5, 0, 0}, 2.0);
  mu.add({0.5, 0, 0}, 3.0);
  const GridField g = mollify(mu, 0.1, {128, 128, 1});
  CHECK(ball_mass(g, Ball{{-0.5, 0, 0}, 0.12}) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(ball_mass(g, Ball{{0.5, 0, 0}, 0.12}) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("mollified grid field conserves mass over a covering ball") {
  GridField f = GridField::sample(Domain::cube(2, -1, 1), {96, 96, 1},
                                  [](const Point& x) { return std::hypot(x[0], x[1]) < 0.3 ? 1.0 + x[0] : 0.0; });
  const GridField g = mollify(f, 0.1);
  CHECK(ball_mass(g, Ball{{0, 0, 0}, 0.9}) == doctest::Approx(f.total_mass()).epsilon(1e-9));
}

TEST_CASE("mollify rejects an unresolvable radius") {
  GridField f(Domain::cube(2, 0, 1), {16, 16, 1});
  CHECK_THROWS_AS(mollify(f, 0.1), PreconditionError);
}

TEST_CASE("disk-rectangle area agrees with brute-force sampling") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const double cx = u(rng), cy = u(rng), r = 0.2 + 0.5 * std::abs(u(rng));
    double x0 = u(rng), x1 = u(rng), y0 = u(rng), y1 = u(rng);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    const int m = 600;
    long in = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double x = x0 + (i + 0.5) * (x1 - x0) / m, y = y0 + (j + 0.5) * (y1 - y0) / m;
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) < r * r) ++in;
      }
    const double ref = (x1 - x0) * (y1 - y0) * in / double(m * m);
    CHECK(geometry::disk_rect_area(cx, cy, r, x0, x1, y0, y1) == doctest::Approx(ref).epsilon(5e-3));
  }
}
