#include <doctest.h>

#include <cmath>
#include <random>

#include "regladder/kernels.hpp"

using namespace regladder;

namespace {

Vortices2D random_vortices(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1, 1);
  Vortices2D v;
  for (int i = 0; i < n; ++i) {
    v.x.push_back(u(rng));
    v.y.push_back(u(rng));
    v.w.push_back(u(rng));
  }
  return v;
}

Charges3D random_charges(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1, 1);
  Charges3D c;
  for (int i = 0; i < n; ++i) c.push(u(rng), u(rng), u(rng), u(rng), u(rng), u(rng));
  return c;
}

}  // namespace

TEST_CASE("patch potential is continuous with matching slope at the edge") {
  const double d = 0.2;
  CHECK(patch_potential(d, d) == doctest::Approx(std::log(d)));
  CHECK(patch_potential(d * (1 - 1e-9), d) == doctest::Approx(std::log(d)));
  const double e = 1e-7;
  const double inner = (patch_potential(d, d) - patch_potential(d - e, d)) / e;
  CHECK(inner == doctest::Approx(1 / d).epsilon(1e-5));
  CHECK(patch_potential(0, d) == doctest::Approx(std::log(d) - 0.5));
  CHECK(patch_potential(0.5, 0) == doctest::Approx(std::log(0.5)));
}

TEST_CASE("velocity is the perpendicular gradient of the pair potential") {
  std::mt19937_64 rng(1);
  const auto v = random_vortices(rng, 10);
  const double delta = 0.1, x = 0.33, y = -0.21, h = 1e-6;
  double u = 0, w = 0;
  const double tx[1] = {x}, ty[1] = {y};
  patch_velocity_2d(v, delta, tx, ty, std::span<double>(&u, 1), std::span<double>(&w, 1), Exec::serial);
  auto stream = [&](double px, double py) {
    double s = 0;
    for (std::size_t j = 0; j < v.size(); ++j) s += v.w[j] * patch_potential(std::hypot(px - v.x[j], py - v.y[j]), delta);
    return s / (2 * 3.14159265358979323846);
  };
  CHECK(u == doctest::Approx(-(stream(x, y + h) - stream(x, y - h)) / (2 * h)).epsilon(1e-6));
  CHECK(w == doctest::Approx((stream(x + h, y) - stream(x - h, y)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("serial and OpenMP kernels agree") {
  std::mt19937_64 rng(2);
  const auto v = random_vortices(rng, 500);
  std::vector<double> u1(v.size()), w1(v.size()), u2(v.size()), w2(v.size());
  patch_velocity_2d(v, 0.01, v.x, v.y, u1, w1, Exec::serial);
  patch_velocity_2d(v, 0.01, v.x, v.y, u2, w2, Exec::parallel);
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(u1[i] == u2[i]);
    CHECK(w1[i] == w2[i]);
  }
  CHECK(log_pair_sum_2d(v, 0.01, Exec::serial) ==
        doctest::Approx(log_pair_sum_2d(v, 0.01, Exec::parallel)).epsilon(1e-12));

  const auto c = random_charges(rng, 400);
  const auto s = coulomb_pair_sum_3d(c, 0.5, Exec::serial), p = coulomb_pair_sum_3d(c, 0.5, Exec::parallel);
  CHECK(s.near == doctest::Approx(p.near).epsilon(1e-12));
  CHECK(s.far == doctest::Approx(p.far).epsilon(1e-12));
  const auto cs = coulomb_cross_sum_3d(c, c, 0.5, Exec::serial);
  CHECK(cs.near == doctest::Approx(2 * s.near).epsilon(1e-12));
  CHECK(cs.far == doctest::Approx(2 * s.far).epsilon(1e-12));
}

TEST_CASE("cutoff moves pairs between near and far only") {
  std::mt19937_64 rng(3);
  const auto c = random_charges(rng, 200);
  const double total = coulomb_pair_sum_3d(c, 10.0).total();
  for (double cut : {0.0, 0.3, 1.0, 4.0}) CHECK(coulomb_pair_sum_3d(c, cut).total() == doctest::Approx(total));
  CHECK(coulomb_pair_sum_3d(c, 10.0).far == 0.0);
}
