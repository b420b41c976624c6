#include "regladder/packing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "regladder/error.hpp"
#include "regladder/geometry.hpp"

namespace regladder {

double NormParams::p_conj() const { return p == 1 ? kInf : p / (p - 1); }

void NormParams::validate() const {
  require(p >= 1, "NormParams", "p must be >= 1");
  require(q >= p, "NormParams", "q must be >= p");
  require(alpha >= 0, "NormParams", "alpha must be >= 0");
  require(r0 > 0 && r0 < 0.5, "NormParams", "r0 must lie in (0, 1/2)");
}

double term_weight(double radius, int dim, const NormParams& params) {
  const double pc = params.p_conj();
  double w = std::isinf(pc) ? 1.0 : std::pow(radius, -dim / pc);
  if (params.alpha != 0) w *= std::pow(std::abs(std::log(radius)), params.alpha);
  return w;
}

double lq_norm(const std::vector<double>& terms, double q) {
  double mx = 0;
  for (double t : terms) mx = std::max(mx, t);
  if (std::isinf(q) || mx == 0) return mx;
  double s = 0;
  for (double t : terms) s += std::pow(t / mx, q);
  return mx * std::pow(s, 1.0 / q);
}

std::vector<double> PackingEvaluation::term_values() const {
  std::vector<double> t;
  t.reserve(terms.size());
  for (const auto& x : terms) t.push_back(x.term);
  return t;
}

// ----------------------------------------------------------------- v_eval

namespace {

void check_scale(double r, const NormParams& params, const char* op) {
  require(r <= params.r0 * (1 + 1e-12), op, "scale exceeds r0");
}

PackingEvaluation finish(std::vector<PackingTerm> terms, double q) {
  PackingEvaluation e;
  e.terms = std::move(terms);
  e.lq_sum = lq_norm(e.term_values(), q);
  return e;
}

}  // namespace

PackingEvaluation v_eval(MassView src, const NormParams& params, const BallCollection& balls) {
  params.validate();
  const int d = src.dim();
  std::vector<PackingTerm> terms;
  for (const auto& b : balls.balls()) {
    check_scale(b.radius, params, "v_eval");
    PackingTerm t;
    t.anchor = b.center;
    t.radius = b.radius;
    t.mass = ball_mass(src, b);
    t.term = term_weight(b.radius, d, params) * t.mass;
    terms.push_back(t);
  }
  return finish(std::move(terms), params.q);
}

PackingEvaluation v_eval(MassView src, const NormParams& params, const CubeCollection& cubes) {
  params.validate();
  const int d = src.dim();
  std::vector<PackingTerm> terms;
  for (const auto& c : cubes.cubes()) {
    check_scale(c.side, params, "v_eval");
    PackingTerm t;
    t.shape = PackingTerm::Shape::cube;
    t.anchor = c.lower;
    t.radius = c.side;
    t.mass = cube_mass(src, c);
    t.term = term_weight(c.side, d, params) * t.mass;
    terms.push_back(t);
  }
  return finish(std::move(terms), params.q);
}

PackingEvaluation v_eval(MassView src, const NormParams& params, const DyadicCubeCover& cover) {
  params.validate();
  check_scale(cover.side(), params, "v_eval");
  const double w = term_weight(cover.side(), src.dim(), params);
  std::vector<PackingTerm> terms;
  for (const auto& cm : cell_masses(src, cover)) {
    PackingTerm t;
    t.shape = PackingTerm::Shape::cube;
    t.anchor = cover.cell(cm.index).lower;
    t.radius = cover.side();
    t.mass = cm.mass;
    t.term = w * cm.mass;
    terms.push_back(t);
  }
  return finish(std::move(terms), params.q);
}

// ---------------------------------------------------------------- lattice

std::vector<int> lattice_levels(MassView src, const NormParams& params, const LatticeOptions& opts) {
  params.validate();
  const double E = src.domain().max_extent();
  int k0 = 0;
  while (std::ldexp(E, -k0) > params.r0 * (1 + 1e-12)) ++k0;
  int kmax = opts.max_level;
  if (kmax < 0) {
    if (src.is_grid()) {
      double h = 0;
      for (int a = 0; a < src.dim(); ++a) h = std::max(h, src.grid().spacing(a));
      kmax = k0;
      while (std::ldexp(E, -(kmax + 1)) >= h * (1 - 1e-9)) ++kmax;
    } else {
      kmax = std::max(k0, opts.atom_max_level);
      const double blob = src.atoms().blob_radius();
      if (blob > 0) {
        int kb = k0;
        while (kb < kmax && std::ldexp(E, -(kb + 1)) >= blob / 8 * (1 - 1e-9)) ++kb;
        kmax = kb;
      }
    }
  }
  std::vector<int> levels;
  for (int k = k0; k <= std::max(k0, kmax); ++k) levels.push_back(k);
  return levels;
}

namespace {

std::vector<Point> lattice_shifts(int dim, double side, int divisions) {
  std::vector<Point> out;
  const int n = std::max(1, divisions);
  std::array<int, 3> lim{1, 1, 1};
  for (int a = 0; a < dim; ++a) lim[a] = n;
  for (int i = 0; i < lim[0]; ++i)
    for (int j = 0; j < lim[1]; ++j)
      for (int k = 0; k < lim[2]; ++k) {
        Point s{i * side / n, j * side / n, k * side / n};
        for (int a = dim; a < 3; ++a) s[a] = 0;
        out.push_back(s);
      }
  return out;
}

bool still_growing(const std::vector<double>& v) {
  const std::size_t L = v.size();
  if (L < 4) return false;
  double first_half = 0;
  for (std::size_t i = 0; i < L / 2; ++i) first_half = std::max(first_half, v[i]);
  const bool tail_up = v[L - 1] >= v[L - 2] && v[L - 2] >= v[L - 3];
  return tail_up && v[L - 1] > 1.2 * first_half;
}

}  // namespace

LatticeResult vnorm_lattice(MassView src, const NormParams& params, const LatticeOptions& opts) {
  params.validate();
  const int d = src.dim();
  const double E = src.domain().max_extent();
  LatticeResult res;
  res.levels = lattice_levels(src, params, opts);

  struct Task {
    int level;
    Point shift;
    double value = 0;
  };
  std::vector<Task> tasks;
  for (int k : res.levels)
    for (const auto& s : lattice_shifts(d, std::ldexp(E, -k), opts.shift_divisions)) tasks.push_back({k, s});

#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const DyadicCubeCover cover(src.domain(), tasks[i].level, tasks[i].shift);
    tasks[i].value = v_eval(src, params, cover).lq_sum;
  }

  res.per_level.assign(res.levels.size(), 0.0);
  const Task* best = nullptr;
  for (const auto& t : tasks) {
    const std::size_t li = static_cast<std::size_t>(t.level - res.levels.front());
    res.per_level[li] = std::max(res.per_level[li], t.value);
    if (!best || t.value > best->value) best = &t;
  }
  if (best) {
    res.value = best->value;
    res.best_level = best->level;
    res.best_shift = best->shift;
    res.best = v_eval(src, params, DyadicCubeCover(src.domain(), best->level, best->shift));
  }
  res.divergence_flag = still_growing(res.per_level);
  return res;
}

// ------------------------------------------------------------- candidates

namespace {

/// Projects x onto the set of centers whose ball of radius r fits in the box.
bool clamp_center(Point& x, double r, const Domain& dom) {
  for (int a = 0; a < dom.dim; ++a) {
    const double lo = dom.lower[a] + r, hi = dom.upper[a] - r;
    if (lo > hi + 1e-15) return false;
    x[a] = std::clamp(x[a], lo, std::max(lo, hi));
  }
  return true;
}

std::vector<Point> raw_centers(MassView src, double r) {
  const auto& dom = src.domain();
  const int d = dom.dim;
  std::vector<Point> pts;
  if (src.is_grid()) {
    const auto& f = src.grid();
    const long cap_axis = d == 1 ? 65536 : (d == 2 ? 64 : 16);
    std::array<long, 3> stride{1, 1, 1};
    for (int a = 0; a < d; ++a) stride[a] = std::max(1L, (f.shape()[a] + cap_axis - 1) / cap_axis);
    for (int i = 0; i < f.shape()[0]; i += stride[0])
      for (int j = 0; j < f.shape()[1]; j += stride[1])
        for (int k = 0; k < f.shape()[2]; k += stride[2]) pts.push_back(f.center(f.linear(i, j, k)));
  } else {
    const auto& mu = src.atoms();
    for (const auto& a : mu.atoms()) pts.push_back(a.position);
    if (mu.size() <= 64)
      for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = i + 1; j < mu.size(); ++j) {
          const auto& x = mu.atoms()[i].position;
          const auto& y = mu.atoms()[j].position;
          if (distance(x, y, d) < 2 * r) {
            Point m{};
            for (int a = 0; a < 3; ++a) m[a] = 0.5 * (x[a] + y[a]);
            pts.push_back(m);
          }
        }
  }
  std::vector<Point> out;
  for (auto x : pts)
    if (clamp_center(x, r, dom)) out.push_back(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<Ball> candidate_universe(MassView src, const NormParams& params, const CandidateOptions& opts) {
  params.validate();
  require(opts.seeds >= 1 && opts.radii >= 1, "candidate_universe", "seeds and radii must be positive");
  const int d = src.dim();
  std::vector<Ball> out;
  for (int m = 0; m < opts.radii; ++m) {
    const double r = std::ldexp(params.r0, -m);
    if (r < opts.min_radius) break;
    const auto centers = raw_centers(src, r);
    std::vector<std::pair<double, Point>> scored(centers.size());
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < centers.size(); ++i)
      scored[i] = {term_weight(r, d, params) * ball_mass(src, Ball{centers[i], r}), centers[i]};
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<Point> kept;
    for (const auto& [term, c] : scored) {
      if (static_cast<int>(kept.size()) >= opts.seeds || term <= 0) break;
      bool far = true;
      for (const auto& k : kept) far &= distance(k, c, d) >= r;
      if (far) kept.push_back(c);
    }
    for (const auto& c : kept) out.push_back(Ball{c, r});
  }
  return out;
}

// ---------------------------------------------------------------- search

namespace {

struct Universe {
  std::vector<Ball> balls;
  std::vector<double> score;          // term^q, or term when q = inf
  std::vector<std::uint32_t> conflict;  // bitmask of overlapping balls
  bool sup_mode = false;              // q = inf
};

Universe prepare(MassView src, const NormParams& params, const std::vector<Ball>& balls, const char* op) {
  params.validate();
  require(balls.size() <= 24, op, "candidate universe larger than 24 balls");
  const int d = src.dim();
  Universe u;
  u.balls = balls;
  u.sup_mode = std::isinf(params.q);
  u.score.resize(balls.size());
  u.conflict.assign(balls.size(), 0);
  for (std::size_t i = 0; i < balls.size(); ++i) {
    check_scale(balls[i].radius, params, op);
    const double t = term_weight(balls[i].radius, d, params) * ball_mass(src, balls[i]);
    u.score[i] = u.sup_mode ? t : std::pow(t, params.q);
    for (std::size_t j = 0; j < balls.size(); ++j)
      if (i != j && !BallCollection::disjoint(balls[i], balls[j], d)) u.conflict[i] |= 1u << j;
  }
  return u;
}

double mask_value(const Universe& u, std::uint32_t mask) {
  double s = 0;
  for (std::size_t i = 0; i < u.balls.size(); ++i)
    if (mask >> i & 1u) s = u.sup_mode ? std::max(s, u.score[i]) : s + u.score[i];
  return s;
}

SearchResult to_result(const Universe& u, std::uint32_t mask, double q) {
  SearchResult r;
  const double v = mask_value(u, mask);
  r.value = u.sup_mode ? v : std::pow(v, 1.0 / q);
  for (std::size_t i = 0; i < u.balls.size(); ++i)
    if (mask >> i & 1u) r.collection.push_back(u.balls[i]);
  return r;
}

std::vector<std::size_t> order_by_score(const Universe& u) {
  std::vector<std::size_t> idx(u.balls.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return u.score[a] > u.score[b]; });
  return idx;
}

std::uint32_t fill(const Universe& u, std::uint32_t mask, const std::vector<std::size_t>& order,
                   const std::function<bool(std::size_t)>& allowed) {
  for (std::size_t i : order) {
    if (mask >> i & 1u || !allowed(i) || u.score[i] <= 0) continue;
    if ((u.conflict[i] & mask) == 0) mask |= 1u << i;
  }
  return mask;
}

std::uint32_t local_search(const Universe& u, std::uint32_t mask, const std::vector<std::size_t>& order) {
  bool improved = true;
  while (improved) {
    improved = false;
    const double cur = mask_value(u, mask);
    for (std::size_t i : order) {
      if (mask >> i & 1u) continue;
      std::uint32_t next = (mask & ~u.conflict[i]) | (1u << i);
      next = fill(u, next, order, [](std::size_t) { return true; });
      if (mask_value(u, next) > cur * (1 + 1e-14)) {
        mask = next;
        improved = true;
        break;
      }
    }
  }
  return mask;
}

}  // namespace

SearchResult greedy_search(MassView src, const NormParams& params, const std::vector<Ball>& universe) {
  if (universe.empty()) return {};
  const Universe u = prepare(src, params, universe, "greedy_search");
  const auto order = order_by_score(u);
  std::vector<std::uint32_t> starts;
  starts.push_back(fill(u, 0, order, [](std::size_t) { return true; }));
  std::vector<double> radii;
  for (const auto& b : universe) radii.push_back(b.radius);
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  for (double r : radii) starts.push_back(fill(u, 0, order, [&](std::size_t i) { return u.balls[i].radius == r; }));

  std::uint32_t best = 0;
  double best_v = -1;
  for (auto m : starts) {
    m = local_search(u, m, order);
    const double v = mask_value(u, m);
    if (v > best_v) {
      best_v = v;
      best = m;
    }
  }
  return to_result(u, best, params.q);
}

SearchResult vnorm_greedy(MassView src, const NormParams& params, int seeds, int radii) {
  CandidateOptions opts;
  opts.seeds = seeds;
  opts.radii = radii;
  auto universe = candidate_universe(src, params, opts);
  if (universe.size() > 24) universe.resize(24);
  return greedy_search(src, params, universe);
}

SearchResult vnorm_bruteforce(MassView src, const NormParams& params, const std::vector<Ball>& universe) {
  if (universe.empty()) return {};
  const Universe u = prepare(src, params, universe, "vnorm_bruteforce");
  const auto order = order_by_score(u);
  const std::size_t n = order.size();
  if (u.sup_mode) return to_result(u, 1u << order.front(), params.q);

  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + u.score[order[i]];

  std::uint32_t best = 0;
  double best_v = 0;
  std::function<void(std::size_t, std::uint32_t, double)> dfs = [&](std::size_t pos, std::uint32_t mask, double v) {
    if (v > best_v) {
      best_v = v;
      best = mask;
    }
    if (pos == n || v + suffix[pos] <= best_v) return;
    const std::size_t i = order[pos];
    if ((u.conflict[i] & mask) == 0) dfs(pos + 1, mask | (1u << i), v + u.score[i]);
    dfs(pos + 1, mask, v);
  };
  dfs(0, 0, 0.0);
  return to_result(u, best, params.q);
}

// ----------------------------------------------------------------- Morrey

namespace {

std::vector<Point> center_lattice(const Domain& dom, double r, double step, long cap_total) {
  const int d = dom.dim;
  long cap_axis = cap_total;
  if (d == 2) cap_axis = static_cast<long>(std::sqrt(static_cast<double>(cap_total)));
  if (d == 3) cap_axis = static_cast<long>(std::cbrt(static_cast<double>(cap_total)));
  std::array<long, 3> n{1, 1, 1};
  std::array<double, 3> lo{}, dx{};
  for (int a = 0; a < d; ++a) {
    const double span = dom.extent(a) - 2 * r;
    if (span < -1e-15) return {};
    n[a] = std::clamp(static_cast<long>(std::ceil(std::max(0.0, span) / step)) + 1, 1L, std::max(1L, cap_axis));
    lo[a] = dom.lower[a] + r;
    dx[a] = n[a] > 1 ? span / static_cast<double>(n[a] - 1) : 0.0;
    if (n[a] == 1) lo[a] = 0.5 * (dom.lower[a] + dom.upper[a]);
  }
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n[0] * n[1] * n[2]));
  for (long i = 0; i < n[0]; ++i)
    for (long j = 0; j < n[1]; ++j)
      for (long k = 0; k < n[2]; ++k) {
        Point x{};
        const std::array<long, 3> ijk{i, j, k};
        for (int a = 0; a < d; ++a) x[a] = lo[a] + ijk[a] * dx[a];
        out.push_back(x);
      }
  return out;
}

}  // namespace

MorreyResult morrey_over(MassView src, double p, double alpha, const std::vector<Ball>& balls) {
  NormParams params{p, kInf, alpha, 0.49};
  params.validate();
  MorreyResult res;
  std::vector<double> vals(balls.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t i = 0; i < balls.size(); ++i)
    vals[i] = term_weight(balls[i].radius, src.dim(), params) * ball_mass(src, balls[i]);
  for (std::size_t i = 0; i < balls.size(); ++i)
    if (vals[i] > res.value) {
      res.value = vals[i];
      res.best = balls[i];
    }
  return res;
}

MorreyResult morrey_norm(MassView src, double p, double alpha, double r0, const MorreyOptions& opts) {
  NormParams params{p, kInf, alpha, r0};
  params.validate();
  const int d = src.dim();
  const auto& dom = src.domain();
  double rmin = opts.min_radius;
  if (rmin <= 0) {
    if (src.is_grid()) {
      for (int a = 0; a < d; ++a) rmin = std::max(rmin, src.grid().spacing(a));
    } else {
      rmin = std::ldexp(dom.max_extent(), -14);
      rmin = std::max(rmin, src.atoms().blob_radius() / 4);
    }
  }
  const long cap = d == 1 ? 65536 : (d == 2 ? 65536 : 32768);
  MorreyResult best;
  for (int m = 0;; ++m) {
    const double r = r0 * std::pow(2.0, -static_cast<double>(m) / opts.radii_per_octave);
    if (r < rmin * (1 - 1e-12)) break;
    std::vector<Ball> balls;
    for (const auto& c : center_lattice(dom, r, opts.center_step * r, cap)) balls.push_back({c, r});
    if (!src.is_grid())
      for (auto x : src.atoms().atoms()) {
        Point c = x.position;
        if (clamp_center(c, r, dom)) balls.push_back({c, r});
      }
    const auto here = morrey_over(src, p, alpha, balls);
    if (here.value > best.value) best = here;
  }
  return best;
}

// ------------------------------------------------------- Haar projection

double haar_projection_lp(MassView src, double p, const BallCollection& balls) {
  require(p >= 1, "haar_projection_lp", "p must be >= 1");
  const int d = src.dim();
  double s = 0;
  for (const auto& b : balls.balls()) {
    const double vol = unit_ball_volume(d) * std::pow(b.radius, d);
    s += vol * std::pow(ball_mass(src, b) / vol, p);
  }
  return std::pow(s, 1.0 / p);
}

double haar_projection_lp(MassView src, double p, const DyadicCubeCover& cover) {
  require(p >= 1, "haar_projection_lp", "p must be >= 1");
  const double vol = std::pow(cover.side(), src.dim());
  double s = 0;
  for (const auto& cm : cell_masses(src, cover)) s += vol * std::pow(cm.mass / vol, p);
  return std::pow(s, 1.0 / p);
}

// ------------------------------------------------------------ inequalities

HolderCheck holder_check(const GridField& f, double p, const BallCollection& balls) {
  require(p >= 1, "holder_check", "p must be >= 1");
  const int d = f.dim();
  const double pc = p == 1 ? kInf : p / (p - 1);
  HolderCheck h;
  for (const auto& b : balls.balls()) {
    double m = 0, lp = 0;
    for (const auto& [c, w] : ball_weights(f, b)) {
      const double v = f.magnitude(c);
      m += w * v;
      lp += w * std::pow(v, p);
    }
    const double scale = std::isinf(pc) ? 1.0 : std::pow(b.radius, -d / pc);
    h.lhs += std::pow(scale * m, p);
    h.rhs += lp;
  }
  h.rhs *= std::pow(unit_ball_volume(d), p - 1);
  return h;
}

InterpolationCheck interpolation_check(const std::vector<double>& terms, double p, double q) {
  require(q >= p && p >= 1, "interpolation_check", "need 1 <= p <= q");
  InterpolationCheck c;
  c.vq = lq_norm(terms, q);
  c.vp = lq_norm(terms, p);
  c.vinf = lq_norm(terms, kInf);
  c.bound = std::isinf(q) ? c.vinf : std::pow(c.vp, p / q) * std::pow(c.vinf, 1 - p / q);
  return c;
}

// -------------------------------------------------------- packing measure

PackingMeasureResult packing_measure_estimate(const std::vector<Point>& support, int dim,
                                              const std::vector<double>& radii) {
  require(dim >= 1 && dim <= 3, "packing_measure_estimate", "dimension must be 1, 2 or 3");
  PackingMeasureResult res;
  res.radii = radii;
  std::sort(res.radii.begin(), res.radii.end(), std::greater<>());
  std::vector<Point> pts = support;
  std::sort(pts.begin(), pts.end());
  for (double r : res.radii) {
    require(r > 0, "packing_measure_estimate", "radii must be positive");
    const double cell = 2 * r;
    std::unordered_map<long long, std::vector<Point>> grid;
    auto key = [&](const std::array<long long, 3>& c) { return (c[0] * 2000003LL + c[1]) * 2000003LL + c[2]; };
    long count = 0;
    for (const auto& x : pts) {
      std::array<long long, 3> c{0, 0, 0};
      for (int a = 0; a < dim; ++a) c[a] = static_cast<long long>(std::floor(x[a] / cell));
      bool free = true;
      for (long long i = -1; i <= 1 && free; ++i)
        for (long long j = (dim > 1 ? -1 : 0); j <= (dim > 1 ? 1 : 0) && free; ++j)
          for (long long k = (dim > 2 ? -1 : 0); k <= (dim > 2 ? 1 : 0) && free; ++k) {
            auto it = grid.find(key({c[0] + i, c[1] + j, c[2] + k}));
            if (it == grid.end()) continue;
            for (const auto& y : it->second)
              if (distance(x, y, dim) <= 2 * r) {
                free = false;
                break;
              }
          }
      if (free) {
        grid[key(c)].push_back(x);
        ++count;
      }
    }
    res.per_radius.push_back(2 * r * static_cast<double>(count));
  }
  if (!res.per_radius.empty()) res.estimate = res.per_radius.back();
  const std::size_t L = res.per_radius.size();
  if (L >= 2 && res.per_radius[L - 2] > 0) {
    const double slope = std::log(res.per_radius[L - 1] / res.per_radius[L - 2]) /
                         std::log(res.radii[L - 2] / res.radii[L - 1]);
    res.divergence_flag = slope > 0.5;
  }
  return res;
}

PackingMeasureResult packing_measure_estimate(const GridField& mask, const std::vector<double>& radii) {
  std::vector<Point> pts;
  for (std::size_t c = 0; c < mask.cell_count(); ++c)
    if (mask.magnitude(c) > 0) pts.push_back(mask.center(c));
  return packing_measure_estimate(pts, mask.dim(), radii);
}

// ----------------------------------------------------------------- ladder

bool LadderReport::all_pass() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const LadderCheck& c) { return c.status == LadderCheck::Status::fail; });
}

LadderReport ladder_report(const GridField& f, double p, double alpha, double r0, const LatticeOptions& opts) {
  require(f.components() == 1, "ladder_report", "scalar field required");
  LadderReport rep;
  auto add = [&](std::string name, double v, bool finite) { rep.entries.push_back({std::move(name), v, finite}); };

  const auto lpp = lorentz_zygmund_norm(f, p, p, alpha);
  add("L^{pp,alpha}", lpp.value, lpp.finite);

  std::vector<double> qs{p};
  if (2 > p) qs.push_back(2);
  qs.push_back(2 * p);
  qs.push_back(kInf);
  std::vector<LatticeResult> vq;
  for (double q : qs) {
    vq.push_back(vnorm_lattice(f, NormParams{p, q, alpha, r0}, opts));
    const std::string qs_name = std::isinf(q) ? "inf" : (q == p ? "p" : (q == 2 * p ? "2p" : "2"));
    add("V^{p" + qs_name + ",alpha}", vq.back().value, !vq.back().divergence_flag);
  }
  const auto weak = lorentz_zygmund_norm(f, p, kInf, alpha);
  add("L^{p inf,alpha}", weak.value, weak.finite);
  const auto morrey = morrey_norm(f, p, alpha, r0);
  add("M^{p,alpha}", morrey.value, true);

  auto status = [](bool ok) { return ok ? LadderCheck::Status::pass : LadderCheck::Status::fail; };
  const double tol = 1e-12;

  LadderCheck holder{"V^{pp} <= ||f||_{L^p}", vq[0].value, lpp.value, LadderCheck::Status::not_applicable};
  if (alpha == 0) holder.status = status(holder.lhs <= holder.rhs * (1 + tol));
  rep.checks.push_back(holder);

  const double vpp = vq.front().value, vinf = vq.back().value;
  for (std::size_t i = 1; i + 1 < qs.size(); ++i) {
    const double q = qs[i];
    LadderCheck c{"interpolation q=" + std::to_string(q), vq[i].value,
                  std::pow(vpp, p / q) * std::pow(vinf, 1 - p / q), LadderCheck::Status::not_applicable};
    if (!vq.front().divergence_flag) c.status = status(c.lhs <= c.rhs * (1 + tol) + 1e-300);
    rep.checks.push_back(c);
  }
  for (std::size_t i = 0; i + 1 < qs.size(); ++i) {
    LadderCheck c{"monotone in q", vq[i + 1].value, vq[i].value, LadderCheck::Status::pass};
    c.status = status(c.lhs <= c.rhs * (1 + tol) + 1e-300);
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace regladder
