#include "regladder/cli.hpp"

#include <omp.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "regladder/error.hpp"
#include "regladder/euler2d.hpp"
#include "regladder/euler3d.hpp"
#include "regladder/field.hpp"
#include "regladder/io.hpp"
#include "regladder/packing.hpp"
#include "regladder/rearrangement.hpp"
#include "regladder/wavelet.hpp"

namespace regladder::cli {

using nlohmann::json;

namespace {

const std::vector<std::pair<Command, const char*>> kCommandNames{
    {Command::norm, "norm"},   {Command::ladder, "ladder"}, {Command::embed, "embed"},
    {Command::wavelet, "wavelet"}, {Command::sim2d, "sim2d"}, {Command::dmj, "dmj"},
    {Command::sim3d, "sim3d"}, {Command::report, "report"}};

const std::vector<ParamSpec> kFieldSchema{
    {"kind", ParamType::string, "zero, constant, power, random, blobs or tube"},
    {"dim", ParamType::integer, "spatial dimension"},
    {"n", ParamType::integer, "cells per axis"},
    {"lo", ParamType::number, "lower domain bound on every axis"},
    {"hi", ParamType::number, "upper domain bound on every axis"},
    {"value", ParamType::number, "amplitude"},
    {"exponent", ParamType::number, "power-law exponent"},
    {"count", ParamType::integer, "number of random blobs"},
    {"tilt", ParamType::number, "direction twist of the tube, radians"},
};

const ParamSpec kFieldParam{"field", ParamType::object, "synthetic input field when no --input is given"};

std::shared_ptr<spdlog::logger> logger() {
  static auto lg = [] {
    auto l = spdlog::stderr_color_mt("regladder");
    l->set_level(spdlog::level::warn);
    l->set_pattern("[%l] %v");
    return l;
  }();
  return lg;
}

const char* type_name(ParamType t) {
  switch (t) {
    case ParamType::number: return "a number";
    case ParamType::integer: return "an integer";
    case ParamType::string: return "a string";
    case ParamType::number_list: return "a list of numbers";
    case ParamType::extended: return "a number or \"inf\"";
    case ParamType::object: return "an object";
  }
  return "";
}

bool is_inf_string(const json& v) { return v.is_string() && (v == "inf" || v == "infinity"); }

bool type_ok(const json& v, ParamType t) {
  switch (t) {
    case ParamType::number: return v.is_number();
    case ParamType::integer: return v.is_number_integer();
    case ParamType::string: return v.is_string();
    case ParamType::number_list:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); });
    case ParamType::extended: return v.is_number() || is_inf_string(v);
    case ParamType::object: return v.is_object();
  }
  return false;
}

void validate_object(const json& obj, const std::vector<ParamSpec>& schema, const std::string& prefix,
                     const std::string& context) {
  for (const auto& [key, v] : obj.items()) {
    const auto it = std::find_if(schema.begin(), schema.end(), [&](const ParamSpec& s) { return s.key == key; });
    if (it == schema.end()) throw ConfigError(prefix + key, "is not recognised " + context);
    if (!type_ok(v, it->type)) throw ConfigError(prefix + key, std::string("must be ") + type_name(it->type));
    if (it->type == ParamType::object && key == "field") validate_object(v, kFieldSchema, prefix + key + ".", "in a field spec");
  }
}

double num(const json& p, const char* key, double dflt) {
  if (!p.contains(key)) return dflt;
  const auto& v = p.at(key);
  return is_inf_string(v) ? kInf : v.get<double>();
}

long integer(const json& p, const char* key, long dflt) { return p.contains(key) ? p.at(key).get<long>() : dflt; }

std::string str(const json& p, const char* key, const std::string& dflt) {
  return p.contains(key) ? p.at(key).get<std::string>() : dflt;
}

json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json sanitize(const json& j) {
  if (j.is_number_float()) return finite_or_string(j.get<double>());
  if (j.is_array() || j.is_object()) {
    json out = j;
    for (auto& [k, v] : out.items()) v = sanitize(v);
    return out;
  }
  return j;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::array<int, 3> cube_shape(int dim, int n) {
  std::array<int, 3> s{1, 1, 1};
  for (int a = 0; a < dim; ++a) s[a] = n;
  return s;
}

double bump4(double r, double R) {
  if (r >= R) return 0.0;
  const double q = 1 - r * r / (R * R);
  return q * q * q * q;
}

struct FieldDefaults {
  std::string kind = "constant";
  int dim = 1;
  int n = 16;
  double lo = 0, hi = 1, value = 1;
  int components = 1;
};

GridField make_field(const json& spec, std::uint64_t seed, const FieldDefaults& d) {
  const std::string kind = str(spec, "kind", d.kind);
  const int dim = static_cast<int>(integer(spec, "dim", d.dim));
  const int n = static_cast<int>(integer(spec, "n", d.n));
  const double lo = num(spec, "lo", d.lo), hi = num(spec, "hi", d.hi);
  const double value = num(spec, "value", d.value);
  if (dim < 1 || dim > 3) throw ConfigError("params.field.dim", "must be 1, 2 or 3");
  if (n < 1) throw ConfigError("params.field.n", "must be positive");
  if (!(hi > lo)) throw ConfigError("params.field.hi", "must exceed lo");
  const Domain dom = Domain::cube(dim, lo, hi);
  const auto shape = cube_shape(dim, n);
  const int comps = d.components;
  std::mt19937_64 rng(seed);

  if (kind == "zero") return GridField(dom, shape, comps);
  if (kind == "constant") {
    GridField f(dom, shape, comps);
    for (std::size_t c = 0; c < f.cell_count(); ++c) f(c, comps - 1) = value;
    return f;
  }
  if (kind == "power") {
    if (comps != 1) throw ConfigError("params.field.kind", "power fields are scalar");
    const double e = num(spec, "exponent", -0.5);
    return GridField::sample(dom, shape, [&](const Point& x) { return value * std::pow(distance(x, dom.lower, dim), e); });
  }
  if (kind == "random") {
    std::uniform_real_distribution<double> u(0, value);
    GridField f(dom, shape, comps);
    for (auto& v : f.values()) v = u(rng);
    return f;
  }
  if (kind == "blobs") {
    const long count = integer(spec, "count", 3);
    const double ext = hi - lo, mid = (lo + hi) / 2;
    std::uniform_real_distribution<double> cu(mid - ext / 4, mid + ext / 4), ru(0.1 * ext, 0.2 * ext),
        au(0.5, 1.0), vu(-1.0, 1.0);
    struct B {
      Point c;
      double r;
      std::array<double, 3> a;
    };
    std::vector<B> bs;
    for (long k = 0; k < count; ++k) {
      B b{};
      for (int a = 0; a < dim; ++a) b.c[a] = cu(rng);
      b.r = ru(rng);
      if (comps == 1) b.a[0] = value * au(rng);
      else for (int q = 0; q < 3; ++q) b.a[q] = value * vu(rng);
      bs.push_back(b);
    }
    if (comps == 1)
      return GridField::sample(dom, shape, [&](const Point& x) {
        double s = 0;
        for (const auto& b : bs) s += b.a[0] * bump4(distance(x, b.c, dim), b.r);
        return s;
      });
    return GridField::sample_vector(dom, shape, [&](const Point& x) {
      std::array<double, 3> w{};
      for (const auto& b : bs) {
        const double s = bump4(distance(x, b.c, dim), b.r);
        for (int q = 0; q < 3; ++q) w[q] += s * b.a[q];
      }
      return w;
    });
  }
  if (kind == "tube") {
    if (dim != 3 || comps != 3) throw ConfigError("params.field.kind", "tube fields are three-dimensional vectors");
    const double tilt = num(spec, "tilt", 0.0), ext = hi - lo, mid = (lo + hi) / 2;
    return GridField::sample_vector(dom, shape, [&](const Point& x) {
      const double s = value * bump4(std::hypot(x[0] - mid, x[1] - mid), 0.15 * ext) * bump4(std::abs(x[2] - mid), 0.35 * ext);
      const double a = tilt * (x[0] - mid) / (0.3 * ext);
      return std::array<double, 3>{s * std::sin(a), 0.0, s * std::cos(a)};
    });
  }
  throw ConfigError("params.field.kind", "must be one of zero, constant, power, random, blobs, tube");
}

GridField load_field(const RunConfig& cfg, const FieldDefaults& d) {
  if (!cfg.input.empty()) {
    auto f = io::read_grid(cfg.input);
    if (f.components() != d.components)
      throw ConfigError("input", "has " + std::to_string(f.components()) + " components, expected " +
                                     std::to_string(d.components));
    return f;
  }
  return make_field(cfg.params.value("field", json::object()), cfg.seed, d);
}

double lp_norm(const GridField& f, double p) {
  double s = 0;
  for (std::size_t c = 0; c < f.cell_count(); ++c) s += std::pow(f.magnitude(c), p) * f.cell_volume();
  return std::pow(s, 1 / p);
}

Check make_check(std::string name, std::string anchor, double lhs, double rhs, bool asserted = true) {
  Check c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.lhs = lhs;
  c.rhs = rhs;
  c.asserted = asserted;
  return c;
}

void add_terms_table(Report& r, const PackingEvaluation& ev) {
  Table t{"terms", {"x", "y", "z", "radius", "mass", "term"}, {}};
  for (const auto& term : ev.terms)
    t.rows.push_back({term.anchor[0], term.anchor[1], term.anchor[2], term.radius, term.mass, term.term});
  r.tables.push_back(std::move(t));
}

json balls_json(const std::vector<Ball>& balls) {
  json a = json::array();
  for (const auto& b : balls) a.push_back({{"center", b.center}, {"radius", b.radius}});
  return a;
}

NormParams norm_params(const json& p) {
  return NormParams{num(p, "p", 1.0), num(p, "q", 2.0), num(p, "alpha", 0.0), num(p, "r0", kDefaultR0)};
}

// ----------------------------------------------------------------- commands

void run_norm(const RunConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  GridField f = load_field(cfg, {});
  if (const double eps = num(p, "mollify", 0); eps > 0) {
    f = mollify(f, eps);
    r.ops.insert("mollify");
  }
  const std::string space = str(p, "space", "v");
  const NormParams np = norm_params(p);
  r.values["space"] = space;

  if (space == "v") {
    np.validate();
    const std::string method = str(p, "method", "lattice");
    r.values["method"] = method;
    const int seeds = static_cast<int>(integer(p, "seeds", 5)), radii = static_cast<int>(integer(p, "radii", 4));
    if (method == "lattice") {
      LatticeOptions lo;
      lo.max_level = static_cast<int>(integer(p, "max_level", -1));
      const auto res = vnorm_lattice(f, np, lo);
      r.ops.insert({"vnorm_lattice", "cell_masses", "v_eval"});
      r.values["value"] = res.value;
      r.values["divergence_flag"] = res.divergence_flag;
      r.values["best_level"] = res.best_level;
      r.values["levels"] = res.levels;
      r.values["per_level"] = res.per_level;
      add_terms_table(r, res.best);
      if (np.q > np.p && !res.divergence_flag && !res.best.terms.empty()) {
        const auto ic = interpolation_check(res.best.term_values(), np.p, np.q);
        r.checks.push_back(make_check("interpolation of the lattice terms", "Eq. 2.7", ic.vq, ic.bound));
      }
    } else if (method == "greedy" || method == "brute") {
      SearchResult best;
      if (method == "greedy") {
        best = vnorm_greedy(f, np, seeds, radii);
        r.ops.insert("vnorm_greedy");
      } else {
        CandidateOptions co;
        co.seeds = seeds;
        co.radii = radii;
        const auto universe = candidate_universe(f, np, co);
        const auto greedy = greedy_search(f, np, universe);
        best = vnorm_bruteforce(f, np, universe);
        r.ops.insert({"vnorm_greedy", "vnorm_bruteforce"});
        r.values["greedy_value"] = greedy.value;
        r.values["universe_size"] = universe.size();
        r.checks.push_back(make_check("greedy <= exhaustive", "Def. 2.1", greedy.value, best.value));
      }
      const BallCollection balls(best.collection, f.dim());
      const auto ev = v_eval(f, np, balls);
      r.ops.insert({"v_eval", "ball_mass"});
      r.values["value"] = best.value;
      r.values["collection"] = balls_json(best.collection);
      r.values["divergence_flag"] = false;
      add_terms_table(r, ev);
      const auto hc = holder_check(f, np.p, balls);
      r.checks.push_back(make_check("Holder bound on the collection", "Eq. 2.12", hc.lhs, hc.rhs));
    } else {
      throw ConfigError("params.method", "must be one of lattice, greedy, brute");
    }
  } else if (space == "morrey") {
    const auto m = morrey_norm(f, np.p, np.alpha, np.r0);
    r.ops.insert("morrey_norm");
    r.values["value"] = m.value;
    r.values["best_ball"] = balls_json({m.best});
  } else if (space == "lorentz") {
    const auto rs = rearrange(f);
    const auto lz = lorentz_zygmund_norm(rs, np.p, np.q, np.alpha);
    r.ops.insert({"rearrange", "maximal_F", "f_star_star", "lorentz_zygmund_norm"});
    r.values["value"] = lz.value;
    r.values["finite"] = lz.finite;
    Table t{"rearrangement", {"s", "f_star", "f_star_star", "F"}, {}};
    const std::size_t stride = std::max<std::size_t>(1, rs.breaks.size() / 512);
    double worst = 0;
    for (std::size_t i = 0; i < rs.breaks.size(); i += stride) {
      const double s = rs.breaks[i];
      const double fs = f_star(rs, s), fss = f_star_star(rs, s);
      worst = std::max(worst, fs - fss);
      t.rows.push_back({s, fs, fss, maximal_F(rs, s)});
    }
    r.tables.push_back(std::move(t));
    r.checks.push_back(make_check("f* <= f**", "Lemma 2.2", worst, 0.0));
  } else if (space == "haar") {
    const int level = static_cast<int>(integer(p, "level", 2));
    const DyadicCubeCover cover(f.domain(), level);
    const double proj = haar_projection_lp(f, np.p, cover);
    const double full = lp_norm(f, np.p);
    r.ops.insert({"haar_projection_lp", "cell_masses"});
    r.values["value"] = proj;
    r.values["lp_norm"] = full;
    r.values["level"] = level;
    r.checks.push_back(make_check("projection contracts L^p", "Haar projection identity", proj, full));
  } else {
    throw ConfigError("params.space", "must be one of v, morrey, lorentz, haar");
  }
}

void run_ladder(const RunConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  const GridField f = load_field(cfg, {});
  LatticeOptions lo;
  lo.max_level = static_cast<int>(integer(p, "max_level", -1));
  const auto rep = ladder_report(f, num(p, "p", 2.0), num(p, "alpha", 0.0), num(p, "r0", kDefaultR0), lo);
  r.ops.insert({"ladder_report", "vnorm_lattice", "morrey_norm", "lorentz_zygmund_norm", "rearrange", "cell_masses"});
  json entries = json::array();
  for (const auto& e : rep.entries) entries.push_back({{"name", e.name}, {"value", e.value}, {"finite", e.finite}});
  r.values["entries"] = entries;
  for (const auto& c : rep.checks)
    r.checks.push_back(make_check(c.name, "Eq. 2.14", c.lhs, c.rhs, c.status != LadderCheck::Status::not_applicable));
}

void run_embed(const RunConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  const auto v = embedding_verdict(num(p, "p", 1.0), num(p, "q", 2.0), num(p, "alpha", 0.0), num(p, "s", -1.0),
                                   num(p, "eta", 2.0), static_cast<int>(integer(p, "dim", 2)));
  r.ops.insert("embedding_verdict");
  r.values["verdict"] = to_string(v.kind);
  r.values["rule"] = v.rule;
  r.values["label"] = v.label;
  r.values["lhs"] = v.lhs;
  r.values["rhs"] = v.rhs;
}

void run_wavelet(const RunConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  const GridField f = load_field(cfg, {"constant", 1, 64});
  const auto d = haar_decompose(f, static_cast<int>(integer(p, "levels", -1)));
  const int k_from = static_cast<int>(integer(p, "k_from", d.k_min()));
  const auto dec = decay_check(d, num(p, "p", 1.0), num(p, "alpha", 0.0), k_from);
  r.ops.insert({"haar_decompose", "level_energy", "decay_check", "hneg1_upper", "hneg1_fourier", "tail_hneg1", "besov_norm"});

  Table t{"levels", {"k", "energy", "bound", "ratio"}, {}};
  for (std::size_t i = 0; i < dec.levels.size(); ++i)
    t.rows.push_back({static_cast<double>(dec.levels[i]), dec.energies[i], dec.bounds[i], dec.ratios[i]});
  r.tables.push_back(std::move(t));

  double energy = d.scaling_energy();
  for (int k = d.k_min(); k <= d.k_max(); ++k) energy += level_energy(d, k);
  const double l2sq = std::pow(f.l2_norm(), 2);
  r.checks.push_back(make_check("Parseval", "orthonormal Haar basis", std::abs(energy - l2sq), 1e-9 * l2sq + 1e-300));

  r.values["k_min"] = d.k_min();
  r.values["k_max"] = d.k_max();
  r.values["slope"] = dec.slope;
  r.values["bound_slope"] = dec.bound_slope;
  r.values["max_ratio"] = dec.max_ratio;
  r.values["hneg1_upper"] = hneg1_upper(d);
  r.values["hneg1_fourier"] = hneg1_fourier(f);
  r.values["tail_hneg1_finest"] = d.depth > 0 ? tail_hneg1(d, d.k_max() - 1) : 0.0;
  if (d.depth >= 3) r.values["tail_exponent"] = tail_exponent(d, k_from);
  const BesovParams bp{num(p, "s", -1.0), num(p, "r", 2.0), num(p, "eta", 2.0)};
  r.values["besov"] = {{"s", bp.s}, {"r", bp.r}, {"eta", bp.eta}, {"value", besov_norm(d, bp)}};
}

VortexState2D initial_state_2d(const RunConfig& cfg, const Domain& dom, double delta) {
  const auto& p = cfg.params;
  if (!cfg.atoms.empty()) return VortexState2D::from_measure(io::read_atoms(cfg.atoms, dom), delta);
  VortexState2D s;
  s.delta = delta;
  if (p.contains("vortices")) {
    const auto v = p.at("vortices").get<std::vector<double>>();
    if (v.size() % 3 != 0) throw ConfigError("params.vortices", "must hold x, y, circulation triples");
    for (std::size_t i = 0; i < v.size(); i += 3) s.add(v[i], v[i + 1], v[i + 2]);
  } else if (const long n = integer(p, "random", 0); n > 0) {
    std::mt19937_64 rng(cfg.seed);
    const double half = dom.upper[0];
    std::uniform_real_distribution<double> x(-0.4 * half, 0.4 * half), g(0.5, 1.0);
    for (long i = 0; i < n; ++i) {
      const double a = x(rng), b = x(rng);
      s.add(a, b, g(rng) / static_cast<double>(n));
    }
  } else {
    s.add(-0.1, 0.0, 1.0);
    s.add(0.1, 0.0, 1.0);
  }
  return s;
}

void run_sim2d(const RunConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  const double delta = num(p, "delta", 0.01), dt = num(p, "dt", 1e-3), t_end = num(p, "t_end", 1.0);
  const double half = num(p, "half", 1.0), alpha = num(p, "alpha", 0.5), r0 = num(p, "r0", kDefaultR0);
  const long stride = std::max(1L, integer(p, "stride", 100));
  const int level = static_cast<int>(integer(p, "partition_level", 3));
  if (!(dt > 0)) throw ConfigError("params.dt", "must be positive");
  if (!(t_end >= 0)) throw ConfigError("params.t_end", "must be nonnegative");
  const Domain dom = Domain::cube(2, -half, half);
  VortexState2D s = initial_state_2d(cfg, dom, delta);
  const DyadicCubeCover cover(dom, level);
  const bool one_signed = std::all_of(s.vortices.w.begin(), s.vortices.w.end(), [](double g) { return g >= 0; });
  r.ops.insert({"step", "pseudo_energy", "moments", "energy_partition", "biot_savart", "vnorm_lattice"});

  Table t{"series", {"t", "H", "H_si", "H_ie", "I_0", "I_2", "V", "u_center", "v_center"}, {}};
  std::vector<std::pair<long, AtomicMeasure>> snaps;
  auto record = [&](long index) {
    const auto part = energy_partition(s, cover);
    const auto m = moments(s);
    const double v = vnorm_lattice(s.to_measure(dom), NormParams{1, 2, alpha, r0}).value;
    const auto u = biot_savart(s, 0.0, 0.0);
    t.rows.push_back({s.t, pseudo_energy(s), part.h_si, part.h_ie, m.i0, m.i2, v, u[0], u[1]});
    if (!cfg.out_dir.empty()) snaps.emplace_back(index, s.to_measure(dom));
  };
  auto lemma = [&](const char* when) {
    const auto l = lemma41_check(s, cover);
    r.ops.insert("lemma41_check");
    const std::string tag = std::string(" at ") + when;
    r.checks.push_back(make_check("self-induced lower bound" + tag, "Lemma 4.1", l.si_lower, l.h_si));
    r.checks.push_back(make_check("interaction bound" + tag, "Lemma 4.1", -l.h_ie, l.const0));
    r.checks.push_back(make_check("V^{12}(log V)^{1/2} bound" + tag, "Lemma 4.1", l.v_lattice * l.v_lattice,
                                  2 * kPi * (l.h + l.const0)));
  };

  const long steps = std::lround(t_end / dt);
  record(0);
  if (one_signed && s.size() > 0) lemma("start");
  for (long k = 1; k <= steps; ++k) {
    step(s, dt);
    if (k % stride == 0 || k == steps) record(k);
  }
  if (one_signed && s.size() > 0) lemma("end");

  const auto& first = t.rows.front();
  const auto& last = t.rows.back();
  const char* names[] = {"H", "I_0", "I_2"};
  const int cols[] = {1, 4, 5};
  for (int i = 0; i < 3; ++i)
    r.checks.push_back(make_check(std::string(names[i]) + " drift", "pseudo-energy invariants",
                                  std::abs(last[cols[i]] - first[cols[i]]), 1e-4 * std::abs(first[cols[i]]) + 1e-300,
                                  false));
  if (const double jd = num(p, "jdelta", 0); jd > 0) {
    const auto phi = TestFunction2D::plateau(0.5 * half, 0.95 * half);
    const auto js = jdelta_split(s, phi, jd, alpha);
    r.ops.insert({"jdelta_split", "delort_kernel"});
    r.values["jdelta"] = {{"delta", jd}, {"I_delta", js.i_delta}, {"J_delta", js.j_delta},
                          {"J_bound", js.j_bound}, {"V_2delta", js.v_2delta}};
    r.checks.push_back(make_check("|J_delta| <= J_bound", "Thm 4.1", std::abs(js.j_delta), js.j_bound));
  }
  r.values["vortices"] = s.size();
  r.values["steps"] = steps;
  r.values["one_signed"] = one_signed;
  r.tables.push_back(std::move(t));

  if (!cfg.out_dir.empty()) {
    const auto dir = cfg.out_dir / "snapshots";
    std::filesystem::create_directories(dir);
    for (const auto& [index, mu] : snaps) {
      std::ostringstream name;
      name << "snap_" << std::setw(6) << std::setfill('0') << index << ".atoms";
      io::write_atoms(dir / name.str(), mu);
    }
  }
}

void run_dmj(const RunConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  if (str(p, "profile", "bump") != "bump") throw ConfigError("params.profile", "must be \"bump\"");
  const auto eps = p.contains("eps_list") ? p.at("eps_list").get<std::vector<double>>()
                                          : std::vector<double>{1.0 / 16, 1.0 / 64, 1.0 / 256};
  if (eps.empty()) throw ConfigError("params.eps_list", "must not be empty");
  const int n = static_cast<int>(integer(p, "n", 512));
  const double half = num(p, "half", 1.0), mask_r = num(p, "mask_radius", 0.25), horizon = num(p, "horizon", 1.0);
  const auto phi = TestFunction2D::plateau(num(p, "r_in", 0.5), num(p, "r_out", 0.9));
  const auto profile = RadialProfile::bump();

  const auto rows = concentration_check(profile, phi, eps, n, half);
  r.ops.insert({"dmj_family", "concentration_check"});
  Table t{"concentration", {"eps", "i11", "i22", "i12", "target", "rel_err"}, {}};
  for (const auto& row : rows) {
    t.rows.push_back({row.eps, row.i11, row.i22, row.i12, row.target, row.rel_err});
    r.checks.push_back(make_check("off-diagonal at eps=" + std::to_string(row.eps), "concentration", std::abs(row.i12),
                                  0.05 * std::abs(row.i11), false));
  }
  r.checks.push_back(make_check("diagonal limit at the smallest eps", "concentration", rows.back().rel_err, 0.1, false));
  r.tables.push_back(std::move(t));
  r.values["gamma_inf"] = profile.gamma_inf();

  std::vector<VectorGrid2D> seq;
  for (double e : eps) seq.push_back(sample_velocity(dmj_family(profile, e), n, half));
  VectorGrid2D zero{GridField(seq.front().u.domain(), seq.front().u.shape()),
                    GridField(seq.front().u.domain(), seq.front().u.shape())};
  std::vector<char> mask(zero.u.cell_count());
  for (std::size_t c = 0; c < mask.size(); ++c) {
    const auto x = zero.u.center(c);
    mask[c] = std::hypot(x[0], x[1]) >= mask_r ? 1 : 0;
  }
  r.values["reduced_defect"] = reduced_defect(seq, zero, mask);
  r.ops.insert("reduced_defect");

  const DivFreeTest2D test{0.1 * half, 0.05 * half, 0.5 * half, horizon};
  std::vector<VelocitySnapshot> snaps;
  const int m = 8;
  for (int k = 0; k <= m; ++k) snaps.push_back({horizon * k / m, seq.front()});
  const auto wr = weak_residual(snaps, test);
  r.ops.insert("weak_residual");
  r.values["weak_residual"] = {{"eps", eps.front()}, {"residual", wr.residual}, {"scale", wr.scale}};
  r.checks.push_back(make_check("steady vortex weak residual", "weak formulation", std::abs(wr.residual),
                                1e-3 * wr.scale + 1e-300, false));
}

void run_sim3d(const RunConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  const GridField w = load_field(cfg, {"tube", 3, 48, -0.5, 0.5, 3.0, 3});
  const AlignmentParams ap{num(p, "delta", 0.1), num(p, "theta_max", 0.5), num(p, "k0", 1.0)};
  const double h_full = coulomb_energy(w);
  const double h0 = num(p, "h0", h_full);
  const auto chain = thm42_chain(w, ap, h0);
  const auto part = partition_delta(w, ap.delta);
  const auto spec = hsi_fourier(w, ap.delta);
  const auto align = alignment_measure(w, ap.delta, ap.k0);
  const auto [w_minus, w_plus] = split_height(w, ap.k0);
  r.ops.insert({"coulomb_energy", "partition_delta", "hsi_fourier", "alignment_measure", "split_height", "thm42_chain"});

  r.values["H"] = h_full;
  r.values["H0"] = h0;
  r.values["partition"] = {{"delta", part.delta}, {"H_si", part.h_si}, {"H_ie", part.h_ie}};
  r.values["spectral"] = {{"H_si", spec.h_si}, {"max_eta_ratio", spec.max_eta_ratio}};
  r.values["alignment"] = {{"theta_measured", align.theta}, {"pairs", align.pairs}, {"violations", align.violations}};
  r.values["mass_minus"] = w_minus.total_mass();
  r.values["mass_plus"] = w_plus.total_mass();
  r.values["chain"] = {{"applicable", chain.applicable}, {"theta", chain.theta}, {"r0", chain.r0},
                       {"const_k0", chain.const_k0}, {"diameter", chain.diameter}, {"balls", chain.balls.size()},
                       {"collection_sum", chain.collection_sum}, {"lower_bound", chain.lower_bound},
                       {"final_rhs", chain.final_rhs}, {"v_lattice_sq", chain.v_lattice_sq},
                       {"constancy_defect", chain.constancy_defect}};
  if (chain.r0 < ap.delta / 4) r.values["chain"]["note"] = "ball radii capped at min(delta/4, R0)";
  if (chain.balls.empty()) {
    r.values["chain"]["note"] = "no admissible balls: grid spacing exceeds the radius cap";
    logger()->warn("sim3d: no admissible balls; refine the grid below min(delta/4, R0)");
  }
  json links = json::array();
  for (const auto& l : chain.links) {
    links.push_back({{"name", l.name}, {"lhs", l.lhs}, {"rhs", l.rhs}, {"slack", l.rhs - l.lhs}});
    r.checks.push_back(make_check(l.name, "Thm 4.2", l.lhs, l.rhs, chain.applicable));
  }
  r.values["links"] = links;
  r.checks.push_back(make_check("alignment within theta_max", "Assumption 4.1", chain.theta_measured, ap.theta, false));
  r.checks.push_back(make_check("spectral kernel bound", "Eq. 4.34", spec.max_eta_ratio, 1.0));
  r.checks.push_back(make_check("spectral vs spatial near energy", "Eq. 4.34", std::abs(spec.h_si - part.h_si),
                                0.03 * std::abs(part.h_si) + 1e-300, false));

  const double h = w.spacing(0);
  if (2 * h < kDefaultR0) {
    AtomicMeasure mu(w.domain());
    std::vector<Point> support;
    for (std::size_t c = 0; c < w_plus.cell_count(); ++c)
      if (w_plus.magnitude(c) > 0) {
        mu.add(w.center(c), w_plus.magnitude(c) * w.cell_volume());
        support.push_back(w.center(c));
      }
    if (!support.empty()) {
      const auto mv = morrey_vs_v_check(mu, support, 2 * h);
      r.ops.insert({"morrey_vs_v_check", "packing_measure_estimate", "morrey_norm", "vnorm_lattice"});
      r.values["morrey_vs_v"] = {{"v_sq", mv.v_sq}, {"morrey", mv.morrey}, {"packing", mv.packing},
                                 {"rhs", mv.rhs}, {"applicable", mv.applicable}};
      r.checks.push_back(make_check("V^{6/5,2} vs packing times Morrey", "Eq. 3.23", mv.v_sq, mv.rhs, mv.applicable));
    }
  }
}

void run_report(const RunConfig&, Report& r) {
  r.ops.insert("theorem_matrix");
  json rows = json::array();
  for (const auto& row : theorem_matrix())
    rows.push_back({{"anchor", row.anchor}, {"module", row.module}, {"op", row.op},
                    {"command", to_string(row.command)}, {"test", row.test}});
  r.values["theorem_matrix"] = rows;
}

}  // namespace

// ------------------------------------------------------------------ config

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& [c, n] : kCommandNames)
    if (name == n) return c;
  return std::nullopt;
}

std::string to_string(Command c) {
  for (const auto& [k, n] : kCommandNames)
    if (k == c) return n;
  return "?";
}

const std::vector<Command>& all_commands() {
  static const std::vector<Command> all = [] {
    std::vector<Command> v;
    for (const auto& [c, n] : kCommandNames) v.push_back(c);
    return v;
  }();
  return all;
}

const std::vector<ParamSpec>& param_schema(Command c) {
  using T = ParamType;
  static const std::map<Command, std::vector<ParamSpec>> schemas{
      {Command::norm,
       {{"space", T::string, "v, morrey, lorentz or haar"},
        {"method", T::string, "lattice, greedy or brute (space v)"},
        {"p", T::number, "integrability exponent"},
        {"q", T::extended, "summation exponent"},
        {"alpha", T::number, "logarithmic exponent"},
        {"r0", T::number, "largest admissible radius"},
        {"seeds", T::integer, "candidate balls per radius"},
        {"radii", T::integer, "number of candidate radii"},
        {"max_level", T::integer, "finest lattice level"},
        {"level", T::integer, "cube level for the Haar projection"},
        {"mollify", T::number, "mollification radius applied first"},
        kFieldParam}},
      {Command::ladder,
       {{"p", T::number, "integrability exponent"},
        {"alpha", T::number, "logarithmic exponent"},
        {"r0", T::number, "largest admissible radius"},
        {"max_level", T::integer, "finest lattice level"},
        kFieldParam}},
      {Command::embed,
       {{"p", T::number, "integrability exponent"},
        {"q", T::extended, "summation exponent"},
        {"alpha", T::number, "logarithmic exponent"},
        {"s", T::number, "target smoothness"},
        {"eta", T::extended, "target secondary index"},
        {"dim", T::integer, "spatial dimension"}}},
      {Command::wavelet,
       {{"levels", T::integer, "detail levels, -1 for all"},
        {"p", T::number, "exponent of the decay bound"},
        {"alpha", T::number, "logarithmic exponent of the decay bound"},
        {"k_from", T::integer, "first level used in slope fits"},
        {"s", T::number, "Besov smoothness"},
        {"r", T::extended, "Besov integrability"},
        {"eta", T::extended, "Besov secondary index"},
        kFieldParam}},
      {Command::sim2d,
       {{"dt", T::number, "time step"},
        {"t_end", T::number, "final time"},
        {"stride", T::integer, "steps between recorded snapshots"},
        {"delta", T::number, "blob radius"},
        {"half", T::number, "half-width of the square domain"},
        {"partition_level", T::integer, "dyadic level of the energy partition"},
        {"alpha", T::number, "logarithmic exponent of the V estimate"},
        {"r0", T::number, "largest admissible radius"},
        {"jdelta", T::number, "scale of the near/far kernel split, 0 to skip"},
        {"vortices", T::number_list, "flat x, y, circulation triples"},
        {"random", T::integer, "number of random one-signed vortices"}}},
      {Command::dmj,
       {{"eps_list", T::number_list, "decreasing concentration scales"},
        {"profile", T::string, "radial vorticity profile (bump)"},
        {"n", T::integer, "cells per axis"},
        {"half", T::number, "half-width of the square domain"},
        {"r_in", T::number, "plateau radius of the test function"},
        {"r_out", T::number, "support radius of the test function"},
        {"mask_radius", T::number, "inner radius of the defect mask"},
        {"horizon", T::number, "time horizon of the weak-form test"}}},
      {Command::sim3d,
       {{"delta", T::number, "partition and alignment scale"},
        {"k0", T::number, "height threshold"},
        {"theta_max", T::number, "assumed alignment defect"},
        {"h0", T::number, "initial energy bound (defaults to H)"},
        kFieldParam}},
      {Command::report, {}},
  };
  return schemas.at(c);
}

RunConfig RunConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "document must be a JSON object");
  static const std::vector<ParamSpec> top{{"command", ParamType::string, ""}, {"input", ParamType::string, ""},
                                          {"atoms", ParamType::string, ""},   {"out", ParamType::string, ""},
                                          {"seed", ParamType::integer, ""},   {"threads", ParamType::integer, ""},
                                          {"params", ParamType::object, ""}};
  for (const auto& [key, v] : doc.items()) {
    const auto it = std::find_if(top.begin(), top.end(), [&](const ParamSpec& s) { return s.key == key; });
    if (it == top.end()) throw ConfigError(key, "is not a recognised top-level key");
    if (!type_ok(v, it->type)) throw ConfigError(key, std::string("must be ") + type_name(it->type));
  }
  if (!doc.contains("command")) throw ConfigError("command", "is required");
  RunConfig cfg;
  const auto cmd = parse_command(doc.at("command").get<std::string>());
  if (!cmd) throw ConfigError("command", "must be one of norm, ladder, embed, wavelet, sim2d, dmj, sim3d, report");
  cfg.command = *cmd;
  if (doc.contains("input")) cfg.input = doc.at("input").get<std::string>();
  if (doc.contains("atoms")) cfg.atoms = doc.at("atoms").get<std::string>();
  if (doc.contains("out")) cfg.out_dir = doc.at("out").get<std::string>();
  if (doc.contains("seed")) {
    if (doc.at("seed").get<long long>() < 0) throw ConfigError("seed", "must be nonnegative");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("threads")) cfg.threads = doc.at("threads").get<int>();
  if (doc.contains("params")) cfg.params = doc.at("params");
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("is not valid JSON: ") + e.what());
  }
  return from_json(doc);
}

void RunConfig::validate() const {
  if (!params.is_object()) throw ConfigError("params", "must be an object");
  validate_object(params, param_schema(command), "params.", "for command " + to_string(command));
  if (!input.empty() && !std::filesystem::exists(input)) throw ConfigError("input", "refers to a missing file " + input.string());
  if (!atoms.empty() && !std::filesystem::exists(atoms)) throw ConfigError("atoms", "refers to a missing file " + atoms.string());
  if (threads < 0) throw ConfigError("threads", "must be nonnegative");
}

// ------------------------------------------------------------------ report

bool Check::pass() const {
  if (std::isnan(lhs) || std::isnan(rhs)) return false;
  return lhs <= rhs + rel_tol * (std::abs(lhs) + std::abs(rhs)) + 1e-300;
}

void Table::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n' << std::setprecision(17);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

bool Report::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return !c.asserted || c.pass(); });
}

const Table* Report::table(std::string_view name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

json Report::to_json(bool with_timestamp) const {
  json meta{{"version", kVersion}, {"command", command}, {"seed", seed}};
  if (with_timestamp) meta["timestamp"] = timestamp;
  json cs = json::array();
  for (const auto& c : checks)
    cs.push_back({{"name", c.name}, {"anchor", c.anchor}, {"lhs", c.lhs}, {"rhs", c.rhs},
                  {"asserted", c.asserted}, {"pass", c.pass()}});
  json ts = json::object();
  for (const auto& t : tables) ts[t.name] = {{"columns", t.columns}, {"rows", t.rows}};
  return sanitize(json{{"metadata", meta}, {"values", values}, {"checks", cs}, {"tables", ts},
                       {"ops", ops}, {"ok", ok()}});
}

Report run(const RunConfig& config) {
  config.validate();
  if (config.threads > 0) omp_set_num_threads(config.threads);
  Report r;
  r.command = to_string(config.command);
  r.seed = config.seed;
  r.timestamp = utc_timestamp();
  r.ops.insert("run");
  logger()->info("running {} (seed {})", r.command, r.seed);

  switch (config.command) {
    case Command::norm: run_norm(config, r); break;
    case Command::ladder: run_ladder(config, r); break;
    case Command::embed: run_embed(config, r); break;
    case Command::wavelet: run_wavelet(config, r); break;
    case Command::sim2d: run_sim2d(config, r); break;
    case Command::dmj: run_dmj(config, r); break;
    case Command::sim3d: run_sim3d(config, r); break;
    case Command::report: run_report(config, r); break;
  }
  for (const auto& c : r.checks) {
    if (!c.pass()) (c.asserted ? logger()->error("check failed: {} ({} > {})", c.name, c.lhs, c.rhs)
                               : logger()->warn("flag: {} ({} > {})", c.name, c.lhs, c.rhs));
    else logger()->debug("check passed: {}", c.name);
  }

  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    std::ofstream(config.out_dir / "report.json") << r.to_json().dump(2) << '\n';
    for (const auto& t : r.tables) t.write_csv(config.out_dir / (t.name + ".csv"));
    if (config.command == Command::report) std::ofstream(config.out_dir / "theorem_matrix.txt") << theorem_matrix_text();
    logger()->info("wrote artifacts to {}", config.out_dir.string());
  }
  return r;
}

// ---------------------------------------------------------- theorem matrix

const std::vector<MatrixRow>& theorem_matrix() {
  using C = Command;
  static const std::vector<MatrixRow> rows{
      {"Def. 2.1 (ball masses)", "field-model", "ball_mass", C::norm, "test_field"},
      {"Eq. 2.4 (lattice cells)", "field-model", "cell_masses", C::ladder, "test_field"},
      {"Sec. 4.1 (mollified data)", "field-model", "mollify", C::norm, "test_field"},
      {"Sec. 2 (decreasing rearrangement)", "rearrangement-norms", "rearrange", C::norm, "test_rearrangement"},
      {"Lemma 2.2 (primitive F)", "rearrangement-norms", "maximal_F", C::norm, "test_rearrangement"},
      {"Sec. 2 (maximal function f**)", "rearrangement-norms", "f_star_star", C::norm, "test_rearrangement"},
      {"Eq. 2.6 (Lorentz-Zygmund)", "rearrangement-norms", "lorentz_zygmund_norm", C::norm, "test_rearrangement"},
      {"Eq. 2.2 (vector of averages)", "packing-norms", "v_eval", C::norm, "test_packing"},
      {"Eq. 2.4 (lattice estimate)", "packing-norms", "vnorm_lattice", C::norm, "test_packing"},
      {"Def. 2.1 (sup over collections)", "packing-norms", "vnorm_greedy", C::norm, "test_packing"},
      {"Def. 2.1 (exhaustive sup)", "packing-norms", "vnorm_bruteforce", C::norm, "test_packing"},
      {"Eq. 2.1 (Morrey)", "packing-norms", "morrey_norm", C::norm, "test_packing"},
      {"Haar projection identity", "packing-norms", "haar_projection_lp", C::norm, "test_packing"},
      {"Cor. 3.1 (packing measure)", "packing-norms", "packing_measure_estimate", C::sim3d, "test_packing"},
      {"Eq. 2.14 (ladder)", "packing-norms", "ladder_report", C::ladder, "test_packing"},
      {"Sec. 3 (wavelet expansion)", "wavelet-sobolev", "haar_decompose", C::wavelet, "test_wavelet"},
      {"Sec. 3 (level energies)", "wavelet-sobolev", "level_energy", C::wavelet, "test_wavelet"},
      {"Eq. 3.16 (level decay)", "wavelet-sobolev", "decay_check", C::wavelet, "test_wavelet"},
      {"Sec. 3 (H^-1 orthogonality)", "wavelet-sobolev", "hneg1_upper", C::wavelet, "test_wavelet"},
      {"Thm 3.1 (H^-1 precompactness)", "wavelet-sobolev", "hneg1_fourier", C::wavelet, "test_wavelet"},
      {"Sec. 3 (uniform high-frequency decay)", "wavelet-sobolev", "tail_hneg1", C::wavelet, "test_wavelet"},
      {"Thm 3.2 (Besov scale)", "wavelet-sobolev", "besov_norm", C::wavelet, "test_wavelet"},
      {"Eq. 3.18-3.22 (imbeddings)", "wavelet-sobolev", "embedding_verdict", C::embed, "test_wavelet"},
      {"Sec. 4.1 (Biot-Savart law)", "euler2d", "biot_savart", C::sim2d, "test_euler2d"},
      {"Eq. 4.27 (vorticity transport)", "euler2d", "step", C::sim2d, "test_euler2d"},
      {"Sec. 4.1 (pseudo-energy)", "euler2d", "pseudo_energy", C::sim2d, "test_euler2d"},
      {"Lemma 4.1 (moments)", "euler2d", "moments", C::sim2d, "test_euler2d"},
      {"Lemma 4.1 (H_si / H_ie split)", "euler2d", "energy_partition", C::sim2d, "test_euler2d"},
      {"Lemma 4.1 / Eq. 4.28", "euler2d", "lemma41_check", C::sim2d, "test_euler2d"},
      {"Sec. 4.1 (dilation family)", "euler2d", "dmj_family", C::dmj, "test_euler2d"},
      {"Sec. 4.1 (u_i u_j concentration)", "euler2d", "concentration_check", C::dmj, "test_euler2d"},
      {"Eq. 4.26 (reduced defect)", "euler2d", "reduced_defect", C::dmj, "test_euler2d"},
      {"Thm 4.1 (kernel H_phi)", "euler2d", "delort_kernel", C::sim2d, "test_euler2d"},
      {"Thm 4.1 (I_delta / J_delta split)", "euler2d", "jdelta_split", C::sim2d, "test_euler2d"},
      {"Eq. 4.25 (weak form)", "euler2d", "weak_residual", C::dmj, "test_euler2d"},
      {"Sec. 4.2 (Coulomb energy)", "euler3d", "coulomb_energy", C::sim3d, "test_euler3d"},
      {"Thm 4.2 (partition at delta)", "euler3d", "partition_delta", C::sim3d, "test_euler3d"},
      {"Eq. 4.34 (spectral near energy)", "euler3d", "hsi_fourier", C::sim3d, "test_euler3d"},
      {"Assumption 4.1 / Eq. 4.31", "euler3d", "alignment_measure", C::sim3d, "test_euler3d"},
      {"Thm 4.2 (height split)", "euler3d", "split_height", C::sim3d, "test_euler3d"},
      {"Thm 4.2 (bound chain)", "euler3d", "thm42_chain", C::sim3d, "test_euler3d"},
      {"Eq. 3.23 / Cor. 3.1", "euler3d", "morrey_vs_v_check", C::sim3d, "test_euler3d"},
      {"orchestration", "cli", "run", C::report, "test_cli"},
      {"coverage matrix", "cli", "theorem_matrix", C::report, "test_cli"},
  };
  return rows;
}

std::string theorem_matrix_text() {
  std::size_t w0 = 6, w1 = 6, w2 = 2, w3 = 7;
  for (const auto& r : theorem_matrix()) {
    w0 = std::max(w0, r.anchor.size());
    w1 = std::max(w1, r.module.size());
    w2 = std::max(w2, r.op.size());
    w3 = std::max(w3, to_string(r.command).size());
  }
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(w0) + 2) << "anchor" << std::setw(static_cast<int>(w1) + 2) << "module"
     << std::setw(static_cast<int>(w2) + 2) << "op" << std::setw(static_cast<int>(w3) + 2) << "command" << "test\n";
  for (const auto& r : theorem_matrix())
    os << std::setw(static_cast<int>(w0) + 2) << r.anchor << std::setw(static_cast<int>(w1) + 2) << r.module
       << std::setw(static_cast<int>(w2) + 2) << r.op << std::setw(static_cast<int>(w3) + 2) << to_string(r.command)
       << r.test << '\n';
  return os.str();
}

void init_logging() {
  const char* env = std::getenv("REGLADDER_LOG");
  if (!env) return;
  const auto level = spdlog::level::from_str(env);
  logger()->set_level(level);
}

}  // namespace regladder::cli
