#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "regladder/cli.hpp"
#include "regladder/error.hpp"
#include "regladder/field.hpp"
#include "regladder/io.hpp"
#include "regladder/rearrangement.hpp"

using namespace regladder;
using namespace regladder::cli;
using nlohmann::json;

namespace {

RunConfig config(const json& doc) { return RunConfig::from_json(doc); }

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("regladder_cli_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

int exit_code(const std::string& args) {
  const std::string cmd = std::string(REGLADDER_EXE) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const json kRandom2D{{"kind", "random"}, {"dim", 2}, {"n", 8}};

}  // namespace

TEST_CASE("ladder on the constant field passes every check") {
  const auto r = run(config({{"command", "ladder"}, {"params", {{"p", 2}, {"field", {{"kind", "constant"}, {"dim", 2}, {"n", 16}}}}}}));
  CHECK(r.ok());
  REQUIRE_FALSE(r.checks.empty());
  for (const auto& c : r.checks) {
    INFO(c.name);
    CHECK(c.asserted);
    CHECK(c.pass());
    CHECK(c.anchor == "Eq. 2.14");
  }
}

TEST_CASE("zero field gives an all-zero passing report") {
  const json zero{{"kind", "zero"}, {"dim", 2}, {"n", 8}};
  for (const char* space : {"v", "morrey", "lorentz", "haar"}) {
    const auto r = run(config({{"command", "norm"}, {"params", {{"space", space}, {"field", zero}}}}));
    INFO(space);
    CHECK(r.ok());
    CHECK(r.values["value"].get<double>() == 0.0);
  }
  const auto w = run(config({{"command", "wavelet"}, {"params", {{"field", {{"kind", "zero"}, {"dim", 2}, {"n", 16}}}}}}));
  CHECK(w.ok());
  CHECK(w.values["hneg1_upper"].get<double>() == 0.0);
  for (const auto& row : w.table("levels")->rows) CHECK(row[1] == 0.0);
  CHECK(run(config({{"command", "ladder"}, {"params", {{"field", zero}}}})).ok());
}

TEST_CASE("schema violations name the offending key") {
  auto key_of = [](const json& doc) -> std::string {
    try {
      RunConfig::from_json(doc);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return "";
  };
  CHECK(key_of({{"command", "norm"}, {"params", {{"pp", 1}}}}) == "params.pp");
  CHECK(key_of({{"command", "norm"}, {"params", {{"p", "two"}}}}) == "params.p");
  CHECK(key_of({{"command", "norm"}, {"params", {{"field", {{"knd", "zero"}}}}}}) == "params.field.knd");
  CHECK(key_of({{"command", "embed"}, {"params", {{"eta", "infinite"}}}}) == "params.eta");
  CHECK(key_of({{"command", "embed"}, {"params", {{"eta", "inf"}}}}).empty());
  CHECK(key_of({{"command", "fly"}}) == "command");
  CHECK(key_of({{"params", json::object()}}) == "command");
  CHECK(key_of({{"command", "norm"}, {"verbose", true}}) == "verbose");
  CHECK(key_of({{"command", "norm"}, {"seed", -3}}) == "seed");
  CHECK(key_of({{"command", "wavelet"}, {"input", "/nonexistent/field.bin"}}) == "input");
  CHECK(key_of({{"command", "sim2d"}, {"params", {{"vortices", {1, "a"}}}}}) == "params.vortices");
  CHECK(key_of(json::array()) == "");
  CHECK_THROWS_AS(run(config({{"command", "norm"}, {"params", {{"space", "sobolev"}}}})), ConfigError);
}

TEST_CASE("module preconditions surface with the operation name") {
  try {
    run(config({{"command", "norm"}, {"params", {{"p", 0.5}, {"field", kRandom2D}}}}));
    FAIL("expected a precondition failure");
  } catch (const PreconditionError& e) {
    CHECK(e.op() == "NormParams");
  }
  CHECK_THROWS_AS(run(config({{"command", "wavelet"}, {"params", {{"field", {{"kind", "constant"}, {"n", 12}}}}}})),
                  PreconditionError);
}

TEST_CASE("identical config and seed give byte-identical reports") {
  const json doc{{"command", "norm"}, {"seed", 7}, {"params", {{"method", "greedy"}, {"field", kRandom2D}}}};
  const auto a = run(config(doc)).to_json(false).dump();
  const auto b = run(config(doc)).to_json(false).dump();
  CHECK(a == b);
  json other = doc;
  other["seed"] = 8;
  CHECK(run(config(other)).to_json(false).dump() != a);
  const auto with_ts = run(config(doc)).to_json(true);
  CHECK(with_ts["metadata"].contains("timestamp"));
  CHECK_FALSE(run(config(doc)).to_json(false)["metadata"].contains("timestamp"));
}

TEST_CASE("pass is derived from lhs and rhs") {
  Report r;
  Check ok{"a", "x", 1.0, 2.0};
  Check bad{"b", "x", 3.0, 2.0};
  r.checks = {ok};
  CHECK(r.ok());
  bad.asserted = false;
  r.checks.push_back(bad);
  CHECK(r.ok());
  r.checks.back().asserted = true;
  CHECK_FALSE(r.ok());
  CHECK_FALSE(Check{"n", "x", std::nan(""), 1.0}.pass());
  const auto j = r.to_json();
  CHECK(j["checks"][1]["pass"] == false);
  CHECK(j["ok"] == false);
}

TEST_CASE("non-finite values serialise as strings") {
  Report r;
  r.values["big"] = kInf;
  r.checks.push_back(Check{"inf", "x", 1.0, kInf});
  const auto j = r.to_json();
  CHECK(j["values"]["big"] == "inf");
  CHECK(j["checks"][0]["rhs"] == "inf");
}

TEST_CASE("embedding verdicts through the runner") {
  const auto r = run(config({{"command", "embed"},
                             {"params", {{"p", 1}, {"q", 2}, {"alpha", 0.5}, {"s", -1}, {"eta", 2}, {"dim", 2}}}}));
  CHECK(r.values["verdict"] == "borderline");
  CHECK(r.values["label"] == "X_2");
  const auto c = run(config({{"command", "embed"},
                             {"params", {{"p", 1.3}, {"q", 2}, {"alpha", 0}, {"s", -1}, {"eta", "inf"}, {"dim", 3}}}}));
  CHECK(c.values["verdict"] == "compact");
}

TEST_CASE("co-rotating pair run records a time series") {
  const auto r = run(config({{"command", "sim2d"}, {"params", {{"t_end", 0.1}, {"dt", 0.001}, {"stride", 20}}}}));
  CHECK(r.ok());
  const auto* t = r.table("series");
  REQUIRE(t != nullptr);
  CHECK(t->rows.size() == 6);
  CHECK(t->rows.back()[0] == doctest::Approx(0.1));
  for (const auto& row : t->rows) CHECK(row[1] == doctest::Approx(t->rows.front()[1]).epsilon(1e-8));
}

TEST_CASE("theorem matrix") {
  const auto& m = theorem_matrix();
  CHECK(m.size() >= 30);
  auto has_anchor = [&](const std::string& s) {
    return std::any_of(m.begin(), m.end(), [&](const MatrixRow& r) { return r.anchor.find(s) != std::string::npos; });
  };
  CHECK(has_anchor("Eq. 3.16"));
  CHECK(has_anchor("Lemma 4.1"));
  CHECK(has_anchor("Thm 4.2"));
  CHECK(theorem_matrix_text() == theorem_matrix_text());
  CHECK(theorem_matrix_text().find("decay_check") != std::string::npos);

  const std::vector<std::string> ops{
      "ball_mass", "cell_masses", "mollify", "rearrange", "maximal_F", "f_star_star", "lorentz_zygmund_norm",
      "v_eval", "vnorm_lattice", "vnorm_greedy", "vnorm_bruteforce", "morrey_norm", "haar_projection_lp",
      "packing_measure_estimate", "ladder_report", "haar_decompose", "level_energy", "decay_check", "hneg1_upper",
      "hneg1_fourier", "tail_hneg1", "besov_norm", "embedding_verdict", "biot_savart", "step", "pseudo_energy",
      "moments", "energy_partition", "lemma41_check", "dmj_family", "concentration_check", "reduced_defect",
      "delort_kernel", "jdelta_split", "weak_residual", "coulomb_energy", "partition_delta", "hsi_fourier",
      "alignment_measure", "split_height", "thm42_chain", "morrey_vs_v_check", "run", "theorem_matrix"};
  std::set<std::string> listed;
  for (const auto& r : m) listed.insert(r.op);
  for (const auto& op : ops) {
    INFO(op);
    CHECK(listed.count(op) == 1);
  }
}

TEST_CASE("every operation in the matrix is reached by its command") {
  const std::vector<json> docs{
      {{"command", "norm"}, {"params", {{"field", kRandom2D}}}},
      {{"command", "norm"}, {"params", {{"method", "greedy"}, {"mollify", 0.3}, {"field", kRandom2D}}}},
      {{"command", "norm"}, {"params", {{"method", "brute"}, {"field", kRandom2D}}}},
      {{"command", "norm"}, {"params", {{"space", "morrey"}, {"field", kRandom2D}}}},
      {{"command", "norm"}, {"params", {{"space", "lorentz"}, {"field", kRandom2D}}}},
      {{"command", "norm"}, {"params", {{"space", "haar"}, {"field", kRandom2D}}}},
      {{"command", "ladder"}, {"params", {{"field", {{"kind", "constant"}, {"dim", 2}, {"n", 8}}}}}},
      {{"command", "embed"}},
      {{"command", "wavelet"}, {"params", {{"field", {{"kind", "blobs"}, {"dim", 2}, {"n", 32}}}}}},
      {{"command", "sim2d"}, {"params", {{"t_end", 0.01}, {"jdelta", 0.15}}}},
      {{"command", "dmj"}, {"params", {{"eps_list", {0.125, 0.0625}}, {"n", 64}}}},
      {{"command", "sim3d"},
       {"params", {{"delta", 0.2}, {"field", {{"kind", "tube"}, {"dim", 3}, {"n", 24}, {"lo", -0.5}, {"hi", 0.5}, {"value", 3.0}}}}}},
      {{"command", "report"}},
  };
  std::map<Command, std::set<std::string>> reached;
  for (const auto& d : docs) {
    const auto cfg = config(d);
    const auto r = run(cfg);
    INFO(d.dump());
    CHECK(r.ok());
    reached[cfg.command].insert(r.ops.begin(), r.ops.end());
  }
  for (const auto& row : theorem_matrix()) {
    INFO(row.op, " via ", to_string(row.command));
    CHECK(reached[row.command].count(row.op) == 1);
  }
}

TEST_CASE("artifacts are written to the output directory") {
  const auto dir = scratch("artifacts");
  json doc{{"command", "wavelet"}, {"out", dir.string()},
           {"params", {{"field", {{"kind", "blobs"}, {"dim", 2}, {"n", 16}}}}}};
  run(config(doc));
  CHECK(std::filesystem::exists(dir / "report.json"));
  std::ifstream csv(dir / "levels.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "k,energy,bound,ratio");
  const auto report = json::parse(std::ifstream(dir / "report.json"));
  CHECK(report["metadata"]["command"] == "wavelet");

  const auto sim = scratch("sim2d");
  run(config({{"command", "sim2d"}, {"out", sim.string()}, {"params", {{"t_end", 0.01}, {"stride", 5}}}}));
  CHECK(std::filesystem::exists(sim / "series.csv"));
  const auto snap = sim / "snapshots" / "snap_000005.atoms";
  REQUIRE(std::filesystem::exists(snap));
  CHECK(io::read_atoms(snap, Domain::cube(2, -1, 1)).size() == 2);

  const auto rep = scratch("report");
  run(config({{"command", "report"}, {"out", rep.string()}}));
  CHECK(std::filesystem::exists(rep / "theorem_matrix.txt"));
}

TEST_CASE("grid input files are read") {
  const auto dir = scratch("input");
  std::filesystem::create_directories(dir);
  const auto f = GridField::sample(Domain::cube(2, 0, 1), {16, 16, 1}, [](const Point& x) { return x[0] + x[1]; });
  io::write_grid(dir / "f.bin", f);
  const auto r = run(config({{"command", "wavelet"}, {"input", (dir / "f.bin").string()}}));
  CHECK(r.ok());
  CHECK_THROWS_AS(run(config({{"command", "sim3d"}, {"input", (dir / "f.bin").string()}})), ConfigError);
}

TEST_CASE("executable exit codes") {
  CHECK(exit_code("embed --p 1 --q 2 --alpha 0.5 --s -1 --eta 2 --dim 2") == 0);
  CHECK(exit_code("--theorem-matrix") == 0);
  CHECK(exit_code("norm --bogus 1") == 2);
  CHECK(exit_code("norm --p abc") == 2);
  CHECK(exit_code("norm --p 0.5") == 2);
  CHECK(exit_code("") == 2);
  const auto dir = scratch("exe");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "bad.json") << R"({"command": "norm", "params": {"pp": 1}})";
  CHECK(exit_code("--config " + (dir / "bad.json").string()) == 2);
  std::ofstream(dir / "good.json") << R"({"command": "ladder", "params": {"p": 2, "field": {"kind": "constant", "dim": 2, "n": 8}}})";
  CHECK(exit_code("--config " + (dir / "good.json").string() + " --out " + (dir / "out").string()) == 0);
  CHECK(std::filesystem::exists(dir / "out" / "report.json"));
  CHECK(exit_code("dmj --eps-list 0.125 0.0625 --n 64 --seed 3 --threads 1") == 0);
  CHECK(exit_code("sim3d --h0 1e-9 --delta 0.2 --field '{\"kind\":\"tube\",\"dim\":3,\"n\":24}'") == 1);
}
