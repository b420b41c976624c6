#include "regladder/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "regladder/error.hpp"

namespace regladder::io {

static_assert(std::endian::native == std::endian::little, "grid payload assumes a little-endian host");

void write_grid(std::ostream& out, const GridField& f) {
  const int d = f.dim();
  out << "regladder-grid 1\n";
  out << "dim " << d << "\n";
  out << "shape";
  for (int a = 0; a < d; ++a) out << ' ' << f.shape()[a];
  out << "\nbox";
  out.precision(17);
  for (int a = 0; a < d; ++a) out << ' ' << f.domain().lower[a] << ' ' << f.domain().upper[a];
  out << "\ncomponents " << f.components() << "\n";
  out << "dtype float64\nend\n";
  const auto v = f.values();
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  require(static_cast<bool>(out), "write_grid", "stream write failed");
}

void write_grid(const std::filesystem::path& path, const GridField& f) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "write_grid", "cannot open " + path.string());
  write_grid(out, f);
}

GridField read_grid(std::istream& in) {
  std::string line;
  std::getline(in, line);
  require(line == "regladder-grid 1", "read_grid", "missing 'regladder-grid 1' magic line");
  int dim = 0, components = 1;
  std::array<int, 3> shape{1, 1, 1};
  Point lo{}, hi{};
  bool have_shape = false, have_box = false;
  while (std::getline(in, line)) {
    if (line == "end") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "dim") {
      ls >> dim;
      require(dim >= 1 && dim <= 3, "read_grid", "dim must be 1, 2 or 3");
    } else if (key == "shape") {
      require(dim > 0, "read_grid", "'shape' before 'dim'");
      for (int a = 0; a < dim; ++a) ls >> shape[a];
      have_shape = static_cast<bool>(ls);
    } else if (key == "box") {
      require(dim > 0, "read_grid", "'box' before 'dim'");
      for (int a = 0; a < dim; ++a) ls >> lo[a] >> hi[a];
      have_box = static_cast<bool>(ls);
    } else if (key == "components") {
      ls >> components;
    } else if (key == "dtype") {
      std::string t;
      ls >> t;
      require(t == "float64", "read_grid", "unsupported dtype '" + t + "'");
    } else {
      throw PreconditionError("read_grid", "unknown header key '" + key + "'");
    }
  }
  require(line == "end", "read_grid", "header not terminated by 'end'");
  require(have_shape && have_box, "read_grid", "header lacks shape or box");
  GridField f(Domain(dim, lo, hi), shape, components);
  auto v = f.values();
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  require(in.gcount() == static_cast<std::streamsize>(v.size() * sizeof(double)), "read_grid",
          "payload shorter than shape implies");
  require(f.all_finite(), "read_grid", "payload contains non-finite values");
  return f;
}

GridField read_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "read_grid", "cannot open " + path.string());
  return read_grid(in);
}

void write_atoms(std::ostream& out, const AtomicMeasure& mu) {
  static const char* axes[] = {"x", "y", "z"};
  const int d = mu.dim();
  for (int a = 0; a < d; ++a) out << axes[a] << ',';
  out << (mu.components() == 3 ? "w,wy,wz" : "w");
  if (mu.blob_radius() > 0) out << ",delta";
  out << '\n';
  out.precision(17);
  for (const auto& atom : mu.atoms()) {
    for (int a = 0; a < d; ++a) out << atom.position[a] << ',';
    out << atom.weight[0];
    if (mu.components() == 3) out << ',' << atom.weight[1] << ',' << atom.weight[2];
    if (mu.blob_radius() > 0) out << ',' << mu.blob_radius();
    out << '\n';
  }
}

void write_atoms(const std::filesystem::path& path, const AtomicMeasure& mu) {
  std::ofstream out(path);
  require(static_cast<bool>(out), "write_atoms", "cannot open " + path.string());
  write_atoms(out, mu);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

AtomicMeasure read_atoms(std::istream& in, const Domain& domain) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "read_atoms", "empty atoms file");
  const auto header = split_csv(line);
  const int d = domain.dim;
  static const char* axes[] = {"x", "y", "z"};
  require(static_cast<int>(header.size()) > d, "read_atoms", "header has too few columns");
  for (int a = 0; a < d; ++a)
    require(header[a] == axes[a], "read_atoms", std::string("expected column '") + axes[a] + "'");
  require(header[d] == "w", "read_atoms", "expected weight column 'w'");
  std::size_t col = d + 1;
  int components = 1;
  if (header.size() >= col + 2 && header[col] == "wy" && header[col + 1] == "wz") {
    components = 3;
    col += 2;
  }
  const bool has_delta = header.size() > col && header[col] == "delta";
  require(header.size() == col + (has_delta ? 1 : 0), "read_atoms", "unexpected trailing columns");

  struct Row {
    Point x;
    std::array<double, 3> w;
    double delta;
  };
  std::vector<Row> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    require(cells.size() == header.size(), "read_atoms", "line " + std::to_string(lineno) + ": wrong column count");
    Row r{{0, 0, 0}, {0, 0, 0}, 0};
    try {
      for (int a = 0; a < d; ++a) r.x[a] = std::stod(cells[a]);
      for (int q = 0; q < components; ++q) r.w[q] = std::stod(cells[d + q]);
      if (has_delta) r.delta = std::stod(cells.back());
    } catch (const std::exception&) {
      throw PreconditionError("read_atoms", "line " + std::to_string(lineno) + ": not a number");
    }
    rows.push_back(r);
  }
  const double delta = rows.empty() ? 0.0 : rows.front().delta;
  for (const auto& r : rows)
    require(r.delta == delta, "read_atoms", "per-atom delta must be constant across the file");
  AtomicMeasure mu(domain, components, delta);
  for (const auto& r : rows) mu.add(r.x, r.w);
  return mu;
}

AtomicMeasure read_atoms(const std::filesystem::path& path, const Domain& domain) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "read_atoms", "cannot open " + path.string());
  return read_atoms(in, domain);
}

}  // namespace regladder::io
