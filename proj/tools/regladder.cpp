#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "regladder/cli.hpp"
#include "regladder/error.hpp"

using nlohmann::json;
using namespace regladder;

namespace {

struct SubOptions {
  cli::Command command;
  CLI::App* app = nullptr;
  std::map<std::string, std::vector<std::string>> raw;
  std::string input, atoms;
};

std::string flag_name(const std::string& key) {
  std::string s = key;
  for (auto& ch : s)
    if (ch == '_') ch = '-';
  return "--" + s;
}

double to_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw cli::ConfigError("params." + key, "expects a number, got '" + text + "'");
  return v;
}

json convert(const cli::ParamSpec& spec, const std::vector<std::string>& values) {
  const std::string& text = values.back();
  switch (spec.type) {
    case cli::ParamType::number: return to_number(spec.key, text);
    case cli::ParamType::integer: {
      const double v = to_number(spec.key, text);
      if (v != static_cast<double>(static_cast<long long>(v)))
        throw cli::ConfigError("params." + spec.key, "expects an integer, got '" + text + "'");
      return static_cast<long long>(v);
    }
    case cli::ParamType::string: return text;
    case cli::ParamType::extended:
      if (text == "inf" || text == "infinity") return "inf";
      return to_number(spec.key, text);
    case cli::ParamType::number_list: {
      json list = json::array();
      for (const auto& v : values) {
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ','))
          if (!item.empty()) list.push_back(to_number(spec.key, item));
      }
      return list;
    }
    case cli::ParamType::object:
      try {
        return json::parse(text);
      } catch (const json::parse_error&) {
        throw cli::ConfigError("params." + spec.key, "expects a JSON object");
      }
  }
  return nullptr;
}

}  // namespace

int main(int argc, char** argv) {
  cli::init_logging();
  CLI::App app{"Regularity-ladder norms, wavelet diagnostics and vorticity experiments"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool print_matrix = false;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the default)");
  app.add_option("--out", out_dir, "directory for report.json and CSV series");
  app.add_flag("--theorem-matrix", print_matrix, "print the coverage matrix and exit");

  std::vector<SubOptions> subs;
  subs.reserve(cli::all_commands().size());
  for (const auto command : cli::all_commands()) {
    auto& s = subs.emplace_back();
    s.command = command;
    s.app = app.add_subcommand(cli::to_string(command), "run the " + cli::to_string(command) + " command");
    if (command != cli::Command::embed && command != cli::Command::report)
      s.app->add_option("--input", s.input, "binary grid file");
    if (command == cli::Command::sim2d) s.app->add_option("--atoms", s.atoms, "atom CSV file");
    for (const auto& spec : cli::param_schema(command)) {
      auto* opt = s.app->add_option(flag_name(spec.key), s.raw[spec.key], spec.help);
      if (spec.type == cli::ParamType::number_list) opt->expected(1, -1);
      else opt->expected(1);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (print_matrix) {
    std::cout << cli::theorem_matrix_text();
    return 0;
  }

  try {
    json doc = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw cli::ConfigError("config", "cannot open " + config_path);
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw cli::ConfigError("config", std::string("is not valid JSON: ") + e.what());
      }
      if (!doc.is_object()) throw cli::ConfigError("config", "must hold a JSON object");
    }
    for (const auto& s : subs) {
      if (!s.app->parsed()) continue;
      doc["command"] = cli::to_string(s.command);
      if (!s.input.empty()) doc["input"] = s.input;
      if (!s.atoms.empty()) doc["atoms"] = s.atoms;
      if (!doc.contains("params")) doc["params"] = json::object();
      for (const auto& spec : cli::param_schema(s.command)) {
        const auto& values = s.raw.at(spec.key);
        if (!values.empty()) doc["params"][spec.key] = convert(spec, values);
      }
    }
    if (!doc.contains("command")) {
      std::cerr << app.help();
      return 2;
    }
    if (seed) doc["seed"] = *seed;
    if (threads) doc["threads"] = *threads;
    if (!out_dir.empty()) doc["out"] = out_dir;

    const auto config = cli::RunConfig::from_json(doc);
    const auto report = cli::run(config);
    std::cout << report.to_json().dump(2) << '\n';
    return report.ok() ? 0 : 1;
  } catch (const cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
