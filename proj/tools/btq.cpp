// btq: command-line harness for the quantization experiments.
//
// Exit codes: 0 all assertions passed, 1 an assertion failed, 2 bad
// configuration or usage.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "btq/experiments.hpp"

namespace {

struct OutputOptions {
  std::string json_path = "results.json";
  std::string csv_path = "results.csv";
};

int write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return 1;
  }
  out << content;
  return 0;
}

void print_summary(const btq::ResultDoc& doc) {
  using std::cout;
  if (doc.experiment == "spectrum") {
    std::string line;
    for (const auto& row : doc.rows) {
      if (!line.empty()) line += ", ";
      for (const auto& [k, v] : row.extra)
        if (k == "exact") line += v;
    }
    cout << line << "\n";
  } else if (doc.experiment == "ktable" || doc.experiment == "c1-identity") {
    for (const auto& row : doc.rows) {
      cout << (row.value == 1.0 ? "PASS" : "FAIL");
      for (const auto& [k, v] : row.extra)
        if (k == "identity") cout << " " << v;
      if (doc.experiment == "c1-identity") cout << " pair " << row.p;
      cout << "\n";
    }
  } else {
    for (const auto& row : doc.rows) {
      cout << "p=" << row.p << " value=" << btq::detail::fmt17(row.value);
      for (const auto& [k, v] : row.extra) cout << " " << k << "=" << v;
      cout << "\n";
    }
    if (doc.has_fit)
      cout << "fit: value ~ " << btq::detail::fmt17(doc.fit.amplitude) << " * p^-"
           << btq::detail::fmt17(doc.fit.rate) << " (max log residual "
           << btq::detail::fmt17(doc.fit.residual) << ")\n";
  }
  for (const auto& n : doc.notes) cout << "note: " << n << "\n";
  cout << (doc.pass ? "PASS" : "FAIL") << "\n";
}

btq::RunConfig config_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw btq::ConfigError("cannot read config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw btq::ConfigError(std::string("bad config JSON: ") + e.what());
  }
  btq::RunConfig cfg;
  bool have_experiment = false;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "experiment") {
      cfg.id = btq::experiment_from_name(it.value().get<std::string>());
      have_experiment = true;
    } else if (key == "params") {
      if (!it.value().is_object()) throw btq::ConfigError("params must be an object");
      for (auto p = it.value().begin(); p != it.value().end(); ++p) {
        if (p.value().is_string())
          cfg.params[p.key()] = p.value().get<std::string>();
        else
          cfg.params[p.key()] = p.value().dump();
      }
    } else if (key == "oracle") {
      cfg.oracle = it.value().get<bool>();
    } else if (key == "threads") {
      cfg.threads = it.value().get<int>();
    } else {
      throw btq::ConfigError("unknown config key '" + key + "'");
    }
  }
  if (!have_experiment) throw btq::ConfigError("config is missing 'experiment'");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Berezin-Toeplitz quantization experiment harness"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  OutputOptions out;
  std::string config_path;
  bool oracle = false;
  int threads = 0;
  app.add_option("--config", config_path, "run from a JSON config file");
  app.add_option("--json", out.json_path, "results JSON path (default results.json)");
  app.add_option("--csv", out.csv_path, "results CSV path (default results.csv)");
  app.add_flag("--oracle", oracle, "re-run derived constants through their oracles");
  app.add_option("--threads", threads, "worker threads (BTQ_THREADS caps this)");

  // one subcommand per experiment; every value stays a string and is
  // validated by the experiment schema
  struct SubDef {
    CLI::App* sub = nullptr;
    std::map<std::string, std::string> values;
  };
  std::map<std::string, SubDef> subs;
  const std::map<std::string, std::vector<std::string>> flag_map{
      {"ktable", {"n", "weights"}},
      {"spectrum", {"n", "weights", "cutoff"}},
      {"c1-identity", {"n", "weights", "f", "g", "count", "seed"}},
      {"fock-verify", {"n", "weights", "B", "margin", "degree", "tol"}},
      {"sphere-norm", {"f", "p", "rate-min", "rate-max", "limit-tol"}},
      {"sphere-commutator", {"f", "g", "p", "rate-min", "bound-factor"}},
      {"sphere-product", {"f", "g", "p", "rate-min", "bound-factor"}},
      {"bergman-diag", {"p", "samples", "tol", "seed"}},
      {"orbifold-commutator", {"k", "f", "g", "p", "lift", "rate-min"}},
      {"orbifold-bergman", {"k", "p", "lift", "equator-tol", "cone-rel-tol"}},
  };
  for (const auto& [name, keys] : flag_map) {
    SubDef& def = subs[name];
    def.sub = app.add_subcommand(name, "run the " + name + " experiment");
    for (const auto& key : keys) def.sub->add_option("--" + key, def.values[key]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  btq::RunConfig cfg;
  try {
    if (!config_path.empty()) {
      if (!app.get_subcommands().empty())
        throw btq::ConfigError("--config cannot be combined with a subcommand");
      cfg = config_from_json(config_path);
    } else {
      auto chosen = app.get_subcommands();
      if (chosen.empty()) {
        std::cerr << app.help();
        return 2;
      }
      const std::string name = chosen[0]->get_name();
      cfg.id = btq::experiment_from_name(name);
      for (const auto& [key, value] : subs[name].values)
        if (!value.empty()) cfg.params[key] = value;
    }
    if (oracle) cfg.oracle = true;
    if (threads > 0) cfg.threads = threads;

    btq::ResultDoc doc = btq::run_experiment(cfg);
    if (write_file(out.json_path, btq::to_json(doc))) return 2;
    if (write_file(out.csv_path, btq::to_csv(doc))) return 2;
    print_summary(doc);
    return doc.pass ? 0 : 1;
  } catch (const btq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const btq::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
