// Command line front end: run a scenario to a csv trace, audit its
// structural invariants, or sweep a step ladder. Exit codes: 0 success,
// 1 failed invariant audit, 2 bad configuration or usage, 3 numerical
// failure while evaluating.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfibre/scenario.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw qfibre::ConfigSyntaxError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw qfibre::ConfigValidationError("cannot write to " + path);
  return out;
}

int do_run(const std::string& config_path, std::string out_path) {
  const std::string text = slurp(config_path);
  const qfibre::Scenario sc = qfibre::build_scenario(qfibre::parse_config(text));
  const qfibre::RunResult result = qfibre::run_scenario(sc);
  if (out_path.empty()) out_path = sc.name + ".trace.csv";
  {
    std::ofstream out = open_out(out_path);
    qfibre::write_table_csv(out, result);
  }
  {
    std::ofstream meta = open_out(out_path + ".meta");
    qfibre::write_run_meta(meta, sc, text, result);
  }
  std::cout << "wrote " << out_path << " (" << result.rows.size() << " rows, "
            << result.columns.size() << " columns)\n";
  return 0;
}

int do_check(const std::string& config_path, int samples, long seed,
             const std::string& csv_path) {
  const qfibre::Scenario sc = qfibre::load_scenario(config_path);
  std::optional<unsigned> s;
  if (seed >= 0) s = unsigned(seed);
  const qfibre::AxiomReport report = qfibre::check_invariants(sc, samples, s);
  qfibre::write_records_csv(std::cout, report.records);
  if (!csv_path.empty()) {
    std::ofstream out = open_out(csv_path);
    qfibre::write_records_csv(out, report.records);
  }
  if (report.all_pass()) {
    std::cout << "all invariants hold\n";
    return 0;
  }
  std::cout << "INVARIANT FAILURE\n";
  return 1;
}

int do_convergence(const std::string& config_path, const std::string& steps,
                   const std::string& csv_path) {
  const qfibre::Scenario sc = qfibre::load_scenario(config_path);
  std::vector<int> ladder;
  std::istringstream in(steps);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const int n = std::stoi(item, &used);
      if (used != item.size() || n < 1) throw std::invalid_argument("");
      ladder.push_back(n);
    } catch (const std::exception&) {
      throw qfibre::ConfigValidationError("bad --steps entry '" + item + "'");
    }
  }
  if (ladder.empty())
    throw qfibre::ConfigValidationError("--steps needs at least one entry");
  const auto rows = qfibre::convergence_study(sc, ladder);
  qfibre::write_convergence_csv(std::cout, rows);
  if (!csv_path.empty()) {
    std::ofstream out = open_out(csv_path);
    qfibre::write_convergence_csv(out, rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fibre-valued quantum evolution toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string csv_path;
  std::string steps_text;
  int samples = 60;
  long seed = -1;

  auto* run = app.add_subcommand("run", "evolve a scenario and write a trace");
  run->add_option("config", config_path, "scenario file")->required();
  run->add_option("--out", out_path, "trace path (default <name>.trace.csv)");

  auto* check = app.add_subcommand("check-invariants",
                                   "audit the structural invariants of a run");
  check->add_option("config", config_path, "scenario file")->required();
  check->add_option("--samples", samples, "sampled grid points per record");
  check->add_option("--seed", seed, "sampling seed (default from scenario)");
  check->add_option("--csv", csv_path, "also write the records to this file");

  auto* conv = app.add_subcommand("convergence",
                                  "measure the final-time error across a step ladder");
  conv->add_option("config", config_path, "scenario file")->required();
  conv->add_option("--steps", steps_text, "comma separated step counts")
      ->required();
  conv->add_option("--csv", csv_path, "also write the table to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return do_run(config_path, out_path);
    if (check->parsed()) return do_check(config_path, samples, seed, csv_path);
    return do_convergence(config_path, steps_text, csv_path);
  } catch (const qfibre::ConfigSyntaxError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const qfibre::ConfigValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const qfibre::Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
