#pragma once

// Command-line surface: run | sweep | detect | oracle.
// Exit codes: 0 success, 1 configuration error, 2 numerical error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "io.hpp"
#include "scenario.hpp"
#include "surveillance.hpp"
#include "sweep.hpp"

namespace epitrigger {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

namespace detail {

inline ConfigDocument load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Renders into memory first so a failed run never leaves a partial file.
template <class Write>
void write_output(const std::string& path, std::ostream& out, Write&& write) {
  std::ostringstream buffer;
  write(buffer);
  if (path.empty() || path == "-") {
    out << buffer.str();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write output file '" + path + "'");
  file << buffer.str();
  if (!file) throw ConfigError("failed writing output file '" + path + "'");
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Surveillance-triggered behaviour and intervention epidemic simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  bool seedless = true;

  auto* run = app.add_subcommand("run", "Run one scenario and write its trajectory");
  auto* sweep = app.add_subcommand("sweep", "Evaluate final sizes over the config's sweep axes");
  auto* detect = app.add_subcommand("detect", "Daily detection table for the config's naive outbreak");
  auto* oracle = app.add_subcommand("oracle", "SIR final-size relation for a list of R0 values");

  for (auto* sub : {run, sweep, detect}) {
    sub->add_option("--config", config_path, "Config document")->required();
    sub->add_option("--out", out_path, "Output file (stdout when omitted)");
    sub->add_flag("--seedless", seedless, "Deterministic mode (the only mode)");
  }
  sweep->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  std::vector<double> r0_values;
  double s0 = 1.0;
  double r_init = 0.0;
  oracle->add_option("--r0", r0_values, "Basic reproduction numbers")->required();
  oracle->add_option("--s0", s0, "Initial susceptible fraction");
  oracle->add_option("--r-init", r_init, "Initial recovered fraction");
  oracle->add_option("--out", out_path, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      const ConfigDocument doc = detail::load_config(config_path);
      const SimResult result = run_scenario(doc.scenario);
      detail::write_output(out_path, out, [&](std::ostream& os) { emit_result(os, result, doc); });
    } else if (*sweep) {
      const ConfigDocument doc = detail::load_config(config_path);
      if (doc.axes.empty()) throw ConfigError(config_path + ": no sweep.axis1 defined");
      const SweepResult result = run_sweep(doc.scenario, doc.axes, workers);
      detail::write_output(out_path, out, [&](std::ostream& os) { emit_result(os, result, doc); });
    } else if (*detect) {
      const ConfigDocument doc = detail::load_config(config_path);
      ScenarioConfig naive = doc.scenario;
      naive.trigger.reset();
      const SimResult result = run_scenario(naive);
      const auto prevalence = daily_prevalence(result.phase1, naive.disease);
      const DetectionResult det = detection_time(prevalence, doc.surveillance);
      detail::write_output(out_path, out,
                           [&](std::ostream& os) { emit_detection(os, prevalence, det, doc); });
    } else if (*oracle) {
      detail::write_output(out_path, out, [&](std::ostream& os) {
        os << "r0,final_size\n";
        for (double r0 : r0_values) {
          os << format_number(r0) << ',' << format_number(sir_final_size_oracle(r0, s0, r_init)) << '\n';
        }
      });
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace epitrigger
