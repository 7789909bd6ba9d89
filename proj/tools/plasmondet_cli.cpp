#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "plasmondet/commands.hpp"
#include "plasmondet/errors.hpp"
#include "plasmondet/io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

// One line per problem: "plasmondet: error kind=<k> key=<key> message=<text>".
void report(std::string_view kind, std::string_view key, std::string_view message) {
  std::cerr << "plasmondet: error kind=" << kind << " key=" << (key.empty() ? "-" : key)
            << " message=" << message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  using namespace plasmondet;

  CLI::App app{"Surface-plasmon enhanced atom detection: sweeps, spectra, traces, images"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> assignments;
  std::string seed;
  std::string out_path;
  std::string format;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--set", assignments, "override one key, key=value (repeatable)");
  app.add_option("--seed", seed, "random seed (u64), same as --set run.seed=<u64>");
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--format", format, "csv or matrix")->check(CLI::IsMember({"csv", "matrix"}));

  const std::map<std::string_view, std::string> help = {
      {"angle-sweep", "R with and without atoms, dR and N_max versus incidence angle"},
      {"qnd-map", "angle-maximized N_max over a density x detuning grid"},
      {"spectrum", "dR versus detuning for the cloud, with a Fano width fit"},
      {"trace", "synthetic falling-cloud time trace with Gaussian fit and dN"},
      {"image", "per-pixel dR map of the cloud at the surface"},
      {"resonance", "plasmon angle, dip depth, surface enhancement, decay length"}};
  for (auto name : command_names()) app.add_subcommand(std::string(name), help.at(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report("usage", "", e.what());
    return kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  Config config = Config::defaults();
  RunConfig resolved;
  try {
    if (!config_path.empty()) config.merge_file(config_path);
    for (const auto& a : assignments) config.set_assignment(a);
    if (!seed.empty()) config.set("run.seed", seed);
    if (!format.empty()) config.set("output.format", format);
    resolved = resolve_config(config);
  } catch (const ConfigValidationError& e) {
    for (const auto& issue : e.issues()) report("config", issue.key, issue.message);
    return kExitConfig;
  } catch (const ConfigError& e) {
    report("config", e.key(), e.what());
    return kExitConfig;
  }

  CommandResult result;
  try {
    result = run_command(command, resolved);
  } catch (const NumericError& e) {
    report("numeric", "", std::string(e.what()) + " achieved=" + format_double(e.achieved()));
    return kExitNumeric;
  } catch (const NotEvanescent& e) {
    report("config", "probe.angle_deg", e.what());
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    report("config", "", e.what());
    return kExitConfig;
  }

  std::ostringstream buffer;
  write_result(buffer, config, resolved, result);
  if (out_path.empty()) {
    std::cout << buffer.str();
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out || !(out << buffer.str())) {
      report("io", "", "cannot write '" + out_path + "'");
      return 1;
    }
  }
  if (result.image && !resolved.image.png.empty()) {
    try {
      write_png16(resolved.image.png, result.image->rows, result.image->cols,
                  result.image->values);
    } catch (const Error& e) {
      report("io", "image.png", e.what());
      return 1;
    }
  }
  return 0;
}
