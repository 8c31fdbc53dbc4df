// chiprobe: command-line front end over the C interface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chiprobe/chiprobe.h"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 3;

const char* kFooter = R"(Configuration is a key = value file ('#' starts a comment); --set
overrides are applied after it, later ones winning.

Rates (omega, kappa, gamma1, gamma2) need a unit:
  <x> Hz|kHz|MHz|GHz   cyclic frequency, stored as 2pi * x * scale rad/s;
                       an explicit "*2pi" suffix or "2pi*" prefix is accepted
                       and means the same thing ("100 MHz*2pi" = "100 MHz")
  <x> rad/s            angular frequency as given
  <x> omega            multiple of omega (not for omega itself)
A bare number for a rate is rejected.

Exit codes: 0 ok, 1 configuration error, 2 computation error, 3 I/O error.)";

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::string output;
  int threads = -1;
  long long seed = -1;
  bool print_config = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("-c,--config", o.config_path, "Configuration file");
  sub->add_option("-s,--set", o.sets, "Override key=value (repeatable)");
  sub->add_option("-o,--output", o.output, "Output directory");
  sub->add_option("-j,--threads", o.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  sub->add_option("--seed", o.seed, "Master random seed")->check(CLI::NonNegativeNumber);
  sub->add_flag("--print-config", o.print_config, "Print the resolved configuration and exit");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit-probe characteristic-function simulator and analysis toolkit", "chiprobe"};
  app.footer(kFooter);
  app.set_version_flag("--version", std::string(cp_version()));
  app.require_subcommand(1);

  Options options;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"scan", "Ideal chi, damped signal and e^{2f} over a grid"},
      {"reconstruct", "Simulated measurement and decoherence correction over a grid"},
      {"moments", "Quadrature moments from small-|beta| fits along rays"},
      {"cat", "Post-selected cat preparation versus the ideal cat"},
      {"oracle-check", "Closed-form signal versus the master-equation oracle"},
      {"budget", "Shot budget table for given damping exponents"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), options);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  std::string text;
  if (!options.config_path.empty()) {
    std::ifstream in(options.config_path);
    if (!in) {
      std::cerr << "chiprobe: cannot read " << options.config_path << '\n';
      return kExitIo;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }

  std::vector<std::string> overrides{"command=" + command};
  overrides.insert(overrides.end(), options.sets.begin(), options.sets.end());
  if (!options.output.empty()) overrides.push_back("output=" + options.output);
  if (options.threads >= 0) overrides.push_back("threads=" + std::to_string(options.threads));
  if (options.seed >= 0) overrides.push_back("seed=" + std::to_string(options.seed));
  std::vector<const char*> raw;
  for (const auto& s : overrides) raw.push_back(s.c_str());

  cp_config* config = nullptr;
  if (cp_config_parse(text.c_str(), raw.data(), raw.size(), &config) != CP_OK) {
    std::cerr << "chiprobe: invalid configuration\n" << cp_last_error();
    return kExitConfig;
  }

  if (options.print_config) {
    std::string listing(cp_config_text(config, nullptr, 0) + 1, '\0');
    cp_config_text(config, listing.data(), listing.size());
    std::cout << listing.c_str();
    cp_config_free(config);
    return 0;
  }

  int exit_code = 0;
  char summary[4096];
  const cp_status status = cp_config_execute(config, &exit_code, summary, sizeof summary);
  cp_config_free(config);
  if (status != CP_OK) {
    std::cerr << "chiprobe: " << cp_status_string(status) << ": " << cp_last_error() << '\n';
    return 2;
  }
  (exit_code == 0 ? std::cout : std::cerr) << summary << '\n';
  return exit_code;
}
