#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "isk/cli.hpp"
#include "isk/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"isk: Ising-Sherrington-Kirkpatrick numerical laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir, seed_str, workers_str;
  bool print_config = false;
  std::vector<std::string> overrides;

  const char* names[] = {"pressure",     "rs-solve", "interpolate-check", "dobrushin",
                         "fluctuations", "gamma",    "mc-validate"};
  for (const char* name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config file");
    sub->add_option("--seed", seed_str, "master seed (overrides config)");
    sub->add_option("--workers", workers_str, "worker count (overrides config)");
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--set", overrides, "extra key=value overrides")->take_all();
    sub->add_flag("--print-config", print_config,
                  "print the canonicalized effective config and exit");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  try {
    isk::cli::ExperimentConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw isk::ValidationError("cannot open config file '" + config_path + "'");
      cfg = isk::cli::parse_config_file(in, subcommand);
    } else {
      cfg.subcommand = subcommand;
    }
    if (!seed_str.empty()) cfg.values["seed"] = seed_str;
    if (!workers_str.empty()) cfg.values["workers"] = workers_str;
    if (!out_dir.empty()) cfg.values["out"] = out_dir;
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw isk::ValidationError("--set expects key=value, got '" + kv + "'");
      cfg.values[kv.substr(0, eq)] = kv.substr(eq + 1);
    }

    if (print_config) {
      std::cout << isk::cli::canonicalize(cfg);
      return 0;
    }
    return isk::cli::run(cfg).exit_code;
  } catch (const isk::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const isk::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
