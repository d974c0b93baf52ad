#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "maxvol/errors.hpp"

using namespace maxvol;

int main(int argc, char** argv) {
  CLI::App app{"maxvol: up-and-out barrier pricing under spot/running-maximum volatility"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool check = false;
  auto* seed_opt = app.add_option("--seed", seed, "seed override");
  app.add_option("--config", config_path, "run configuration file (JSON)");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_flag("--check", check, "enforce tolerances; nonzero exit on breach");

  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&, bool);
  };
  static const Cmd cmds[] = {
      {"price-forward", "solve the forward equation over the whole (K,B,T) cube", cli::cmd_price_forward},
      {"price-backward", "price deals with the layered backward solver", cli::cmd_price_backward},
      {"compare", "cross-validate forward vs backward over a (K,B) panel", cli::cmd_compare},
      {"recover", "recover the mimicking volatility from the solved cube", cli::cmd_recover},
      {"density", "solve the joint density equation and derived prices", cli::cmd_density},
      {"mc", "Monte Carlo estimates for a list of deals", cli::cmd_mc},
      {"convergence", "empirical order studies for the forward solver", cli::cmd_convergence},
  };
  const Cmd* selected = nullptr;
  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->callback([&selected, &c]() { selected = &c; });
  }
  bool print_cfg = false;
  app.add_subcommand("print-config", "write the reference config with all defaults")
      ->callback([&print_cfg]() { print_cfg = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (print_cfg) {
      std::cout << cli::reference_config().dump(2) << "\n";
      return cli::kExitOk;
    }
    if (config_path.empty()) throw ConfigError("--config is required");
    RunConfig cfg = RunConfig::load(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed_opt->count() > 0) cfg.seed = seed;
    return selected->run(cfg, check);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return cli::kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
