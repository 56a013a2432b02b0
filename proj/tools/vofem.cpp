#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vofem/cli.hpp"
#include "vofem/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Variable-order time-fractional diffusion solver"};
  app.require_subcommand(1);
  std::string config_path;
  bool echo = false;

  struct Verb {
    const char* name;
    const char* help;
    vofem::RunMode mode;
  };
  const Verb verbs[] = {
      {"check", "verify the order and kinetic coefficient assumptions", vofem::RunMode::check},
      {"solve", "run one solve and report its error", vofem::RunMode::solve},
      {"convergence", "run a convergence sweep and emit CSV/JSON tables", vofem::RunMode::convergence},
  };
  std::vector<std::pair<CLI::App*, vofem::RunMode>> subs;
  for (const auto& v : verbs) {
    auto* sub = app.add_subcommand(v.name, v.help);
    sub->allow_extras();
    sub->add_option("-c,--config", config_path, "key=value or JSON config file");
    sub->add_flag("--echo", echo, "print the resolved configuration before running");
    sub->footer("Settings are key=value pairs, e.g. d=1 m=512 N=32 alpha0=0.6 alpha1=0.4 r=auto");
    subs.emplace_back(sub, v.mode);
  }

  CLI11_PARSE(app, argc, argv);

  vofem::RunConfig cfg;
  try {
    for (auto& [sub, mode] : subs) {
      if (!sub->parsed()) continue;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw vofem::ConfigError("config: cannot read '" + config_path + "'");
        std::stringstream text;
        text << in.rdbuf();
        cfg = vofem::parse_config(text.str());
      }
      cfg.mode = mode;
      cfg = vofem::parse_args(sub->remaining(), cfg);
    }
  } catch (const vofem::ConfigError& e) {
    std::cerr << "vofem: " << e.what() << "\n";
    return 2;
  }
  if (echo) std::cout << vofem::to_text(cfg);
  return vofem::run(cfg, std::cout, std::cerr);
}
