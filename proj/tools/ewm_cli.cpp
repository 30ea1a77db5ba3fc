#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ewm/ewm.h"

namespace {

struct Args {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  long long seed = -1;
};

int execute(const std::string& command, const Args& a) {
  std::vector<std::string> overrides = a.sets;
  if (!a.out.empty()) overrides.push_back("output.directory=\"" + a.out + "\"");
  if (a.seed >= 0) {
    overrides.push_back("stability.seed=" + std::to_string(a.seed));
    overrides.push_back("solver.seed=" + std::to_string(a.seed));
  }
  std::vector<const char*> ptrs;
  for (const auto& o : overrides) ptrs.push_back(o.c_str());

  ewm_config* cfg = nullptr;
  const ewm_status st = a.config.empty() ? ewm_config_parse("{}", ptrs.data(), ptrs.size(), &cfg)
                                         : ewm_config_load(a.config.c_str(), ptrs.data(), ptrs.size(), &cfg);
  if (st != EWM_OK) {
    std::fprintf(stderr, "ewm-cli: %s: %s\n", ewm_status_string(st), ewm_last_error());
    return 2;
  }
  char hash[17];
  ewm_config_hash(cfg, hash);
  int code = 0;
  const char* summary = nullptr;
  const ewm_status rs = ewm_run_command(cfg, command.c_str(), &code, &summary);
  ewm_config_free(cfg);
  if (rs != EWM_OK) {
    std::fprintf(stderr, "ewm-cli: %s: %s\n", ewm_status_string(rs), ewm_last_error());
    return 2;
  }
  std::fprintf(code == 0 ? stdout : stderr, "%s[%s] config %s, exit %d\n", summary ? summary : "", command.c_str(),
               hash, code);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivariant wave maps between spheres of revolution"};
  app.require_subcommand(1);
  Args args;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"validate", "check the surface profile invariants"},
      {"stationary", "minimize the reduced action"},
      {"evolve", "evolve stationary (optionally perturbed) data"},
      {"stability", "perturb, evolve and track the distance to the orbit"},
      {"geometry-check", "geodesic comparison and identity checks"},
      {"regularity-check", "intertwining, w-transform and chart checks"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", args.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--set", args.sets, "override a field, e.g. --set evolve.cfl=0.3");
    sub->add_option("--out", args.out, "output directory");
    sub->add_option("--seed", args.seed, "seed for perturbations and sampling")->check(CLI::NonNegativeNumber);
  }
  CLI11_PARSE(app, argc, argv);
  for (const auto* sub : app.get_subcommands()) return execute(sub->get_name(), args);
  return 2;
}
