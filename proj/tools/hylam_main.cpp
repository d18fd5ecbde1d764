// Command-line entry point. All physics lives in the config file; flags
// only select the subcommand, the config path and the output directory.

#include <cstdio>

#include <CLI11.hpp>

#include "hylam/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"1D hybrid-laminate damage evolution with cohesive interface"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", trace_path, axis;
  long long seed_override = -1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration (JSON)")
        ->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed_override, "override the config seed");
  };

  CLI::App* run = app.add_subcommand("run", "run the quasi-static evolution");
  add_common(run);
  CLI::App* check_law =
      app.add_subcommand("check-law", "certify the cohesive-law assumptions");
  add_common(check_law);
  CLI::App* check_condition = app.add_subcommand(
      "check-condition", "evaluate the convexity/regularity margin");
  add_common(check_condition);
  CLI::App* verify =
      app.add_subcommand("verify", "re-derive residuals from a trace");
  add_common(verify);
  verify->add_option("--trace", trace_path, "trace.csv to verify")->required();
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter axis");
  add_common(sweep);
  sweep->add_option("--axis", axis, "axis spec: section.key=v1,v2,...")
      ->required();

  CLI11_PARSE(app, argc, argv);

  hylam::ParseResult parsed = hylam::parse_config_file(config_path);
  if (!parsed.config) {
    for (const std::string& e : parsed.errors)
      std::fprintf(stderr, "config error: %s\n", e.c_str());
    return 2;
  }
  hylam::RunConfig config = *parsed.config;
  if (seed_override >= 0) config.seed = std::uint64_t(seed_override);

  if (run->parsed()) return hylam::cli::command_run(config, out_dir);
  if (check_law->parsed())
    return hylam::cli::command_check_law(config, out_dir);
  if (check_condition->parsed())
    return hylam::cli::command_check_condition(config, out_dir);
  if (verify->parsed())
    return hylam::cli::command_verify(trace_path, config, out_dir);
  if (sweep->parsed()) return hylam::cli::command_sweep(config, axis, out_dir);
  return 2;
}
