// Command-line front end: `mfc run <config>` and `mfc validate <config>`.
#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "mfc/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Controlled mean-field leader-follower toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  bool progress = false;
  std::string output_dir;

  auto* run = app.add_subcommand("run", "Run the scenario described by a config file");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--progress", progress, "Machine-readable progress on standard error");
  run->add_option("--output-dir", output_dir, "Override io.output_dir (also MFC_OUTPUT_DIR)");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse and check a config file");
  validate->add_option("config", validate_path, "Config file")->required();

  CLI11_PARSE(app, argc, argv);

  const std::string path = run->parsed() ? config_path : validate_path;
  const mfc::ParseResult parsed = mfc::parse_config(path);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) std::cerr << path << ": " << e << '\n';
    return mfc::kExitValidation;
  }
  if (validate->parsed()) {
    std::cout << path << ": ok (scenario " << mfc::scenario_name(parsed.config.scenario) << ")\n";
    return mfc::kExitOk;
  }
  mfc::RunOptions opts;
  opts.threads = threads;
  opts.progress = progress;
  if (output_dir.empty())
    if (const char* env = std::getenv("MFC_OUTPUT_DIR")) output_dir = env;
  opts.output_dir = output_dir;
  return mfc::run(parsed.config, opts);
}
