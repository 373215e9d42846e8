// ppqnd: experiment runner.
//
//   ppqnd <command> --config PATH [--out PATH] [--format json|csv] [--seed N] [--sensitive]
//
// Exit codes: 0 success, 1 usage or config error, 2 tolerance failure.

#include "CLI11.hpp"
#include "ppqnd/cli/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ppqnd::cli::ConfigError("config", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  namespace pc = ppqnd::cli;
  CLI::App app{"Polarization-preserving QND photodetector experiments"};
  app.set_version_flag("--version", std::string(pc::library_version));
  app.require_subcommand(1);

  std::string config_path, out_path, format;
  std::uint64_t seed = 0;
  bool sensitive = false;
  for (const std::string& name : pc::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "Experiment config (flat JSON)")->required();
    sub->add_option("--out", out_path, "Output file (default: stdout)");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", seed, "Random seed");
    if (name == "preserve") sub->add_flag("--sensitive", sensitive, "Use the polarization-sensitive control");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  const CLI::App* sub = app.get_subcommands().front();

  const auto start = std::chrono::steady_clock::now();
  try {
    pc::ExperimentConfig config = pc::parse_config(read_file(config_path));
    if (sub->count("--seed")) config.seed = seed;
    if (sensitive) config.sensitive = true;
    if (sub->count("--format")) config.format = format;
    if (sub->count("--out")) config.out = out_path;

    std::optional<double> env_tol;
    if (const char* e = std::getenv("PPQND_TOL")) env_tol = pc::parse_tolerance(e);

    const pc::ResultRecord record = pc::run_command(command, config, env_tol);
    const std::string text =
        config.format.value_or("json") == "csv" ? pc::render_csv(record) : pc::render_json(record);
    if (config.out) {
      std::ofstream out(*config.out, std::ios::binary);
      if (!out) throw pc::ConfigError("out", "cannot write '" + *config.out + "'");
      out << text;
    } else {
      std::cout << text;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << command << ": " << pc::status_name(record.status) << ", wall-clock " << secs << " s\n";
    return record.exit_code();
  } catch (const pc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
