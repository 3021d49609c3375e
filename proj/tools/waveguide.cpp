// Command-line front end.
//
//   waveguide run <config> [--tasks a,b] [--out dir] [--seed n] [--jobs n] [--validate-only]
//
// Exit status: 0 when every requested check passes, 1 when a numerical check
// fails, 2 for configuration, usage or output-path errors.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "waveguide/run.hpp"

namespace {

int run_command(const std::string& path, const std::string& tasks, const std::string& out,
                const std::uint64_t* seed, unsigned jobs, bool validate_only) {
  using namespace waveguide;
  RunConfig cfg;
  try {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open configuration file");
    std::stringstream ss;
    ss << in.rdbuf();
    IniDocument doc = parse_ini(ss.str(), path);
    if (!tasks.empty()) {
      for (const auto& t : detail::split_list(tasks))
        if (std::find(known_tasks().begin(), known_tasks().end(), t) == known_tasks().end()) {
          std::cerr << "--tasks: unknown task '" << t << "'\n";
          return 2;
        }
      doc.sections["run"]["tasks"] = {tasks, 0};
    }
    cfg = load_config(doc, std::filesystem::path(path).parent_path());
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  if (!out.empty()) cfg.out = out;
  if (seed) cfg.seed = *seed;
  if (jobs) cfg.jobs = jobs;

  if (validate_only) {
    std::cout << "configuration valid: " << cfg.tasks.size() << " task(s), "
              << sweep_points(cfg).size() << " sweep point(s)\n";
    return 0;
  }

  // Fail on an unusable output directory before any computation.
  const std::filesystem::path dir(cfg.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    std::cerr << "cannot create output directory '" << dir.string() << "'\n";
    return 2;
  }

  RunResult rr;
  try {
    rr = run(cfg);
    write_outputs(dir, cfg, rr);
  } catch (const OutputError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  int failed = 0;
  for (const auto& t : rr.tasks)
    for (const auto& c : t.checks) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
      if (!c.passed) ++failed;
    }
  if (failed) {
    std::cerr << failed << " check(s) failed\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Birman-Schwinger analysis of leaky-wire waveguides"};
  app.require_subcommand(1);
  app.set_version_flag("--version", waveguide::kVersion);

  std::string config, tasks, out;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  bool validate_only = false;
  auto* run = app.add_subcommand("run", "Run the tasks of a configuration file");
  run->add_option("config", config, "Configuration file")->required();
  run->add_option("--tasks", tasks, "Comma-separated task list overriding [run] tasks");
  run->add_option("--out", out, "Output directory overriding [run] out");
  auto* seed_opt = run->add_option("--seed", seed, "Random seed (Monte Carlo strategy)");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--validate-only", validate_only, "Only parse and validate the configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return run_command(config, tasks, out, seed_opt->count() ? &seed : nullptr, jobs, validate_only);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
