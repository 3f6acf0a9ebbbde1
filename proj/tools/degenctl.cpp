// degenctl: batch runner for the degenerate-system control scenarios.
//   degenctl run <config.json> [--jobs K] [--out DIR]
//   degenctl report <DIR>
// Exit codes: 0 success, 1 numerical failure (error JSON on stdout), 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "degen/errors.hpp"
#include "degen/io.hpp"
#include "degen/runner.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& config_path, std::size_t jobs, const std::string& out) {
  degen::RunConfig cfg;
  std::string text;
  try {
    text = degen::io::read_text(config_path);
  } catch (const std::exception& e) {
    std::cerr << "degenctl: " << e.what() << '\n';
    return 2;
  }
  try {
    cfg = degen::parse_config(text);
    if (const char* env = std::getenv("DEGENCTL_PRECISION_BITS")) {
      int bits = 0;
      try {
        bits = static_cast<int>(degen::io::parse_double(env));
      } catch (const std::invalid_argument&) {
      }
      if (bits < 53 || bits > 65536) throw degen::UsageError("DEGENCTL_PRECISION_BITS must be an integer in [53, 65536]");
      cfg.precision_bits = bits;
    }
  } catch (const degen::UsageError& e) {
    std::cerr << "degenctl: " << e.what() << '\n';
    return 2;
  }
  fs::path dir = out.empty() ? fs::path(cfg.output_dir) : fs::path(out);
  if (dir.empty()) {
    std::cerr << "degenctl: no output directory (set output_dir or pass --out)\n";
    return 2;
  }
  cfg.output_dir = dir.string();
  try {
    degen::run_scenario(cfg, dir, jobs);
  } catch (const degen::UsageError& e) {
    std::cerr << "degenctl: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    const std::string err = degen::error_json(e);
    std::cout << err << '\n';
    try {
      degen::io::write_text(dir / "error.json", err + "\n");
    } catch (const std::exception&) {
    }
    return 1;
  }
  std::cout << (dir / "summary.json").string() << '\n';
  return 0;
}

int cmd_report(const std::string& dir) {
  try {
    const auto lines = degen::report_run(dir);
    degen::print_report(std::cout, lines);
    for (const auto& l : lines)
      if (!l.pass) return 1;
    return 0;
  } catch (const degen::UsageError& e) {
    std::cerr << "degenctl: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cout << degen::error_json(e) << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary null control of coupled degenerate parabolic systems"};
  app.require_subcommand(1);

  std::string config_path, out, report_dir;
  std::size_t jobs = 1;
  auto* run = app.add_subcommand("run", "run one scenario from a JSON config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--jobs", jobs, "worker threads for scans")->check(CLI::Range(1, 256));
  run->add_option("--out", out, "output directory (overrides output_dir)");
  auto* report = app.add_subcommand("report", "re-check the certificates of a run directory");
  report->add_option("dir", report_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (run->parsed()) return cmd_run(config_path, jobs, out);
  return cmd_report(report_dir);
}
