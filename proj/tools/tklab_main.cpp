#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tklab/report.hpp"
#include "tklab/version.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tklab: semigroup approximation laboratory for the 1-D heat equation"};
  app.set_version_flag("--version", std::string(tklab::kVersion));

  auto* run = app.add_subcommand("run", "run experiment suites from a JSON config");
  std::string config_path;
  std::string suite_override;
  std::string out_override;
  std::int64_t seed_override = -1;
  run->add_option("--config", config_path, "path to the JSON experiment config")->required();
  run->add_option("--suite", suite_override,
                  "suite selector override: a2|stability|c2|resolvent|semigroup|decomposition|"
                  "demo|all");
  run->add_option("--out", out_override, "output directory override");
  run->add_option("--seed", seed_override, "random seed override (nonnegative)");

  CLI11_PARSE(app, argc, argv);
  if (!run->parsed()) {
    std::cerr << app.help() << '\n';
    return 2;
  }

  try {
    tklab::ExperimentConfig cfg = tklab::parse_config_json(read_file(config_path));
    if (!suite_override.empty()) {
      std::ostringstream patch;
      patch << R"({"suite":")" << suite_override << R"("})";
      // reuse the validator for the override value
      tklab::ExperimentConfig check = tklab::parse_config_json(patch.str());
      cfg.suite = check.suite;
    }
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);

    const tklab::RunManifest manifest = tklab::run_experiments(cfg);
    for (const auto& s : manifest.suites)
      std::cout << s.name << ": " << (s.pass ? "pass" : "FAIL") << "  (" << s.wall_seconds
                << " s)\n";
    std::cout << "manifest: " << cfg.out_dir << "/manifest.json  config " << manifest.config_hash
              << '\n';
    if (!manifest.all_pass) {
      std::cerr << "failing suites:";
      for (const auto& s : manifest.suites)
        if (!s.pass) std::cerr << ' ' << s.name;
      std::cerr << '\n';
      for (const auto& s : manifest.suites)
        for (const auto& note : s.notes)
          if (!s.pass) std::cerr << "  [" << s.name << "] " << note << '\n';
      return 1;
    }
    return 0;
  } catch (const tklab::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
