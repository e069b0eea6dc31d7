// Command-line driver: hydrob --config run.ini --mode convergence --out results/
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hydrob/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hydrostatic Oldroyd-B thin-strip solver and verification harness"};
  std::string config_path;
  std::string mode_name = "limit";
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "INI configuration file (defaults if omitted)");
  app.add_option("--mode", mode_name, "limit | eps | convergence | lemmas | selfconv");
  app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
  app.add_option("--seed", seed, "random seed (overrides [params] seed)");
  app.set_version_flag("--version", std::string(hydrob::version()));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? hydrob::kExitOk : hydrob::kExitConfig;
  }

  try {
    const auto mode = hydrob::parse_mode(mode_name);
    std::string text;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "error: cannot read " << config_path << "\n";
        return hydrob::kExitConfig;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    auto config = hydrob::parse_config(text);
    if (seed) config.params.seed = *seed;
    if (!out_dir.empty()) config.output.dir = out_dir;

    const auto result = hydrob::execute(config, mode, config.output.dir);
    if (result.exit_code == hydrob::kExitOk || result.exit_code == hydrob::kExitMonitor)
      std::cout << result.summary;
    if (!result.message.empty()) std::cerr << "hydrob: " << result.message << "\n";
    return result.exit_code;
  } catch (const hydrob::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hydrob::kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hydrob::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hydrob::kExitBlowup;
  }
}
