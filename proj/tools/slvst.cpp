// slvst <command> --config <file> [--out <dir>] [--overlay-theory] [--threads N]

#include <charconv>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "slvst/config.hpp"
#include "slvst/errors.hpp"
#include "slvst/parallel.hpp"
#include "slvst/run.hpp"

namespace {

constexpr int kUsageExit = 1;
constexpr int kInternalExit = 13;

bool parse_threads(const char* text, unsigned& out) {
  const std::string s(text);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Velocity scanning tomography of superradiance lattices"};
  app.set_version_flag("--version", std::string(slvst::version()));
  std::string command, config_file, out_dir;
  bool overlay = false;
  unsigned threads = 0;
  app.add_option("command", command, "dos | wsl | absorb | vst-map | zak | chern | winding")
      ->required()
      ->check(CLI::IsMember({"dos", "wsl", "absorb", "vst-map", "zak", "chern", "winding"}));
  app.add_option("--config", config_file, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_flag("--overlay-theory", overlay, "draw predicted ladder lines on heatmaps");
  app.add_option("--threads", threads, "worker threads, 0 = all cores (SLVST_THREADS wins)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageExit;
  }

  if (const char* env = std::getenv("SLVST_THREADS"); env && *env) {
    if (!parse_threads(env, threads)) {
      std::cerr << "slvst: SLVST_THREADS must be a non-negative integer, got '" << env << "'\n";
      return kUsageExit;
    }
  }
  slvst::set_thread_count(threads);

  try {
    const slvst::RunConfig config = slvst::load_config(config_file);
    if (slvst::command_name(config.command) != command)
      throw slvst::Error(slvst::ErrorCategory::kConfigSchema,
                         "config is for command '" + std::string(slvst::command_name(config.command)) +
                             "', not '" + command + "'");
    slvst::RunOptions options;
    if (!out_dir.empty()) options.out_dir = out_dir;
    options.overlay_theory = overlay;
    const slvst::RunResult result = slvst::run(config, options);
    for (const auto& [key, value] : result.summary)
      std::cout << key << '=' << slvst::summary_text(value) << '\n';
    for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
    return 0;
  } catch (const slvst::Error& e) {
    std::cerr << "slvst: error [" << slvst::category_name(e.category()) << "]: " << e.what() << '\n';
    return slvst::exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "slvst: internal error: " << e.what() << '\n';
    return kInternalExit;
  }
}
