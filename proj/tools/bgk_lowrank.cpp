// bgk-lowrank: run, validate and inspect low-rank BGK simulations.

#include "bgklr/io.hpp"
#include "bgklr/run.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using namespace bgklr;

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int print_info(const std::string& path) {
  const FileHeader h = read_header(path);
  std::cout << "file: " << path << "\n";
  std::cout << "version: " << h.version << "\n";
  std::cout << "kind: " << (h.kind == FileKind::field ? "field" : "factors") << "\n";
  std::cout << "shape:";
  for (auto s : h.shape) std::cout << ' ' << s;
  std::cout << "\n";
  if (h.kind == FileKind::factors) {
    const Checkpoint c = read_checkpoint(path);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", c.state.time);
    std::cout << "time: " << buf << "\n";
    std::cout << "rank: " << c.state.rank() << "\n";
    auto axes = [](const char* side, const std::vector<AxisSpec>& list) {
      for (std::size_t i = 0; i < list.size(); ++i)
        std::cout << side << '.' << i << ": [" << list[i].lower << ", " << list[i].upper << ") n = "
                  << list[i].n << "\n";
    };
    axes("x", c.x_axes);
    axes("v", c.v_axes);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank solver for the BGK kinetic equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> overrides;
  std::string resume;

  auto* run_cmd = app.add_subcommand("run", "run a simulation");
  run_cmd->add_option("--config", config_path, "configuration file");
  auto flag = [&](const char* name, const char* key, const char* help) {
    run_cmd->add_option_function<std::string>(
        name, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
  };
  flag("--experiment", "experiment", "toy1d1v|shear2d2v|shear3d3v|explosion2d2v|explosion3d3v|custom");
  flag("--integrator", "integrator", "ips|buc|ops|bug|dense");
  flag("--rank", "rank", "fixed or initial rank");
  flag("--theta", "theta", "relative truncation threshold");
  flag("--rank-max", "rank_max", "largest adaptive rank");
  flag("--dt", "dt", "time step");
  flag("--t-final", "t_final", "final time");
  flag("--epsilon", "epsilon", "Knudsen number, or 'none'");
  flag("--output", "output", "output directory");
  flag("--seed", "seed", "random seed");
  run_cmd->add_option("--resume", resume, "checkpoint to continue from");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "parse a configuration file");
  validate_cmd->add_option("--config", validate_path, "configuration file")->required();

  std::string info_path;
  auto* info_cmd = app.add_subcommand("info", "print a snapshot or checkpoint header");
  info_cmd->add_option("checkpoint", info_path, "file to inspect")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*info_cmd) return print_info(info_path);
    if (*validate_cmd) {
      const RunConfig c = parse_config(read_text(validate_path));
      std::cout << serialize_config(c);
      return 0;
    }

    const std::string text = config_path.empty() ? std::string() : read_text(config_path);
    const RunConfig config = parse_config(text, overrides);
    RunOptions options;
    if (!resume.empty()) options.resume = resume;
    options.on_step = [](const StepReport& r) {
      if (r.step % 1000 == 0)
        std::cerr << "step " << r.step << " t = " << r.time << " rank = " << r.rank << " mass = " << r.mass
                  << "\n";
    };
    const RunResult result = run(config, options);
    std::cerr << "wrote " << result.csv.string() << " (" << result.reports.size() << " rows)\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
