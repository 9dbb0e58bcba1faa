#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "ibssd/commands.hpp"

using namespace ibssd;

namespace {

// Options shared by the commands that build a RunConfig.
struct ConfigOptions {
  std::string file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> keys;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "key = value configuration file");
    app->add_option("--set", sets, "override one setting, key=value (repeatable)");
    for (const std::string& k : config_keys()) app->add_option("--" + k, keys[k], "config key " + k);
  }

  RunConfig build() const {
    RunConfig c;
    if (!file.empty()) c = load_config(file);
    if (const char* env = std::getenv("IBSSD_OUTPUT_DIR"); env && *env) c.output_dir = env;
    for (const auto& [k, v] : keys)
      if (!v.empty()) apply_setting(c, k, v);
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::usage, "--set expects key=value, got '" + s + "'");
      apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
    }
    return c;
  }

  std::string output_dir() const { return build().output_dir; }
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<Scheme> scheme_list(const std::string& s) {
  std::vector<Scheme> out;
  for (const std::string& name : split(s)) out.push_back(scheme_from_string(name));
  return out;
}

std::vector<Eigen::Index> size_list(const std::string& key, const std::string& s) {
  std::vector<Eigen::Index> out;
  for (double v : parse_number_list(key, s)) {
    if (v != std::floor(v) || v <= 0) throw Error(ErrorKind::usage, key + ": expected positive integers");
    out.push_back(static_cast<Eigen::Index>(v));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Immersed elastic interface in periodic Stokes flow"};
  app.require_subcommand(1);

  ConfigOptions run_opts, conv_opts, sweep_opts, cost_opts;
  std::string run_preset_name, conv_preset_name;

  CLI::App* run = app.add_subcommand("run", "run one configuration or every run of a preset");
  run_opts.attach(run);
  run->add_option("--preset", run_preset_name, "preset name (see 'presets list')");

  std::string conv_dts;
  CLI::App* conv = app.add_subcommand("convergence", "temporal self-convergence study");
  conv_opts.attach(conv);
  conv->add_option("--preset", conv_preset_name, "convergence preset name");
  conv->add_option("--dts", conv_dts, "halving chain of step sizes, e.g. 1/16,1/32,1/64");

  std::string sweep_schemes, sweep_Ns, sweep_mus, sweep_dts;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  CLI::App* sweep = app.add_subcommand("sweep", "stability verdicts over a grid of step sizes and parameters");
  sweep_opts.attach(sweep);
  sweep->add_option("--schemes", sweep_schemes, "comma-separated scheme names")->required();
  sweep->add_option("--Ns", sweep_Ns, "comma-separated grid sizes (default: config N)");
  sweep->add_option("--mus", sweep_mus, "comma-separated viscosities (default: config mu)");
  sweep->add_option("--dts", sweep_dts, "comma-separated step sizes");
  sweep->add_option("--threads", threads, "worker threads");

  std::string cost_schemes, cost_Ns = "64,128,256";
  long cost_steps = 3;
  CLI::App* cost = app.add_subcommand("cost", "per-step cost and operation counts against N");
  cost_opts.attach(cost);
  cost->add_option("--schemes", cost_schemes, "comma-separated scheme names")->required();
  cost->add_option("--Ns", cost_Ns, "comma-separated grid sizes");
  cost->add_option("--steps", cost_steps, "timed steps per measurement");

  CLI::App* presets_cmd = app.add_subcommand("presets", "preset catalogue");
  presets_cmd->require_subcommand(1);
  CLI::App* presets_list = presets_cmd->add_subcommand("list", "list preset names and descriptions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }

  try {
    if (*presets_list) {
      for (const Preset& p : presets()) std::cout << p.name << "\t" << p.description << "\n";
      return 0;
    }
    if (*run) {
      if (!run_preset_name.empty()) return static_cast<int>(run_preset(find_preset(run_preset_name), run_opts.output_dir(), std::cout));
      return cmd_run(run_opts.build(), std::cout).probe.stable ? 0 : static_cast<int>(ExitCode::unstable);
    }
    if (*conv) {
      if (!conv_preset_name.empty()) {
        const Preset& p = find_preset(conv_preset_name);
        if (p.kind != PresetKind::convergence) throw Error(ErrorKind::usage, "preset: not a convergence preset");
        return static_cast<int>(run_preset(p, conv_opts.output_dir(), std::cout));
      }
      const std::vector<double> dts = parse_number_list("dts", conv_dts);
      if (dts.empty()) throw Error(ErrorKind::usage, "dts: at least one step size is required");
      return cmd_convergence(conv_opts.build(), dts, std::cout).report.completed ? 0
                                                                                 : static_cast<int>(ExitCode::unstable);
    }
    if (*sweep) {
      const RunConfig base = sweep_opts.build();
      const auto Ns = sweep_Ns.empty() ? std::vector<Eigen::Index>{base.N} : size_list("Ns", sweep_Ns);
      const auto mus = sweep_mus.empty() ? std::vector<double>{base.phys.mu} : parse_number_list("mus", sweep_mus);
      cmd_sweep(base, scheme_list(sweep_schemes), Ns, mus, parse_number_list("dts", sweep_dts), threads, std::cout);
      return 0;
    }
    if (*cost) {
      cmd_cost(cost_opts.build(), scheme_list(cost_schemes), size_list("Ns", cost_Ns), cost_steps, std::cout);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "ibssd: " << e.what() << "\n";
    return static_cast<int>(exit_code_for(e));
  } catch (const std::exception& e) {
    std::cerr << "ibssd: " << e.what() << "\n";
    return static_cast<int>(ExitCode::failure);
  }
  return 0;
}
