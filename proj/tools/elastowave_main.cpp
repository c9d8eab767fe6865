// Command-line driver: run a config, sweep h or N, or run a built-in preset.

#include "elastowave/error.hpp"
#include "elastowave/parallel.hpp"
#include "elastowave/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace ew = elastowave;

namespace {

struct ConfigLoadError {
  int code;
};

ew::ScenarioConfig load(const std::string& path, ew::RunOptions& options) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read " << path << '\n';
    throw ConfigLoadError{ew::exit_codes::io};
  }
  std::ostringstream text;
  text << in.rdbuf();
  options.config_text = text.str();
  try {
    return ew::parse_config(*options.config_text);
  } catch (const ew::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    throw ConfigLoadError{ew::exit_codes::parse};
  }
}

void report(const ew::RunResult& r) {
  std::cout << std::setprecision(10);
  for (const auto& w : r.warnings) std::cout << "warning: " << w << '\n';
  std::cout << "dt " << r.dt << ", steps " << r.steps << ", t " << r.state.t << '\n';
  if (r.error) {
    std::cout << "energy error " << r.error->energy() << " (relative " << r.error->energy() / r.reference->energy()
              << ")\n";
    std::cout << "L2 error " << r.error->l2() << " (relative " << r.error->l2() / r.reference->l2() << ")\n";
  }
  std::cout << "outputs in " << r.output_dir.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"elastowave: DGSE solver for coupled elasto-acoustic waves"};
  app.require_subcommand(1);

  int threads = 0;
  std::string config_path;
  std::string output_dir;

  auto* run = app.add_subcommand("run", "Integrate one configuration");
  run->add_option("-c,--config", config_path, "Configuration file")->required();
  run->add_option("--threads", threads, "Worker threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
  run->add_option("--output-dir", output_dir, "Overrides [output] dir");

  std::string sweep;
  std::vector<double> values;
  auto* converge = app.add_subcommand("converge", "Convergence sweep over h or N");
  converge->add_option("-c,--config", config_path, "Configuration file")->required();
  converge->add_option("--sweep", sweep, "h or N")->required()->check(CLI::IsMember({"h", "N"}));
  converge->add_option("--values", values, "Meshsizes or degrees")->required();
  converge->add_option("--threads", threads, "Worker threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
  converge->add_option("--output-dir", output_dir, "Overrides [output] dir");

  std::string preset_name;
  bool full = false;
  bool print_only = false;
  auto* preset = app.add_subcommand("preset", "Run a built-in scenario");
  preset->add_option("name", preset_name, "Preset name")->required()->check(CLI::IsMember(ew::preset_names()));
  preset->add_flag("--full", full, "Paper-scale cavity parameters");
  preset->add_flag("--print", print_only, "Print the configuration instead of running it");
  preset->add_option("--threads", threads, "Worker threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
  preset->add_option("--output-dir", output_dir, "Overrides [output] dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ew::exit_codes::parse;
  }

  if (threads > 0) ew::set_thread_count(threads);
  ew::RunOptions options;
  if (!output_dir.empty()) options.output_dir = output_dir;

  try {
    if (*run) {
      const auto cfg = load(config_path, options);
      report(ew::run_scenario(cfg, options));
    } else if (*converge) {
      const auto cfg = load(config_path, options);
      const auto kind = sweep == "h" ? ew::SweepKind::MeshSize : ew::SweepKind::Degree;
      const auto s = ew::converge_sweep(cfg, kind, values, options);
      std::cout << std::setprecision(10) << "param,energy_error,l2_error\n";
      for (std::size_t i = 0; i < s.params.size(); ++i) {
        std::cout << s.params[i] << ',' << s.energy_errors[i] << ',' << s.l2_errors[i] << '\n';
      }
      std::cout << (kind == ew::SweepKind::MeshSize ? "slope" : "log-decay per degree") << ": energy "
                << s.energy_fit.slope << " (R2 " << s.energy_fit.r_squared << "), L2 " << s.l2_fit.slope << " (R2 "
                << s.l2_fit.r_squared << ")\n";
    } else {
      const auto cfg = ew::preset(preset_name, full);
      if (print_only) {
        std::cout << ew::serialize_config(cfg);
      } else {
        report(ew::run_scenario(cfg, options));
      }
    }
  } catch (const ConfigLoadError& e) {
    return e.code;
  } catch (const ew::DivergenceError& e) {
    std::cerr << "diverged at step " << e.step() << ": " << e.what() << '\n';
    return ew::exit_codes::divergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ew::exit_code_for(e);
  }
  return ew::exit_codes::ok;
}
