// Command-line front end. Exit codes: 0 success, 2 usage or configuration
// error, 3 numerical failure.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "spinphonon/config.hpp"
#include "spinphonon/error.hpp"
#include "spinphonon/pipeline.hpp"
#include "spinphonon/simd/kernels.hpp"

namespace sp = spinphonon;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Args {
  std::string config;
  std::string out;
  int jobs = 1;
  std::string format;
  bool oracle = false;
  std::optional<double> separation_lc;
  std::optional<double> gamma_s_over_lambda;
};

sp::ExperimentConfig load(const Args& a) {
  return a.config.empty() ? sp::default_config() : sp::load_config(a.config);
}

int run(const Args& a, sp::Command command) {
  const sp::ExperimentConfig cfg = load(a);
  sp::RunOptions opt;
  opt.out_dir = a.out;
  opt.jobs = a.jobs;
  opt.oracle = a.oracle;
  opt.separation_over_lc = a.separation_lc;
  opt.gamma_s_over_lambda = a.gamma_s_over_lambda;
  if (a.format == "csv") opt.format = sp::OutputFormat::csv;
  else if (a.format == "json") opt.format = sp::OutputFormat::json;
  const sp::RunManifest m = sp::run_pipeline(cfg, command, opt);
  for (const sp::EmittedFile& f : m.files) std::cout << f.name << " " << f.fnv1a << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band-gap phonon mediated spin-spin coupling toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sp::tool_version());

  Args args;
  auto common = [&](CLI::App* sub, bool writes) {
    sub->add_option("--config", args.config, "JSON configuration file")->check(CLI::ExistingFile);
    if (!writes) return;
    sub->add_option("--out", args.out, "Output directory (overrides output.directory)");
    sub->add_option("--jobs", args.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--format", args.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* bands = app.add_subcommand("bands", "Transfer-matrix band structure and edge fits");
  auto* bound = app.add_subcommand("boundstate", "Bound state over the detuning grid, and its envelope");
  auto* spin = app.add_subcommand("spinspin", "Spin-spin coupling versus separation");
  auto* dyn = app.add_subcommand("dynamics", "Two-spin open-system dynamics");
  auto* head = app.add_subcommand("headline", "Coupling chain summary as JSON");
  auto* val = app.add_subcommand("validate", "Validate a configuration and print it with defaults");
  for (CLI::App* s : {bands, bound, spin, dyn, head}) common(s, true);
  common(val, false);
  bound->add_flag("--oracle", args.oracle, "Add the mode-sum envelope column");
  spin->add_flag("--oracle", args.oracle, "Add the k-space quadrature column");
  dyn->add_option("--separation-lc", args.separation_lc, "Spin separation in units of L_c");
  dyn->add_option("--gamma-s-over-lambda", args.gamma_s_over_lambda,
                  "Dephasing rate in units of lambda_eff");
  const std::string simd_help = "Kernel ISA in use: " + std::string(sp::simd::isa_name(sp::simd::active_isa()));
  app.footer(simd_help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*val) {
      const sp::ExperimentConfig cfg = load(args);
      std::cout << sp::to_json(cfg).dump(2) << "\n";
      return 0;
    }
    const std::pair<CLI::App*, sp::Command> table[] = {
        {bands, sp::Command::bands},       {bound, sp::Command::boundstate},
        {spin, sp::Command::spinspin},     {dyn, sp::Command::dynamics},
        {head, sp::Command::headline}};
    for (const auto& [sub, command] : table) {
      if (*sub) return run(args, command);
    }
  } catch (const sp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sp::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sp::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
