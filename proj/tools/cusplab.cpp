#include "cusplab/commands.hpp"
#include "cusplab/parallel.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
  auto* opt = sub->add_option("-c,--config", c.config, "JSON configuration file")
                  ->check(CLI::ExistingFile);
  if (config_required) opt->required();
  sub->add_option("-o,--out", c.out, "Output file (default: config output.path, else stdout)");
  sub->add_option("-f,--format", c.format, "json, csv or table");
  sub->add_option("-s,--seed", c.seed, "Override the configuration seed");
  sub->add_option("-j,--threads", c.threads, "Worker threads (default: CUSPLAB_THREADS)")
      ->check(CLI::PositiveNumber);
}

cusplab::RunConfig resolve(const Common& c) {
  cusplab::RunConfig cfg;
  if (!c.config.empty()) {
    cfg = cusplab::load_config(c.config, c.seed);
  } else {
    cfg.hash = fmt::format("{:016x}", cusplab::fnv1a64("{}"));
    if (c.seed) cfg.seed = *c.seed;
  }
  if (!c.format.empty()) cfg.format = cusplab::parse_format(c.format);
  if (!c.out.empty()) cfg.out_path = c.out;
  if (c.threads > 0) cusplab::set_thread_count(c.threads);
  return cfg;
}

int emit(const cusplab::RunConfig& cfg,
         int (*command)(const cusplab::RunConfig&, std::ostream&)) {
  if (!cfg.out_path) return command(cfg, std::cout);
  std::ofstream file(*cfg.out_path, std::ios::binary);
  if (!file) throw cusplab::ConfigError(*cfg.out_path, "cannot open output file");
  return command(cfg, file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nucleus cusp and derivative checks for atomic wavefunctions"};
  app.set_version_flag("--version", std::string(CUSPLAB_VERSION));
  app.require_subcommand(1);

  Common report_opts, sphere_opts, jastrow_opts, converge_opts;
  auto* report = app.add_subcommand("report", "Derivatives, cusp relations and bounds at the nucleus");
  add_common(report, report_opts, true);
  auto* sphere = app.add_subcommand("sphere-check", "Second-moment residuals of the sphere rules");
  add_common(sphere, sphere_opts, false);
  std::vector<int> degrees;
  int trials = 0;
  sphere->add_option("--degrees", degrees, "Rule degrees (default 3 7 17 29)");
  sphere->add_option("--trials", trials, "Random vectors and matrices per rule")
      ->check(CLI::PositiveNumber);
  auto* jastrow = app.add_subcommand("jastrow-check", "Cutoff Jastrow identities and a priori bounds");
  add_common(jastrow, jastrow_opts, true);
  auto* conv = app.add_subcommand("converge", "Convergence study of the density at the nucleus");
  add_common(conv, converge_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cusplab::exit_config_error;
  }

  return cusplab::run_guarded(
      [&]() -> int {
        if (report->parsed()) return emit(resolve(report_opts), cusplab::cmd_report);
        if (sphere->parsed()) {
          auto cfg = resolve(sphere_opts);
          if (!degrees.empty()) cfg.sphere_check.degrees = degrees;
          if (trials > 0) cfg.sphere_check.trials = trials;
          return emit(cfg, cusplab::cmd_sphere_check);
        }
        if (jastrow->parsed()) return emit(resolve(jastrow_opts), cusplab::cmd_jastrow_check);
        return emit(resolve(converge_opts), cusplab::cmd_converge);
      },
      std::cerr);
}
