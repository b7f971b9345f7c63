// Command-line front end: simulate / sweep / geneprobe subcommands around the
// experiment harness, plus a plot renderer for the emitted CSVs.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sambandit/config.hpp"
#include "sambandit/harness.hpp"
#include "sambandit/plots.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  int trials = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags.config_path,
                              "experiment config file (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--out", flags.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", flags.seed, "random seed (overrides config)");
  cmd->add_option("--trials", flags.trials,
                  "number of trials (overrides config)");
}

sambandit::ExperimentConfig load_config(const CommonFlags& flags,
                                        const std::string& mode) {
  sambandit::ExperimentConfig cfg;
  if (!flags.config_path.empty())
    cfg = sambandit::ExperimentConfig::load(flags.config_path);
  cfg.mode = mode;
  if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.trials >= 0) cfg.trials = flags.trials;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse contextual bandit experiments under missing covariates"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  CLI::App* sim = app.add_subcommand("simulate", "run policies on the synthetic environment");
  add_common(sim, sim_flags, /*config_required=*/true);

  CommonFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "run the observation-probability grid");
  add_common(sweep, sweep_flags, /*config_required=*/true);

  CommonFlags gene_flags;
  bool raw_counts = false;
  CLI::App* gene = app.add_subcommand("geneprobe", "sequential probe selection on expression data");
  add_common(gene, gene_flags, /*config_required=*/true);
  gene->add_flag("--raw-counts", raw_counts,
                 "apply log(1+x) to the dataset before running");

  std::string plot_csv;
  std::string plot_out = ".";
  CLI::App* plot = app.add_subcommand("plot", "render an SVG chart from a result CSV");
  plot->add_option("csv", plot_csv, "result CSV to render")->required();
  plot->add_option("--out", plot_out, "directory for the SVG output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      const std::string path = sambandit::run_simulate(load_config(sim_flags, "simulate"));
      std::cout << "wrote " << path << "\n";
    } else if (sweep->parsed()) {
      const std::string path = sambandit::run_sweep(load_config(sweep_flags, "sweep"));
      std::cout << "wrote " << path << "\n";
    } else if (gene->parsed()) {
      sambandit::ExperimentConfig cfg = load_config(gene_flags, "geneprobe");
      if (raw_counts) cfg.geneprobe.raw_counts = true;
      const std::string path = sambandit::run_geneprobe(cfg);
      std::cout << "wrote " << path << "\n";
    } else if (plot->parsed()) {
      for (const std::string& path : sambandit::emit_plots(plot_csv, plot_out))
        std::cout << "wrote " << path << "\n";
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
