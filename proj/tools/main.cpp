#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "splithmc/config.hpp"
#include "splithmc/dataset.hpp"
#include "splithmc/experiment.hpp"

namespace {

int run_command(const std::string& config_path, bool have_seed, std::uint64_t seed,
                long iterations, long burn_in, const std::string& output,
                const std::string& label_column) {
  splithmc::ExperimentConfig cfg = splithmc::parse_config_file(config_path);
  if (have_seed) cfg.seed = seed;
  if (iterations >= 0) cfg.iterations = iterations;
  if (burn_in >= 0) cfg.burn_in = burn_in;
  if (!output.empty()) cfg.output_path = output;
  if (!label_column.empty()) cfg.label_column = label_column;

  const splithmc::ExperimentReport report = splithmc::run_experiment(cfg);
  if (report.trajectory_length_warning) std::cerr << report.warning_text << '\n';
  splithmc::print_report_table(report, std::cout);
  splithmc::write_report_csv_file(report, cfg.output_path);
  std::cout << "report written to " << cfg.output_path << '\n';

  for (const auto& row : report.rows) {
    if (row.failed) {
      std::cerr << "sampler " << row.sampler << " failed: " << row.error << '\n';
      return 1;
    }
  }
  return 0;
}

int simulate_command(long n, long p, std::uint64_t seed, const std::string& out_path) {
  const auto schedule = splithmc::default_sd_schedule(p);
  const auto sim = splithmc::simulate_logistic(n, p, schedule, seed);
  splithmc::save_csv(sim.data, out_path);
  std::cout << "wrote " << sim.data.n() << " cases, " << sim.data.p() << " covariates to "
            << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split Hamiltonian Monte Carlo benchmark harness for Bayesian logistic regression"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  bool have_seed = false;
  long iterations = -1;
  long burn_in = -1;
  std::string output;
  std::string label_column;

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
    have_seed = true;
  });
  run->add_option("--iterations", iterations, "override the iteration count");
  run->add_option("--burn-in", burn_in, "samples to discard before diagnostics");
  run->add_option("--output", output, "report CSV path");
  run->add_option("--label-column", label_column, "label column name for csv data");

  long sim_n = 0;
  long sim_p = 0;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "write a simulated logistic dataset as CSV");
  simulate->add_option("n", sim_n, "cases")->required();
  simulate->add_option("p", sim_p, "covariates")->required();
  simulate->add_option("seed", sim_seed, "rng seed")->required();
  simulate->add_option("out", sim_out, "output CSV path")->required();

  std::string fig_dir;
  std::uint64_t fig_seed = 1;
  auto* figure1 = app.add_subcommand("figure1", "write HMC and RWM demo trajectories as CSV");
  figure1->add_option("out-dir", fig_dir, "output directory")->required();
  figure1->add_option("--seed", fig_seed, "rng seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return run_command(config_path, have_seed, seed, iterations, burn_in, output, label_column);
    }
    if (*simulate) {
      if (sim_n < 1 || sim_p < 1) {
        std::cerr << "simulate: n and p must be positive\n";
        return 1;
      }
      return simulate_command(sim_n, sim_p, sim_seed, sim_out);
    }
    if (*figure1) {
      splithmc::run_figure1(fig_dir, fig_seed);
      std::cout << "trajectories written to " << fig_dir << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
