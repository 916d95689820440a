#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "splithmc/config.hpp"
#include "splithmc/dataset.hpp"
#include "splithmc/diagnostics.hpp"
#include "splithmc/map.hpp"
#include "splithmc/model.hpp"
#include "splithmc/samplers.hpp"
#include "splithmc/targets.hpp"
#include "splithmc/types.hpp"

namespace splithmc {

struct ReportRow {
  std::string sampler;
  int steps = 0;
  double epsilon = 0.0;  // proposal sd for RWM
  double g = 0.0;
  double seconds = 0.0;  // wall seconds per iteration, excluding MAP
  double ap = 0.0;
  double tau = 0.0;
  double tau_g = 0.0;
  double tau_s = 0.0;
  double tau_beta = 0.0;
  double tau_beta_g = 0.0;
  double tau_beta_s = 0.0;
  double map_seconds = 0.0;
  long divergences = 0;
  bool failed = false;
  std::string error;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  double map_seconds = 0.0;
  bool trajectory_length_warning = false;
  std::string warning_text;
};

namespace detail {

struct ChainStats {
  long accepted = 0;
  long attempts = 0;
  long divergences = 0;
  double seconds = 0.0;
};

struct StepOutcome {
  int accepted;
  int attempts;
  bool divergent;
};

/// Runs one chain: step(chain) advances it one iteration and reports
/// (accepted, attempts, divergent); each post-iteration position becomes a
/// sample row. Wall time covers the sampling loop only.
template <typename StepFn>
ChainStats run_chain(ChainState& chain, Matrix& samples, StepFn&& step) {
  ChainStats stats;
  const auto start = std::chrono::steady_clock::now();
  for (Index t = 0; t < samples.rows(); ++t) {
    const StepOutcome o = step(chain);
    stats.accepted += o.accepted;
    stats.attempts += o.attempts;
    stats.divergences += o.divergent ? 1 : 0;
    samples.row(t) = chain.q.transpose();
  }
  stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

inline StepOutcome outcome_of(const IterationResult& r) {
  return {r.accepted ? 1 : 0, 1, r.divergent};
}

inline ReportRow finish_row(const SamplerSpec& spec, const ChainStats& stats,
                            const ScalarSeries& loglik, const ScalarSeries& beta_sq,
                            long iterations, double map_seconds) {
  CostModel cost;
  cost.kind = spec.kind;
  cost.steps = spec.kind == SamplerKind::Rwm ? spec.updates : spec.steps;
  cost.inner_fraction = spec.kind == SamplerKind::SplitData ? spec.inner_fraction : 0.0;
  cost.inner_steps = spec.kind == SamplerKind::SplitData ? spec.inner_steps : 1;
  cost.seconds_per_iteration = stats.seconds / static_cast<double>(iterations);

  ReportRow row;
  row.sampler = spec.name();
  row.steps = cost.steps;
  row.epsilon = spec.kind == SamplerKind::Rwm ? spec.proposal_sd : spec.epsilon;
  row.g = gradient_cost(cost);
  row.seconds = cost.seconds_per_iteration;
  row.ap = static_cast<double>(stats.accepted) / static_cast<double>(stats.attempts);
  row.tau = batch_act(loglik);
  row.tau_beta = batch_act(beta_sq);
  row.tau_g = row.tau * row.g;
  row.tau_s = row.tau * row.seconds;
  row.tau_beta_g = row.tau_beta * row.g;
  row.tau_beta_s = row.tau_beta * row.seconds;
  row.map_seconds = map_seconds;
  row.divergences = stats.divergences;
  return row;
}

template <PotentialModel M>
ChainStats run_sampler_chain(const SamplerSpec& spec, const M& model,
                             const GaussianApprox& approx, const Dataset* dataset,
                             const Prior* prior, ChainState& chain, Matrix& samples) {
  const TrajectoryConfig traj{spec.epsilon, spec.steps, spec.jitter};
  switch (spec.kind) {
    case SamplerKind::Hmc:
      return run_chain(chain, samples, [&](ChainState& c) {
        return outcome_of(hmc_iteration(c, traj, model));
      });
    case SamplerKind::SplitNormal: {
      FlowCache flows(approx);
      return run_chain(chain, samples, [&](ChainState& c) {
        return outcome_of(split_normal_iteration(c, traj, model, approx, flows));
      });
    }
    case SamplerKind::SplitData: {
      if (dataset != nullptr) {
        const SplitPlan plan =
            boundary_split(*dataset, approx.mode, spec.inner_fraction, spec.inner_steps);
        const TermModel inner{PotentialTerm::prior_subset(*dataset, *prior, plan.inner_cases)};
        const TermModel outer{PotentialTerm::data_subset(*dataset, plan.outer_cases)};
        return run_chain(chain, samples, [&](ChainState& c) {
          return outcome_of(
              split_data_iteration(c, traj, model, inner, outer, plan.inner_steps));
        });
      }
      // No cases to split on the built-in Gaussian target; split its
      // potential by weight instead so the nested integrator is exercised.
      const ScaledModel<M> inner{&model, spec.inner_fraction};
      const ScaledModel<M> outer{&model, 1.0 - spec.inner_fraction};
      return run_chain(chain, samples, [&](ChainState& c) {
        return outcome_of(
            split_data_iteration(c, traj, model, inner, outer, spec.inner_steps));
      });
    }
    case SamplerKind::Rwm:
      return run_chain(chain, samples, [&](ChainState& c) {
        const int accepted = rwm_iteration(c, model, spec.proposal_sd, spec.updates);
        return StepOutcome{accepted, spec.updates, false};
      });
  }
  throw Error("run_sampler_chain: unreachable sampler kind");
}

inline void check_trajectory_lengths(const ExperimentConfig& cfg, ExperimentReport& report) {
  double reference = -1.0;
  for (const SamplerSpec& s : cfg.samplers) {
    if (s.kind == SamplerKind::Rwm) continue;
    const double len = s.trajectory_length();
    if (reference < 0.0) {
      reference = len;
    } else if (std::abs(len - reference) > 1e-12 * std::max(1.0, reference)) {
      report.trajectory_length_warning = true;
      report.warning_text =
          "warning: samplers have differing nominal trajectory lengths (epsilon * L); "
          "comparisons usually hold the trajectory length fixed";
      return;
    }
  }
}

}  // namespace detail

/// Runs every configured sampler on the requested data from the posterior
/// mode, and assembles the efficiency report. A failed sampler yields a
/// failed row; the others still run.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentReport report;
  detail::check_trajectory_lengths(cfg, report);
  const long retained = cfg.iterations - cfg.burn_in;

  const bool builtin = cfg.source == DataSource::Bivariate;
  Dataset ds;
  MvNormalModel gaussian;
  GaussianApprox approx;
  TermModel logistic_model{PotentialTerm::likelihood(ds)};  // placeholder, rebuilt below
  Prior prior(cfg.sigma_alpha, cfg.sigma_beta);

  const auto map_start = std::chrono::steady_clock::now();
  if (builtin) {
    gaussian = bivariate_test_target();
    approx = gaussian.approx();
  } else {
    if (cfg.source == DataSource::Csv) {
      ds = load_csv(cfg.csv_path, cfg.label_column);
    } else {
      const auto schedule =
          cfg.sd_schedule.empty() ? default_sd_schedule(cfg.sim_p) : cfg.sd_schedule;
      ds = simulate_logistic(cfg.sim_n, cfg.sim_p, schedule, cfg.seed).data;
    }
    if (cfg.standardize_data) ds = standardize(ds);
    logistic_model = TermModel{PotentialTerm::posterior(ds, prior)};
    approx = find_map(logistic_model.term, Vector::Zero(ds.p() + 1), cfg.map_tol,
                      cfg.map_max_iter);
  }
  report.map_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - map_start).count();

  for (std::size_t i = 0; i < cfg.samplers.size(); ++i) {
    const SamplerSpec& spec = cfg.samplers[i];
    const std::uint64_t chain_seed = Rng::substream(cfg.seed, i + 1);
    try {
      Matrix samples(cfg.iterations, approx.dim());
      detail::ChainStats stats;
      if (builtin) {
        ChainState chain = make_chain(approx.mode, gaussian, chain_seed);
        stats = detail::run_sampler_chain(spec, gaussian, approx, nullptr, nullptr, chain,
                                          samples);
      } else {
        ChainState chain = make_chain(approx.mode, logistic_model, chain_seed);
        stats = detail::run_sampler_chain(spec, logistic_model, approx, &ds, &prior, chain,
                                          samples);
      }
      const Matrix kept = samples.bottomRows(retained);
      ScalarSeries loglik, beta_sq;
      if (builtin) {
        loglik.name = "loglik";
        beta_sq.name = "beta_sq";
        for (Index t = 0; t < kept.rows(); ++t) {
          loglik.values.push_back(-gaussian.value(kept.row(t).transpose()));
          beta_sq.values.push_back(kept.row(t).squaredNorm());
        }
      } else {
        DerivedSeries der = derived_series(kept, ds, cfg.include_intercept);
        loglik = std::move(der.loglik);
        beta_sq = std::move(der.beta_sq);
      }
      report.rows.push_back(detail::finish_row(spec, stats, loglik, beta_sq, cfg.iterations,
                                               report.map_seconds));
    } catch (const std::exception& e) {
      ReportRow row;
      row.sampler = spec.name();
      row.failed = true;
      row.error = e.what();
      report.rows.push_back(row);
    }
  }
  return report;
}

/// Machine-readable report; column set is fixed.
inline void write_report_csv(const ExperimentReport& report, std::ostream& out) {
  out << "sampler,L,epsilon,g,s,AP,tau,tau_g,tau_s,tau_beta,tau_beta_g,tau_beta_s,"
         "map_seconds,divergences\n";
  out.precision(12);
  for (const ReportRow& r : report.rows) {
    if (r.failed) {
      out << r.sampler << ",,,,,,,,,,,,,\n";
      continue;
    }
    out << r.sampler << ',' << r.steps << ',' << r.epsilon << ',' << r.g << ',' << r.seconds
        << ',' << r.ap << ',' << r.tau << ',' << r.tau_g << ',' << r.tau_s << ',' << r.tau_beta
        << ',' << r.tau_beta_g << ',' << r.tau_beta_s << ',' << r.map_seconds << ','
        << r.divergences << '\n';
  }
}

inline void write_report_csv_file(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_report_csv(report, out);
}

/// Human-readable aligned table (one sampler per row).
inline void print_report_table(const ExperimentReport& report, std::ostream& out) {
  const int w = 12;
  out << std::left << std::setw(14) << "sampler" << std::right << std::setw(6) << "L"
      << std::setw(w) << "epsilon" << std::setw(w) << "g" << std::setw(w) << "s" << std::setw(w)
      << "AP" << std::setw(w) << "tau" << std::setw(w) << "tau*g" << std::setw(w) << "tau*s"
      << std::setw(w) << "tau_b" << std::setw(w) << "tau_b*g" << std::setw(w) << "tau_b*s"
      << std::setw(8) << "div" << '\n';
  for (const ReportRow& r : report.rows) {
    if (r.failed) {
      out << std::left << std::setw(14) << r.sampler << "failed: " << r.error << '\n';
      continue;
    }
    out << std::left << std::setw(14) << r.sampler << std::right << std::setw(6) << r.steps
        << std::setw(w) << std::setprecision(4) << r.epsilon << std::setw(w) << r.g
        << std::setw(w) << r.seconds << std::setw(w) << r.ap << std::setw(w) << r.tau
        << std::setw(w) << r.tau_g << std::setw(w) << r.tau_s << std::setw(w) << r.tau_beta
        << std::setw(w) << r.tau_beta_g << std::setw(w) << r.tau_beta_s << std::setw(8)
        << r.divergences << '\n';
  }
  out << "MAP: " << std::setprecision(4) << report.map_seconds << " s\n";
  if (report.trajectory_length_warning) out << report.warning_text << '\n';
}

/// Writes the classic HMC-vs-RWM comparison on the built-in bivariate
/// target: 30 iterations each (HMC: L = 20, eps = 0.15; RWM: 20 updates of
/// sd 0.15 per iteration), both started at the origin, one CSV per chain.
inline void run_figure1(const std::string& out_dir, std::uint64_t seed) {
  const MvNormalModel target = bivariate_test_target();
  const Vector origin = Vector::Zero(2);
  const int iterations = 30;

  const auto write_chain = [&](const std::string& path, auto&& advance) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out.precision(12);
    out << "iteration,q1,q2\n";
    ChainState chain = make_chain(origin, target, seed);
    out << 0 << ',' << chain.q(0) << ',' << chain.q(1) << '\n';
    for (int t = 1; t <= iterations; ++t) {
      advance(chain);
      out << t << ',' << chain.q(0) << ',' << chain.q(1) << '\n';
    }
  };

  const TrajectoryConfig hmc_cfg{0.15, 20, false};
  write_chain(out_dir + "/hmc_trajectory.csv",
              [&](ChainState& c) { hmc_iteration(c, hmc_cfg, target); });
  write_chain(out_dir + "/rwm_trajectory.csv",
              [&](ChainState& c) { rwm_iteration(c, target, 0.15, 20); });
}

}  // namespace splithmc
