#pragma once

// Ensemble convergence diagnostics: spread of per-realisation sample means,
// the width of their 95% confidence interval, and the worst relative error
// against the historic record.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>

#include "windgame/gibbs.hpp"
#include "windgame/ingest.hpp"

namespace windgame {

struct SampleMeans {
  double w1 = 0.0;
  double w2 = 0.0;
  double demand = 0.0;
};

SampleMeans sample_means(const Realisation& realisation);
SampleMeans historic_means(const JointSeries& series);

struct VariableStats {
  double mean = 0.0;           // average of per-realisation means
  double sigma = 0.0;          // sample standard deviation of those means
  double wci = 0.0;            // width of the confidence interval of the mean
  double max_error_pct = 0.0;  // max_k |m_k - mu| / mu, percent
  double historic_mean = 0.0;
};

struct StatsReport {
  std::size_t realisations = 0;
  std::size_t samples = 0;  // per realisation, before burn-in
  VariableStats w1;
  VariableStats w2;
  VariableStats demand;
};

// Two-sided Student-t quantile t(p, dof).
double student_t_quantile(double p, double dof);

// 2 * t(1 - (1 - level)/2, N - 1) * sigma / sqrt(N).
double confidence_interval_width(double sigma, std::size_t realisations, double level = 0.95);

// Requires at least two realisations.
StatsReport convergence_stats(std::span<const SampleMeans> means, const SampleMeans& historic);
StatsReport convergence_stats(std::span<const Realisation> realisations, const JointSeries& historic);

// One aligned row per report, in the column order of the published tables.
void print_stats_table(std::ostream& out, std::span<const StatsReport> rows);
void write_stats_csv(std::ostream& out, std::span<const StatsReport> rows);

}  // namespace windgame
