#include "windgame/convergence.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "windgame/csv.hpp"

namespace windgame {

namespace {

VariableStats summarise(const std::vector<double>& means, double historic) {
  const double n = static_cast<double>(means.size());
  VariableStats s;
  s.historic_mean = historic;
  // shifted by the first mean so an ensemble of identical means gives sigma = 0 exactly
  const double shift = means.front();
  double offset = 0.0;
  for (double m : means) offset += m - shift;
  s.mean = shift + offset / n;
  double ss = 0.0;
  for (double m : means) ss += (m - s.mean) * (m - s.mean);
  s.sigma = std::sqrt(ss / (n - 1.0));
  s.wci = confidence_interval_width(s.sigma, means.size());
  for (double m : means) s.max_error_pct = std::max(s.max_error_pct, std::abs(m - historic) / historic * 100.0);
  return s;
}

}  // namespace

SampleMeans sample_means(const Realisation& realisation) {
  SampleMeans m;
  if (realisation.samples.empty()) return m;
  for (const ChainState& s : realisation.samples) {
    m.w1 += s.w1;
    m.w2 += s.w2;
    m.demand += s.demand;
  }
  const double n = static_cast<double>(realisation.samples.size());
  m.w1 /= n;
  m.w2 /= n;
  m.demand /= n;
  return m;
}

SampleMeans historic_means(const JointSeries& series) {
  SampleMeans m;
  if (series.empty()) return m;
  for (const JointRecord& r : series.records) {
    m.w1 += r.w1;
    m.w2 += r.w2;
    m.demand += r.demand;
  }
  const double n = static_cast<double>(series.size());
  m.w1 /= n;
  m.w2 /= n;
  m.demand /= n;
  return m;
}

double student_t_quantile(double p, double dof) {
  const boost::math::students_t_distribution<double> dist(dof);
  return boost::math::quantile(dist, p);
}

double confidence_interval_width(double sigma, std::size_t realisations, double level) {
  if (realisations < 2) throw std::invalid_argument("confidence interval needs at least two realisations");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
  const double n = static_cast<double>(realisations);
  const double t = student_t_quantile(1.0 - (1.0 - level) / 2.0, n - 1.0);
  return 2.0 * t * sigma / std::sqrt(n);
}

StatsReport convergence_stats(std::span<const SampleMeans> means, const SampleMeans& historic) {
  if (means.size() < 2) throw std::invalid_argument("convergence statistics need at least two realisations");
  std::vector<double> w1, w2, d;
  for (const SampleMeans& m : means) {
    w1.push_back(m.w1);
    w2.push_back(m.w2);
    d.push_back(m.demand);
  }
  StatsReport report;
  report.realisations = means.size();
  report.w1 = summarise(w1, historic.w1);
  report.w2 = summarise(w2, historic.w2);
  report.demand = summarise(d, historic.demand);
  return report;
}

StatsReport convergence_stats(std::span<const Realisation> realisations, const JointSeries& historic) {
  std::vector<SampleMeans> means;
  means.reserve(realisations.size());
  for (const Realisation& r : realisations) means.push_back(sample_means(r));
  StatsReport report = convergence_stats(means, historic_means(historic));
  return report;
}

void print_stats_table(std::ostream& out, std::span<const StatsReport> rows) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::left << std::setw(8) << "n" << std::setw(8) << "N";
  for (const char* v : {"w1", "w2", "P_D"}) {
    const std::string name(v);
    out << std::right << std::setw(11) << ("mean " + name) << std::setw(10) << ("sd " + name) << std::setw(10)
        << ("WCI " + name) << std::setw(9) << ("ME " + name);
  }
  out << '\n';
  for (const StatsReport& r : rows) {
    out << std::left << std::setw(8) << r.samples << std::setw(8) << r.realisations << std::right << std::fixed;
    for (const VariableStats* v : {&r.w1, &r.w2, &r.demand}) {
      out << std::setw(11) << std::setprecision(4) << v->mean << std::setw(10) << v->sigma << std::setw(10)
          << v->wci << std::setw(8) << std::setprecision(2) << v->max_error_pct << '%';
    }
    out << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

void write_stats_csv(std::ostream& out, std::span<const StatsReport> rows) {
  out << "n,N,mean_w1,sd_w1,wci_w1,me_w1_pct,mean_w2,sd_w2,wci_w2,me_w2_pct,mean_PD,sd_PD,wci_PD,me_PD_pct\n";
  for (const StatsReport& r : rows) {
    out << r.samples << ',' << r.realisations;
    for (const VariableStats* v : {&r.w1, &r.w2, &r.demand}) {
      out << ',' << csv::format_double(v->mean) << ',' << csv::format_double(v->sigma) << ','
          << csv::format_double(v->wci) << ',' << csv::format_double(v->max_error_pct);
    }
    out << '\n';
  }
}

}  // namespace windgame
