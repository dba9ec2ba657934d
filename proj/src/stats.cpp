#include "selectmax/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace selectmax::stats {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples)
    : samples_(std::move(samples)) {
  if (samples_.empty())
    throw std::invalid_argument("empirical cdf needs at least one sample");
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalCdf::operator()(double z) const {
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), z);
  return static_cast<double>(it - samples_.begin()) /
         static_cast<double>(samples_.size());
}

double kolmogorov_pvalue(double t) {
  if (!(t > 0.0)) return 1.0;
  if (t < 0.75) {
    // Small-t representation of the CDF; the direct alternating series would
    // need far more than 100 terms here.
    double s = 0.0;
    const double c = kPi * kPi / (8.0 * t * t);
    for (int j = 1; j <= 100; ++j) {
      const double term = std::exp(-c * (2.0 * j - 1.0) * (2.0 * j - 1.0));
      s += term;
      if (term < 1e-18) break;
    }
    const double cdf = std::sqrt(2.0 * kPi) / t * s;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double s = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * t * t);
    s += sign * term;
    sign = -sign;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

namespace {

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for the upper tail.
double gamma_q_contfrac(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_square_pvalue(double statistic, double dof) {
  if (!(dof > 0.0))
    throw std::invalid_argument("degrees of freedom must be positive");
  if (!(statistic > 0.0)) return 1.0;
  const double a = 0.5 * dof;
  const double x = 0.5 * statistic;
  const double q =
      x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_contfrac(a, x);
  return std::clamp(q, 0.0, 1.0);
}

KsResult ks_against(const analytic::AnalyticLaw& law,
                    std::span<const double> samples, double alpha) {
  if (samples.size() < 100)
    throw std::invalid_argument("ks_against needs at least 100 samples");
  if (law.atom_at_zero > 0.0)
    throw std::invalid_argument(
        "ks_against requires a continuous law; test the atom mass separately");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = law.cdf(x[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  const double p = kolmogorov_pvalue(std::sqrt(n) * d);
  return {d, n, p, alpha, p >= alpha};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       double alpha) {
  if (a.size() < 25 || b.size() < 25)
    throw std::invalid_argument(
        "ks_two_sample needs at least 25 samples per side");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double n1 = static_cast<double>(sa.size());
  const double n2 = static_cast<double>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < sa.size() || j < sb.size()) {
    // absorb every sample tied at the next merged value on both sides before
    // comparing the step functions
    const double v = (i < sa.size() && (j >= sb.size() || sa[i] <= sb[j]))
                         ? sa[i]
                         : sb[j];
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n1 -
                             static_cast<double>(j) / n2));
  }
  const double n_eff = n1 * n2 / (n1 + n2);
  const double p = kolmogorov_pvalue(std::sqrt(n_eff) * d);
  return {d, n_eff, p, alpha, p >= alpha};
}

AtomFrequency atom_frequency(std::span<const double> samples, double value) {
  if (samples.size() < 100)
    throw std::invalid_argument("atom_frequency needs at least 100 samples");
  std::uint64_t count = 0;
  for (double s : samples)
    if (s == value) ++count;
  const auto n = static_cast<std::uint64_t>(samples.size());
  const double frac = static_cast<double>(count) / static_cast<double>(n);
  const double se = std::sqrt(frac * (1.0 - frac) / static_cast<double>(n));
  return {frac, se, count, n};
}

IndependenceResult chi_square_contingency(
    const std::vector<std::vector<std::uint64_t>>& table, double alpha,
    std::string conditioning) {
  if (table.empty() || table.front().empty())
    throw std::invalid_argument("contingency table must be non-empty");
  const std::size_t cols = table.front().size();
  for (const auto& row : table)
    if (row.size() != cols)
      throw std::invalid_argument("contingency table rows must be equal length");

  std::vector<double> row_tot(table.size(), 0.0);
  std::vector<double> col_tot(cols, 0.0);
  double grand = 0.0;
  for (std::size_t r = 0; r < table.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const auto v = static_cast<double>(table[r][c]);
      row_tot[r] += v;
      col_tot[c] += v;
      grand += v;
    }
  std::size_t live_rows = 0;
  std::size_t live_cols = 0;
  for (double v : row_tot) live_rows += v > 0.0;
  for (double v : col_tot) live_cols += v > 0.0;
  if (live_rows < 2 || live_cols < 2)
    throw std::invalid_argument(
        "contingency table needs at least two non-empty rows and columns");

  double stat = 0.0;
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (row_tot[r] == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) {
      if (col_tot[c] == 0.0) continue;
      const double expd = row_tot[r] * col_tot[c] / grand;
      const double diff = static_cast<double>(table[r][c]) - expd;
      stat += diff * diff / expd;
    }
  }
  const double dof = static_cast<double>((live_rows - 1) * (live_cols - 1));
  const double p = chi_square_pvalue(stat, dof);
  return {TestKind::chi_square_contingency, stat, p, alpha, p >= alpha,
          std::move(conditioning)};
}

IndependenceResult chi_square_goodness(std::span<const std::uint64_t> observed,
                                       std::span<const double> expected_probs,
                                       double alpha, std::string conditioning) {
  if (observed.size() != expected_probs.size())
    throw std::invalid_argument("observed and expected lengths must match");
  if (observed.size() < 2)
    throw std::invalid_argument("goodness-of-fit needs at least two cells");
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  const double prob_sum =
      std::accumulate(expected_probs.begin(), expected_probs.end(), 0.0);
  if (!(total > 0.0) || !(prob_sum > 0.0))
    throw std::invalid_argument("counts and probabilities must not be all zero");

  // pool adjacent cells until every expected count reaches 5
  std::vector<double> obs;
  std::vector<double> expd;
  double acc_o = 0.0;
  double acc_e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    acc_o += static_cast<double>(observed[i]);
    acc_e += total * expected_probs[i] / prob_sum;
    if (acc_e >= 5.0) {
      obs.push_back(acc_o);
      expd.push_back(acc_e);
      acc_o = 0.0;
      acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (expd.empty()) {
      obs.push_back(acc_o);
      expd.push_back(acc_e);
    } else {
      obs.back() += acc_o;
      expd.back() += acc_e;
    }
  }
  if (obs.size() < 2)
    throw std::invalid_argument(
        "goodness-of-fit degenerate: fewer than two cells after pooling");

  double stat = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double diff = obs[i] - expd[i];
    stat += diff * diff / expd[i];
  }
  const double dof = static_cast<double>(obs.size() - 1);
  const double p = chi_square_pvalue(stat, dof);
  return {TestKind::chi_square_contingency, stat, p, alpha, p >= alpha,
          std::move(conditioning)};
}

namespace {

// Quantile edges over a sorted sample: edge j sits at index size*j/b.
std::vector<double> quantile_edges(const std::vector<double>& sorted, int b) {
  std::vector<double> edges(static_cast<std::size_t>(b) - 1);
  for (int j = 1; j < b; ++j)
    edges[static_cast<std::size_t>(j) - 1] =
        sorted[sorted.size() * static_cast<std::size_t>(j) /
               static_cast<std::size_t>(b)];
  return edges;
}

int edge_bin(const std::vector<double>& edges, double v) {
  return static_cast<int>(
      std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
}

void check_family_args(std::size_t n, std::size_t minimum, int bins,
                       double alpha, const char* name) {
  if (n < minimum)
    throw std::invalid_argument(std::string(name) + " needs at least " +
                                std::to_string(minimum) + " samples");
  if (bins < 2) throw std::invalid_argument("bins must be at least 2");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");
}

}  // namespace

IndependenceReport test_orthogonality(
    std::span<const model::TrialProjection> pairs, int bins, double alpha) {
  check_family_args(pairs.size(), 10000, bins, alpha, "test_orthogonality");

  std::vector<double> pos;
  pos.reserve(pairs.size());
  std::size_t zeros = 0;
  for (const auto& t : pairs) {
    if (t.estimate == 0.0)
      ++zeros;
    else
      pos.push_back(t.estimate);
  }
  if (pos.size() < 100)
    throw std::invalid_argument(
        "test_orthogonality needs at least 100 positive estimates");
  std::sort(pos.begin(), pos.end());

  IndependenceReport report;
  report.alpha = alpha;

  int b = bins;
  while (b > 2 && pos.size() / static_cast<std::size_t>(b) < 50) --b;
  if (b != bins)
    report.note += "widened positive-estimate bins from " +
                   std::to_string(bins) + " to " + std::to_string(b) +
                   " for occupancy; ";
  const auto edges = quantile_edges(pos, b);

  const bool atom_group = zeros >= 50;
  if (!atom_group && zeros > 0)
    report.note += "zero-estimate atom group skipped (occupancy " +
                   std::to_string(zeros) + " < 50); ";

  const int groups = b + (atom_group ? 1 : 0);
  const int offset = atom_group ? 1 : 0;
  std::vector<std::vector<double>> errs(static_cast<std::size_t>(groups));
  for (const auto& t : pairs) {
    if (t.estimate == 0.0) {
      if (atom_group) errs[0].push_back(t.error);
      continue;
    }
    errs[static_cast<std::size_t>(offset + edge_bin(edges, t.estimate))]
        .push_back(t.error);
  }

  const auto label = [&](int g) -> std::string {
    if (atom_group && g == 0) return "estimate==0";
    return "estimate_bin" + std::to_string(g - offset);
  };

  // Bonferroni family: every pairwise KS plus the one contingency test.
  const int m = groups * (groups - 1) / 2 + 1;
  const double corrected = alpha / m;
  for (int g1 = 0; g1 < groups; ++g1)
    for (int g2 = g1 + 1; g2 < groups; ++g2) {
      const KsResult ks = ks_two_sample(errs[static_cast<std::size_t>(g1)],
                                        errs[static_cast<std::size_t>(g2)],
                                        corrected);
      report.tests.push_back({TestKind::two_sample_ks, ks.statistic,
                              ks.p_value, corrected, ks.pass,
                              label(g1) + " vs " + label(g2)});
    }

  // chi-square over (estimate group) x (error quantile bin)
  std::vector<double> all_err;
  for (const auto& e : errs) all_err.insert(all_err.end(), e.begin(), e.end());
  std::sort(all_err.begin(), all_err.end());
  const auto err_edges = quantile_edges(all_err, b);
  std::vector<std::vector<std::uint64_t>> table(
      static_cast<std::size_t>(groups),
      std::vector<std::uint64_t>(static_cast<std::size_t>(b), 0));
  for (int g = 0; g < groups; ++g)
    for (double e : errs[static_cast<std::size_t>(g)])
      ++table[static_cast<std::size_t>(g)]
             [static_cast<std::size_t>(edge_bin(err_edges, e))];
  report.tests.push_back(chi_square_contingency(
      table, corrected, "estimate groups x error quantile bins"));

  report.pass = std::all_of(report.tests.begin(), report.tests.end(),
                            [](const IndependenceResult& r) { return r.pass; });
  return report;
}

IndependenceReport test_sufficiency(
    std::span<const model::TrialProjection> tuples, int bins, double alpha) {
  check_family_args(tuples.size(), 100000, bins, alpha, "test_sufficiency");

  std::vector<double> pos;
  pos.reserve(tuples.size());
  for (const auto& t : tuples)
    if (t.estimate > 0.0) pos.push_back(t.estimate);
  if (pos.size() < 200)
    throw std::invalid_argument(
        "test_sufficiency needs at least 200 positive estimates");
  std::sort(pos.begin(), pos.end());

  IndependenceReport report;
  report.alpha = alpha;

  int b = bins;
  while (b > 2 && pos.size() / static_cast<std::size_t>(b) < 100) --b;
  if (b != bins)
    report.note += "widened estimate bins from " + std::to_string(bins) +
                   " to " + std::to_string(b) + " for occupancy; ";
  const auto edges = quantile_edges(pos, b);

  struct Member {
    double second_max;
    double error;
  };
  std::vector<std::vector<Member>> by_bin(static_cast<std::size_t>(b));
  for (const auto& t : tuples) {
    if (t.estimate <= 0.0) continue;
    by_bin[static_cast<std::size_t>(edge_bin(edges, t.estimate))].push_back(
        {t.second_max, t.error});
  }

  struct Raw {
    KsResult ks;
    std::string label;
  };
  std::vector<Raw> raws;
  for (int j = 0; j < b; ++j) {
    auto& bin = by_bin[static_cast<std::size_t>(j)];
    const std::string name = "estimate_bin" + std::to_string(j);
    if (bin.size() < 100) {
      report.note += name + " skipped (occupancy " +
                     std::to_string(bin.size()) + " < 100); ";
      continue;
    }
    std::vector<double> sm(bin.size());
    for (std::size_t i = 0; i < bin.size(); ++i) sm[i] = bin[i].second_max;
    std::nth_element(sm.begin(), sm.begin() + static_cast<std::ptrdiff_t>(sm.size() / 2), sm.end());
    const double med = sm[sm.size() / 2];
    std::vector<double> lower;
    std::vector<double> upper;
    for (const auto& mbr : bin)
      (mbr.second_max <= med ? lower : upper).push_back(mbr.error);
    if (lower.size() < 50 || upper.size() < 50) {
      report.note += name + " skipped (one-sided second_max split); ";
      continue;
    }
    raws.push_back({ks_two_sample(lower, upper, alpha),
                    name + " split at second_max median"});
  }
  if (raws.empty())
    throw std::invalid_argument(
        "test_sufficiency found no splittable bins (needs k >= 2 and varying "
        "second_max)");

  const double corrected = alpha / static_cast<double>(raws.size());
  for (auto& raw : raws)
    report.tests.push_back({TestKind::two_sample_ks, raw.ks.statistic,
                            raw.ks.p_value, corrected,
                            raw.ks.p_value >= corrected, std::move(raw.label)});
  report.pass = std::all_of(report.tests.begin(), report.tests.end(),
                            [](const IndependenceResult& r) { return r.pass; });
  return report;
}

}  // namespace selectmax::stats
