#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "selectmax/analytic.hpp"
#include "selectmax/model.hpp"

namespace selectmax::stats {

/// Sorted-sample view of an empirical distribution.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> samples);

  /// (#samples <= z) / n; right-continuous step function.
  double operator()(double z) const;

  std::size_t size() const { return samples_.size(); }
  std::span<const double> sorted() const { return samples_; }

 private:
  std::vector<double> samples_;
};

/// Asymptotic two-sided Kolmogorov tail P(K >= t) for t = sqrt(n) * D_n.
double kolmogorov_pvalue(double t);

/// Upper-tail chi-square p-value with dof degrees of freedom.
double chi_square_pvalue(double statistic, double dof);

struct KsResult {
  double statistic = 0.0;  // sup-norm distance
  double n = 0.0;          // sample count (effective count for two-sample)
  double p_value = 1.0;
  double alpha = 0.01;
  bool pass = true;  // p_value >= alpha
};

/// One-sample KS test against a continuous law. Throws below 100 samples, and
/// when the law carries an atom at zero (condition the sample on positivity
/// and test the atom mass separately via atom_frequency).
KsResult ks_against(const analytic::AnalyticLaw& law,
                    std::span<const double> samples, double alpha = 0.01);

/// Two-sample KS test; ties are handled by comparing the two step functions
/// only after both have absorbed every sample at each merged value. The
/// p-value uses the effective count n1*n2/(n1+n2).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       double alpha = 0.01);

enum class TestKind { two_sample_ks, chi_square_contingency };

struct IndependenceResult {
  TestKind kind = TestKind::two_sample_ks;
  double statistic = 0.0;
  double p_value = 1.0;
  double corrected_alpha = 0.01;  // alpha after Bonferroni correction
  bool pass = true;
  std::string conditioning;  // which subsets/bins the test compared
};

struct IndependenceReport {
  std::vector<IndependenceResult> tests;
  double alpha = 0.01;  // family-wise level before correction
  bool pass = true;     // every member passes at its corrected level
  std::string note;     // bin widening, skipped degenerate bins, ...
};

/// Independence check of the estimation error against the estimate.
/// Estimates are grouped into the zero atom plus `bins` quantile bins over the
/// positive values; the error populations of every group pair are compared by
/// two-sample KS, and one chi-square contingency test runs over
/// (estimate group) x (error quantile bin). All of them form one Bonferroni
/// family at level alpha. Bins are widened when occupancy would drop below
/// 50. Deterministic given the input.
IndependenceReport test_orthogonality(
    std::span<const model::TrialProjection> pairs, int bins,
    double alpha = 0.01);

/// Conditional-independence check of the error against second_max given the
/// estimate: within each narrow quantile bin of positive estimates, the error
/// populations on either side of the within-bin median of second_max are
/// compared by two-sample KS, Bonferroni-corrected over the tested bins.
/// Degenerate bins (one-sided splits) are skipped and reported in the note.
IndependenceReport test_sufficiency(
    std::span<const model::TrialProjection> tuples, int bins,
    double alpha = 0.01);

struct AtomFrequency {
  double fraction = 0.0;
  double std_error = 0.0;  // binomial standard error
  std::uint64_t count = 0;
  std::uint64_t n = 0;
};

/// Exact-match frequency at an atom value. Atom draws are produced as exact
/// 0.0 by the samplers, so equality comparison is well-defined.
AtomFrequency atom_frequency(std::span<const double> samples,
                             double value = 0.0);

/// Pearson chi-square independence test on an r x c contingency table.
/// Rows or columns with zero total are dropped before computing expectations.
IndependenceResult chi_square_contingency(
    const std::vector<std::vector<std::uint64_t>>& table, double alpha = 0.01,
    std::string conditioning = {});

/// Chi-square goodness-of-fit of observed counts against cell probabilities.
/// Adjacent cells are pooled until every expected count reaches 5.
IndependenceResult chi_square_goodness(std::span<const std::uint64_t> observed,
                                       std::span<const double> expected_probs,
                                       double alpha = 0.01,
                                       std::string conditioning = {});

}  // namespace selectmax::stats
