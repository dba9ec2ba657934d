#pragma once

#include <functional>
#include <vector>

#include "selectmax/model.hpp"

namespace selectmax::analytic {

/// Evaluable description of a scalar law: continuous density (excluding any
/// atom), CDF and CCDF through independent expressions, mean, and the
/// probability mass sitting exactly at zero.
struct AnalyticLaw {
  std::function<double(double)> pdf;   // continuous part only
  std::function<double(double)> cdf;   // includes the atom mass at 0
  std::function<double(double)> ccdf;
  double mean = 0.0;
  double atom_at_zero = 0.0;
};

/// Rate-distortion function of the Exp(lambda) source under the one-sided
/// error criterion, in nats: -log(lambda*d) for d <= 1/lambda, else 0.
double rdf(double lambda, double d);

/// Distortion of the select-max estimate over k channels: 1/(lambda + k*delta).
double combined_distortion(const model::ModelParams& p);

/// Exp(rate) as an AnalyticLaw.
AnalyticLaw exponential_law(double rate);

/// Law of the select-max estimation error z = x - y_hat: Exp(lambda + k*delta).
AnalyticLaw error_law(const model::ModelParams& p);

/// Marginal law of a single channel output: atom of mass lambda*d at zero plus
/// density (1 - lambda*d) * lambda * exp(-lambda*y) on y > 0.
AnalyticLaw output_marginal(const model::ModelParams& p);

/// Predicted mass P(y_hat = 0) = lambda * combined_distortion(p).
double selectmax_output_atom(const model::ModelParams& p);

/// Single-channel forward CDF F(y|x) = exp(delta*(y-x)) for 0 <= y <= x;
/// 0 below, 1 above.
double channel_cdf(double y, double x, double delta);

/// Conditional CDF of the select-max output, exp(k*delta*(y-x)); equal to
/// channel_cdf(y, x, delta)^k.
double selectmax_channel_cdf(double y, double x, double delta, int k);

enum class Weighting { binomial, paper_literal };

/// Reception-count weighting for erasure runs. theta is the per-description
/// loss probability, k the number of descriptions sent.
struct ErasureWeighting {
  Weighting mode = Weighting::binomial;
  double theta = 0.0;
  int k = 1;
};

/// Weight of each reception count l = 0..k. binomial mode is the
/// Binomial(k, 1-theta) pmf and sums to 1. paper_literal drops the binomial
/// coefficient, theta^(k-l) * (1-theta)^l, and is intentionally not
/// normalized: for k >= 2 the weights do not sum to 1.
std::vector<double> reception_weights(const ErasureWeighting& w);

/// Mixture CCDF of the erasure-run error:
/// sum_l w_l * exp(-(lambda + l*delta) * z).
double erasure_ccdf_sum(double z, const model::ModelParams& p,
                        const ErasureWeighting& w);

/// Geometric closed form of the paper_literal mixture,
///
///   exp(-lambda*z) * (theta^(k+1) - (1-theta)^(k+1) * exp(-delta*(k+1)*z))
///                  / (theta - (1-theta) * exp(-delta*z)),
///
/// evaluated through expm1/log so the removable singularity at
/// theta == (1-theta)*exp(-delta*z) stays finite; within 1e-14 of the
/// singular point it falls back to the term-wise sum.
double erasure_ccdf_closed(double z, const model::ModelParams& p, double theta);

/// A circulating variant of the closed form whose numerator exponents and
/// denominator sign disagree with the series it is meant to collapse. Kept
/// verbatim so reports can quote its deviation; may return non-finite values.
double erasure_ccdf_printed_form(double z, const model::ModelParams& p,
                                 double theta);

/// Mixture density of the erasure-run error:
/// sum_l w_l * (lambda + l*delta) * exp(-(lambda + l*delta) * z).
double erasure_error_pdf(double z, const model::ModelParams& p,
                         const ErasureWeighting& w);

}  // namespace selectmax::analytic
