#include "selectmax/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace selectmax::analytic {

double rdf(double lambda, double d) {
  if (!std::isfinite(lambda) || !(lambda > 0.0))
    throw std::invalid_argument("lambda must be positive and finite");
  if (!std::isfinite(d) || !(d > 0.0))
    throw std::invalid_argument("distortion must be positive and finite");
  const double ld = lambda * d;
  return ld >= 1.0 ? 0.0 : -std::log(ld);
}

double combined_distortion(const model::ModelParams& p) {
  return 1.0 / (p.lambda + p.k * p.delta);
}

AnalyticLaw exponential_law(double rate) {
  if (!std::isfinite(rate) || !(rate > 0.0))
    throw std::invalid_argument("rate must be positive and finite");
  AnalyticLaw law;
  law.pdf = [rate](double z) { return z < 0.0 ? 0.0 : rate * std::exp(-rate * z); };
  law.cdf = [rate](double z) { return z < 0.0 ? 0.0 : -std::expm1(-rate * z); };
  law.ccdf = [rate](double z) { return z < 0.0 ? 1.0 : std::exp(-rate * z); };
  law.mean = 1.0 / rate;
  law.atom_at_zero = 0.0;
  return law;
}

AnalyticLaw error_law(const model::ModelParams& p) {
  return exponential_law(p.lambda + p.k * p.delta);
}

AnalyticLaw output_marginal(const model::ModelParams& p) {
  const double lambda = p.lambda;
  const double atom = lambda * p.d;
  const double w = 1.0 - atom;  // mass of the continuous part
  AnalyticLaw law;
  law.pdf = [lambda, w](double y) {
    return y < 0.0 ? 0.0 : w * lambda * std::exp(-lambda * y);
  };
  law.cdf = [lambda, atom, w](double y) {
    return y < 0.0 ? 0.0 : atom - w * std::expm1(-lambda * y);
  };
  law.ccdf = [lambda, w](double y) {
    return y < 0.0 ? 1.0 : w * std::exp(-lambda * y);
  };
  law.mean = w / lambda;
  law.atom_at_zero = atom;
  return law;
}

double selectmax_output_atom(const model::ModelParams& p) {
  return p.lambda * combined_distortion(p);
}

double channel_cdf(double y, double x, double delta) {
  if (y < 0.0) return 0.0;
  if (y >= x) return 1.0;
  return std::exp(delta * (y - x));
}

double selectmax_channel_cdf(double y, double x, double delta, int k) {
  if (y < 0.0) return 0.0;
  if (y >= x) return 1.0;
  return std::exp(k * delta * (y - x));
}

std::vector<double> reception_weights(const ErasureWeighting& w) {
  if (!std::isfinite(w.theta) || w.theta < 0.0 || w.theta > 1.0)
    throw std::invalid_argument("theta must lie in [0, 1]");
  if (w.k < 1)
    throw std::invalid_argument("channel count must be at least 1");
  std::vector<double> out(static_cast<std::size_t>(w.k) + 1);
  double binom = 1.0;  // C(k, l), exact in double at desk-scale k
  for (int l = 0; l <= w.k; ++l) {
    const double base = std::pow(w.theta, w.k - l) * std::pow(1.0 - w.theta, l);
    out[static_cast<std::size_t>(l)] =
        w.mode == Weighting::binomial ? binom * base : base;
    binom = binom * (w.k - l) / (l + 1);
  }
  return out;
}

double erasure_ccdf_sum(double z, const model::ModelParams& p,
                        const ErasureWeighting& w) {
  if (w.k != p.k)
    throw std::invalid_argument("weighting channel count must match params");
  const auto weights = reception_weights(w);
  double s = 0.0;
  for (int l = 0; l <= w.k; ++l)
    s += weights[static_cast<std::size_t>(l)] *
         std::exp(-(p.lambda + l * p.delta) * z);
  return s;
}

double erasure_ccdf_closed(double z, const model::ModelParams& p, double theta) {
  if (!std::isfinite(theta) || theta < 0.0 || theta > 1.0)
    throw std::invalid_argument("theta must lie in [0, 1]");
  const int k = p.k;
  const double decay = std::exp(-p.delta * z);
  if (std::abs(theta - (1.0 - theta) * decay) < 1e-14) {
    // removable singularity of the geometric form; the term-wise sum is exact
    return erasure_ccdf_sum(z, p, {Weighting::paper_literal, theta, k});
  }
  if (theta == 0.0) return std::exp(-(p.lambda + k * p.delta) * z);

  // The quotient collapses to the partial geometric sum
  //   theta^k * sum_{l=0}^{k} r^l,  r = (1-theta)*exp(-delta*z)/theta,
  // evaluated as expm1((k+1)*log r)/expm1(log r). For r > 1 the same sum is
  // taken in powers of 1/r so every intermediate stays bounded.
  const double r = (1.0 - theta) * decay / theta;
  double scale;  // theta^k * sum r^l == scale * expm1-ratio
  double t;      // log of the geometric argument actually summed
  if (r <= 1.0) {
    scale = std::pow(theta, k);
    t = std::log(r);
  } else {
    scale = std::pow((1.0 - theta) * decay, k);
    t = -std::log(r);
  }
  double ratio;
  if (r == 0.0) {
    ratio = 1.0;
  } else if (std::abs(t) < 1e-12) {
    ratio = k + 1.0;
  } else {
    ratio = std::expm1((k + 1.0) * t) / std::expm1(t);
  }
  return std::exp(-p.lambda * z) * scale * ratio;
}

double erasure_ccdf_printed_form(double z, const model::ModelParams& p,
                                 double theta) {
  const int k = p.k;
  const double num =
      std::exp(z * (p.delta - p.lambda)) * std::pow(theta, k + 1) -
      std::exp(z * (p.delta * k + p.lambda)) * std::pow(1.0 - theta, k + 1);
  const double den = 1.0 - theta * (1.0 + std::exp(p.delta * z));
  return num / den;
}

double erasure_error_pdf(double z, const model::ModelParams& p,
                         const ErasureWeighting& w) {
  if (w.k != p.k)
    throw std::invalid_argument("weighting channel count must match params");
  const auto weights = reception_weights(w);
  double s = 0.0;
  for (int l = 0; l <= w.k; ++l) {
    const double rate = p.lambda + l * p.delta;
    s += weights[static_cast<std::size_t>(l)] * rate * std::exp(-rate * z);
  }
  return s;
}

}  // namespace selectmax::analytic
