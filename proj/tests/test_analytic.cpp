#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "selectmax/analytic.hpp"
#include "selectmax/model.hpp"
#include "oracles.hpp"

using namespace selectmax;
using analytic::ErasureWeighting;
using analytic::Weighting;

TEST_CASE("rdf is -log(lambda d) inside the distortion range and 0 outside") {
  CHECK(analytic::rdf(1.0, 0.5) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(analytic::rdf(1.0, 0.25) == doctest::Approx(1.3862943611198906).epsilon(1e-15));
  CHECK(analytic::rdf(0.5, 0.1) == doctest::Approx(2.995732273553991).epsilon(1e-15));
  CHECK(analytic::rdf(1.0, 1.0) == 0.0);
  CHECK(analytic::rdf(2.0, 2.0) == 0.0);   // beyond 1/lambda
  CHECK(analytic::rdf(4.0, 10.0) == 0.0);
  CHECK_THROWS_AS(analytic::rdf(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(analytic::rdf(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(analytic::rdf(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("combined_distortion matches 1/(lambda + k delta)") {
  CHECK(analytic::combined_distortion(model::make_params(1.0, 0.5, 1)) == 0.5);
  CHECK(analytic::combined_distortion(model::make_params(1.0, 0.5, 3)) == 0.25);
  CHECK(analytic::combined_distortion(model::make_params(1.0, 0.5, 5)) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-16));
  // lambda=2, d=0.25: delta = 2, so D_2 = 1/(2 + 2*2)
  CHECK(analytic::combined_distortion(model::make_params(2.0, 0.25, 2)) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-16));

  // single channel collapses to the per-channel distortion
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lam(0.1, 4.0);
  std::uniform_real_distribution<double> frac(0.05, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double lambda = lam(rng);
    const double d = frac(rng) / lambda;
    CHECK(analytic::combined_distortion(model::make_params(lambda, d, 1)) ==
          doctest::Approx(d).epsilon(1e-14));
  }
}

TEST_CASE("exponential_law evaluates pdf, cdf, ccdf, and mean consistently") {
  const auto law = analytic::exponential_law(4.0);
  CHECK(law.pdf(0.0) == 4.0);
  CHECK(law.pdf(0.5) == doctest::Approx(0.5413411329464508).epsilon(1e-15));
  CHECK(law.cdf(0.25) == doctest::Approx(0.6321205588285577).epsilon(1e-15));
  CHECK(law.ccdf(0.25) == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  CHECK(law.mean == 0.25);
  CHECK(law.atom_at_zero == 0.0);
  CHECK(law.pdf(-1.0) == 0.0);
  CHECK(law.cdf(-1.0) == 0.0);
  CHECK(law.ccdf(-1.0) == 1.0);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> zs(0.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double z = zs(rng);
    CHECK(law.cdf(z) + law.ccdf(z) == doctest::Approx(1.0).epsilon(1e-15));
  }

  CHECK_THROWS_AS(analytic::exponential_law(0.0), std::invalid_argument);
  CHECK_THROWS_AS(analytic::exponential_law(-1.0), std::invalid_argument);
}

TEST_CASE("exponential_law agrees with quadrature") {
  const auto law = analytic::exponential_law(1.7);
  const double total = oracles::integrate(law.pdf, 0.0, 30.0 / 1.7);
  CHECK(total == doctest::Approx(law.cdf(30.0 / 1.7)).epsilon(1e-9));
  const double mean = oracles::integrate(
      [&](double z) { return z * law.pdf(z); }, 0.0, 40.0 / 1.7);
  CHECK(mean == doctest::Approx(law.mean).epsilon(1e-8));
  CHECK(oracles::derivative(law.cdf, 0.3) ==
        doctest::Approx(law.pdf(0.3)).epsilon(1e-5));
}

TEST_CASE("error_law is Exp(lambda + k delta)") {
  const auto p = model::make_params(1.0, 0.5, 3);
  const auto law = analytic::error_law(p);
  CHECK(law.pdf(0.0) == 4.0);
  CHECK(law.mean == analytic::combined_distortion(p));
  // delta == 0 leaves the source law untouched regardless of k
  const auto p0 = model::make_params(2.0, 0.5, 6);
  CHECK(analytic::error_law(p0).pdf(0.0) == 2.0);
}

TEST_CASE("output_marginal carries the lambda d atom plus a damped source law") {
  const auto p = model::make_params(1.0, 0.5, 3);
  const auto law = analytic::output_marginal(p);
  CHECK(law.atom_at_zero == 0.5);
  CHECK(law.pdf(0.0) == 0.5);
  CHECK(law.cdf(0.0) == 0.5);
  CHECK(law.ccdf(0.0) == 0.5);
  CHECK(law.mean == 0.5);
  CHECK(law.cdf(40.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(law.cdf(-1.0) == 0.0);
  CHECK(law.ccdf(-1.0) == 1.0);

  const double cont_mass = oracles::integrate(law.pdf, 0.0, 40.0);
  CHECK(cont_mass + law.atom_at_zero == doctest::Approx(1.0).epsilon(1e-9));
  const double mean = oracles::integrate(
      [&](double y) { return y * law.pdf(y); }, 0.0, 45.0);
  CHECK(mean == doctest::Approx(law.mean).epsilon(1e-8));
  CHECK(oracles::derivative(law.cdf, 0.8) ==
        doctest::Approx(law.pdf(0.8)).epsilon(1e-5));

  // lambda=0.5, d=1: atom 0.5, mean 1/lambda - d = 1
  const auto law2 = analytic::output_marginal(model::make_params(0.5, 1.0, 2));
  CHECK(law2.atom_at_zero == 0.5);
  CHECK(law2.mean == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("selectmax_output_atom is lambda D_k") {
  const auto p = model::make_params(1.0, 0.5, 3);
  CHECK(analytic::selectmax_output_atom(p) == 0.25);
  CHECK(analytic::selectmax_output_atom(p) ==
        p.lambda * analytic::combined_distortion(p));
  const auto p1 = model::make_params(0.8, 0.6, 1);
  CHECK(analytic::selectmax_output_atom(p1) ==
        doctest::Approx(0.8 * 0.6).epsilon(1e-14));
}

TEST_CASE("channel_cdf clamps outside [0, x] and matches the atom at 0") {
  CHECK(analytic::channel_cdf(-0.1, 2.0, 1.0) == 0.0);
  CHECK(analytic::channel_cdf(2.0, 2.0, 1.0) == 1.0);
  CHECK(analytic::channel_cdf(3.0, 2.0, 1.0) == 1.0);
  CHECK(analytic::channel_cdf(0.0, 2.0, 1.0) ==
        doctest::Approx(0.1353352832366127).epsilon(1e-15));
  CHECK(analytic::channel_cdf(1.0, 2.0, 1.0) ==
        doctest::Approx(0.36787944117144233).epsilon(1e-15));
  // delta == 0: the output is identically 0, so the CDF is 1 on [0, x)
  CHECK(analytic::channel_cdf(0.0, 2.0, 0.0) == 1.0);
  CHECK(analytic::channel_cdf(1.9, 2.0, 0.0) == 1.0);
}

TEST_CASE("selectmax_channel_cdf is the k-th power of the single-channel CDF") {
  CHECK(analytic::selectmax_channel_cdf(0.5, 1.0, 1.0, 3) ==
        doctest::Approx(0.22313016014842982).epsilon(1e-15));
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double x = 5.0 * uni(rng);
    const double y = x * uni(rng);
    const double delta = 4.0 * uni(rng);
    const int k = 1 + int(i % 8);
    const double lhs = analytic::selectmax_channel_cdf(y, x, delta, k);
    const double rhs = std::pow(analytic::channel_cdf(y, x, delta), k);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("reception_weights: binomial mode is the binomial pmf") {
  const auto w = analytic::reception_weights({Weighting::binomial, 0.2, 3});
  REQUIRE(w.size() == 4);
  CHECK(w[0] == doctest::Approx(0.008).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(0.096).epsilon(1e-14));
  CHECK(w[2] == doctest::Approx(0.384).epsilon(1e-14));
  CHECK(w[3] == doctest::Approx(0.512).epsilon(1e-14));
  CHECK(w[0] + w[1] + w[2] + w[3] == doctest::Approx(1.0).epsilon(1e-14));

  const auto w2 = analytic::reception_weights({Weighting::binomial, 0.5, 2});
  CHECK(w2[0] == 0.25);
  CHECK(w2[1] == 0.5);
  CHECK(w2[2] == 0.25);

  // degenerate loss probabilities
  const auto all = analytic::reception_weights({Weighting::binomial, 0.0, 3});
  CHECK(all[3] == 1.0);
  CHECK(all[0] + all[1] + all[2] == 0.0);
  const auto none = analytic::reception_weights({Weighting::binomial, 1.0, 3});
  CHECK(none[0] == 1.0);
}

TEST_CASE("reception_weights: paper_literal drops the binomial coefficient") {
  const auto w = analytic::reception_weights({Weighting::paper_literal, 0.2, 3});
  REQUIRE(w.size() == 4);
  CHECK(w[0] == doctest::Approx(0.008).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(0.032).epsilon(1e-14));
  CHECK(w[2] == doctest::Approx(0.128).epsilon(1e-14));
  CHECK(w[3] == doctest::Approx(0.512).epsilon(1e-14));
  CHECK(w[0] + w[1] + w[2] + w[3] == doctest::Approx(0.68).epsilon(1e-14));

  // k=2, theta=0.5: the sum is 0.75, not 1
  const auto w2 =
      analytic::reception_weights({Weighting::paper_literal, 0.5, 2});
  CHECK(w2[0] == 0.25);
  CHECK(w2[1] == 0.25);
  CHECK(w2[2] == 0.25);

  // k=1 has no dropped coefficient, so the literal weights still sum to 1
  const auto w1 =
      analytic::reception_weights({Weighting::paper_literal, 0.3, 1});
  CHECK(w1[0] + w1[1] == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(analytic::reception_weights({Weighting::binomial, -0.1, 3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(analytic::reception_weights({Weighting::binomial, 1.5, 3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(analytic::reception_weights({Weighting::binomial, 0.2, 0}),
                  std::invalid_argument);
}

TEST_CASE("erasure_ccdf_sum evaluates the mixture term by term") {
  const auto p = model::make_params(1.0, 0.5, 3);
  const ErasureWeighting wb{Weighting::binomial, 0.2, 3};
  const ErasureWeighting wl{Weighting::paper_literal, 0.2, 3};
  CHECK(analytic::erasure_ccdf_sum(0.0, p, wb) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(analytic::erasure_ccdf_sum(0.0, p, wl) == doctest::Approx(0.68).epsilon(1e-14));

  // independent spelling with explicit coefficients at z = 0.5
  const double z = 0.5;
  const double expect_b = 0.008 * std::exp(-1.0 * z) + 0.096 * std::exp(-2.0 * z) +
                          0.384 * std::exp(-3.0 * z) + 0.512 * std::exp(-4.0 * z);
  CHECK(analytic::erasure_ccdf_sum(z, p, wb) ==
        doctest::Approx(expect_b).epsilon(1e-14));
  const double expect_l = 0.008 * std::exp(-1.0 * z) + 0.032 * std::exp(-2.0 * z) +
                          0.128 * std::exp(-3.0 * z) + 0.512 * std::exp(-4.0 * z);
  CHECK(analytic::erasure_ccdf_sum(z, p, wl) ==
        doctest::Approx(expect_l).epsilon(1e-14));

  const ErasureWeighting mismatched{Weighting::binomial, 0.2, 2};
  CHECK_THROWS_AS(analytic::erasure_ccdf_sum(0.0, p, mismatched),
                  std::invalid_argument);
}

TEST_CASE("erasure_ccdf_closed equals the literal sum everywhere") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double lambda = 0.1 + 3.9 * uni(rng);
    const double delta = 4.0 * uni(rng);
    const double d = 1.0 / (lambda + delta);
    const int k = 1 + int(i % 8);
    const auto p = model::make_params(lambda, d, k);
    const double z = 8.0 * uni(rng);
    const double theta = 0.01 + 0.98 * uni(rng);
    const double sum =
        analytic::erasure_ccdf_sum(z, p, {Weighting::paper_literal, theta, k});
    const double closed = analytic::erasure_ccdf_closed(z, p, theta);
    CHECK(std::abs(closed - sum) <= 1e-12);
  }
}

TEST_CASE("erasure_ccdf_closed handles the removable singularity and edges") {
  const auto p = model::make_params(1.0, 0.5, 3);
  // theta == (1-theta) e^{-delta z} at z = 0.3
  const double th = std::exp(-0.3) / (1.0 + std::exp(-0.3));
  const double sum = analytic::erasure_ccdf_sum(
      0.3, p, {Weighting::paper_literal, th, 3});
  CHECK(analytic::erasure_ccdf_closed(0.3, p, th) ==
        doctest::Approx(sum).epsilon(1e-13));
  // just off the singular point the quotient path must stay accurate
  for (double eps : {1e-10, 1e-7, 1e-4}) {
    const double sum_off = analytic::erasure_ccdf_sum(
        0.3, p, {Weighting::paper_literal, th + eps, 3});
    CHECK(analytic::erasure_ccdf_closed(0.3, p, th + eps) ==
          doctest::Approx(sum_off).epsilon(1e-12));
  }
  // z = 0, theta = 0.5 is the singular point of the k=2 form
  const auto p2 = model::make_params(1.0, 0.5, 2);
  CHECK(analytic::erasure_ccdf_closed(0.0, p2, 0.5) ==
        doctest::Approx(0.75).epsilon(1e-14));

  CHECK(analytic::erasure_ccdf_closed(1.0, p, 0.0) ==
        doctest::Approx(std::exp(-4.0)).epsilon(1e-14));
  CHECK(analytic::erasure_ccdf_closed(1.0, p, 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(analytic::erasure_ccdf_closed(1.0, p, -0.2),
                  std::invalid_argument);
  CHECK_THROWS_AS(analytic::erasure_ccdf_closed(1.0, p, 1.2),
                  std::invalid_argument);
}

TEST_CASE("erasure_ccdf_printed_form reproduces the published discrepancy") {
  const auto p = model::make_params(1.0, 0.5, 3);
  // at z=0, theta=0.2: numerator 0.2^4 - 0.8^4 = -0.408, denominator 0.6
  CHECK(analytic::erasure_ccdf_printed_form(0.0, p, 0.2) ==
        doctest::Approx(-0.68).epsilon(1e-14));
  const double sum =
      analytic::erasure_ccdf_sum(0.0, p, {Weighting::paper_literal, 0.2, 3});
  CHECK(sum == doctest::Approx(0.68).epsilon(1e-14));
  // the sign of the value itself is wrong
  CHECK(analytic::erasure_ccdf_printed_form(0.0, p, 0.2) < 0.0);

  // theta = 0.5 at z = 0 hits the 0/0 of the printed denominator
  const auto p2 = model::make_params(1.0, 0.5, 2);
  CHECK(std::isnan(analytic::erasure_ccdf_printed_form(0.0, p2, 0.5)));
}

TEST_CASE("erasure_error_pdf integrates to the weight total") {
  const auto p = model::make_params(1.0, 0.5, 3);
  const ErasureWeighting wb{Weighting::binomial, 0.2, 3};
  const ErasureWeighting wl{Weighting::paper_literal, 0.2, 3};

  const auto p2 = model::make_params(1.0, 0.5, 2);
  CHECK(analytic::erasure_error_pdf(0.0, p2, {Weighting::binomial, 0.5, 2}) ==
        doctest::Approx(2.0).epsilon(1e-14));

  const double total_b = oracles::integrate(
      [&](double z) { return analytic::erasure_error_pdf(z, p, wb); }, 0.0,
      50.0, 1e-11);
  CHECK(total_b == doctest::Approx(1.0).epsilon(1e-7));
  const double total_l = oracles::integrate(
      [&](double z) { return analytic::erasure_error_pdf(z, p, wl); }, 0.0,
      50.0, 1e-11);
  CHECK(total_l == doctest::Approx(0.68).epsilon(1e-7));

  // density is the negative derivative of the mixture CCDF
  const double z0 = 0.7;
  const double num = -oracles::derivative(
      [&](double z) { return analytic::erasure_ccdf_sum(z, p, wb); }, z0);
  CHECK(num == doctest::Approx(analytic::erasure_error_pdf(z0, p, wb)).epsilon(1e-5));
}
