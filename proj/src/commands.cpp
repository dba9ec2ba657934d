#include "selectmax/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>

#include "selectmax/model.hpp"
#include "selectmax/montecarlo.hpp"
#include "selectmax/numfmt.hpp"
#include "selectmax/report.hpp"
#include "selectmax/stats.hpp"

namespace selectmax::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kGridPoints = 200;

double elapsed_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double empirical_ccdf(const std::vector<double>& sorted, double z) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), z);
  return static_cast<double>(sorted.end() - it) /
         static_cast<double>(sorted.size());
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ", ";
    out += p;
  }
  return out;
}

void write_manifest(const fs::path& dir, const std::string& subcommand,
                    const json& parameters,
                    const std::vector<std::string>& outputs,
                    const std::string& started, double elapsed) {
  json m;
  m["subcommand"] = subcommand;
  m["version"] = kToolVersion;
  m["started_utc"] = started;
  m["finished_utc"] = report::timestamp_utc();
  m["elapsed_seconds"] = elapsed;
  m["parameters"] = parameters;
  m["outputs"] = outputs;
  report::write_file(dir / "manifest.json", report::dump_json(m));
}

json params_json(const model::ModelParams& p, std::uint64_t samples,
                 std::uint64_t seed) {
  return json{{"lambda", p.lambda}, {"distortion", p.d},
              {"channels", p.k},    {"delta", p.delta},
              {"samples", samples}, {"seed", seed}};
}

int lemma1_impl(const Lemma1Options& o) {
  const std::string started = report::timestamp_utc();
  const auto t0 = Clock::now();
  const auto params = model::make_params(o.lambda, o.distortion, o.channels);

  mc::BatchConfig cfg;
  cfg.params = params;
  cfg.n_trials = o.samples;
  cfg.seed = o.seed;
  cfg.record_errors = true;
  cfg.workers = o.workers;
  auto batch = mc::run_batch(cfg);

  const auto law = analytic::error_law(params);
  const auto ks = stats::ks_against(law, batch.errors, 0.01);
  const double dk = analytic::combined_distortion(params);
  const double se = dk / std::sqrt(static_cast<double>(batch.summary.n));
  const double mean_dev = std::abs(batch.summary.mean_error - dk);
  const bool mean_ok = mean_dev <= 3.0 * se;
  const bool pass = ks.pass && mean_ok;

  std::sort(batch.errors.begin(), batch.errors.end());
  const double rate = params.lambda + params.k * params.delta;
  const double z_max = std::log(1e4) / rate;
  std::string csv = "z,empirical_ccdf,analytic_ccdf\n";
  for (int i = 0; i < kGridPoints; ++i) {
    const double z = z_max * i / (kGridPoints - 1.0);
    csv += format_double(z) + ',' +
           format_double(empirical_ccdf(batch.errors, z)) + ',' +
           format_double(law.ccdf(z)) + '\n';
  }

  json rep;
  rep["subcommand"] = "verify-lemma1";
  rep["version"] = kToolVersion;
  rep["params"] = params_json(params, o.samples, o.seed);
  rep["expected"] = {{"error_rate", rate},
                     {"combined_distortion", dk},
                     {"error_variance", dk * dk},
                     {"estimate_atom", analytic::selectmax_output_atom(params)},
                     {"per_channel_atom", params.lambda * params.d}};
  rep["observed"] = {{"mean_error", batch.summary.mean_error},
                     {"var_error", batch.summary.var_error},
                     {"atom_freq_estimate", batch.summary.atom_freq_estimate},
                     {"per_channel_atom_freq", batch.summary.per_channel_atom_freq}};
  rep["checks"] = {{"ks", ks},
                   {"mean",
                    {{"deviation", mean_dev},
                     {"std_error", se},
                     {"limit_se", 3.0},
                     {"pass", mean_ok}}}};
  rep["pass"] = pass;

  const fs::path dir(o.out);
  report::write_file(dir / "lemma1_report.json", report::dump_json(rep));
  report::write_file(dir / "lemma1_ccdf.csv", csv);
  json mparams = params_json(params, o.samples, o.seed);
  mparams["workers"] = o.workers;
  write_manifest(dir, "verify-lemma1", mparams,
                 {"lemma1_report.json", "lemma1_ccdf.csv"}, started,
                 elapsed_since(t0));

  std::cout << "verify-lemma1 lambda=" << format_double(params.lambda)
            << " d=" << format_double(params.d) << " k=" << params.k
            << " n=" << o.samples << " seed=" << o.seed << "\n"
            << "  ks: D=" << format_double(ks.statistic)
            << " p=" << format_double(ks.p_value) << " (alpha=0.01) -> "
            << (ks.pass ? "pass" : "FAIL") << "\n"
            << "  mean: observed=" << format_double(batch.summary.mean_error)
            << " expected=" << format_double(dk) << " dev="
            << format_double(se > 0.0 ? mean_dev / se : 0.0) << "se -> "
            << (mean_ok ? "pass" : "FAIL") << "\n"
            << "  artifacts: " << (dir / "lemma1_report.json").string() << ' '
            << (dir / "lemma1_ccdf.csv").string() << "\n";
  std::vector<std::string> failing;
  if (!ks.pass) failing.push_back("ks");
  if (!mean_ok) failing.push_back("mean");
  if (pass)
    std::cout << "verify-lemma1: PASS\n";
  else
    std::cout << "verify-lemma1: FAIL (" << join(failing) << ")\n";
  return pass ? 0 : 1;
}

int independence_impl(const IndependenceOptions& o) {
  const std::string started = report::timestamp_utc();
  const auto t0 = Clock::now();
  const auto params = model::make_params(o.lambda, o.distortion, o.channels);
  if (o.bins < 2) throw std::invalid_argument("bins must be at least 2");

  mc::BatchConfig cfg;
  cfg.params = params;
  cfg.n_trials = o.samples;
  cfg.seed = o.seed;
  cfg.record_full = true;
  cfg.workers = o.workers;
  const auto batch = mc::run_batch(cfg);
  const auto tuples = mc::paired_samples_for_independence(batch.records);

  const auto ortho = stats::test_orthogonality(tuples, o.bins, 0.01);
  std::optional<stats::IndependenceReport> suff;
  if (params.k >= 2) suff = stats::test_sufficiency(tuples, o.bins, 0.01);
  const bool pass = ortho.pass && (!suff || suff->pass);

  json rep;
  rep["subcommand"] = "verify-independence";
  rep["version"] = kToolVersion;
  rep["params"] = params_json(params, o.samples, o.seed);
  rep["params"]["bins"] = o.bins;
  rep["orthogonality"] = ortho;
  if (suff)
    rep["sufficiency"] = *suff;
  else
    rep["sufficiency"] = nullptr;
  rep["pass"] = pass;

  const fs::path dir(o.out);
  report::write_file(dir / "independence_report.json", report::dump_json(rep));
  json mparams = params_json(params, o.samples, o.seed);
  mparams["bins"] = o.bins;
  mparams["workers"] = o.workers;
  write_manifest(dir, "verify-independence", mparams,
                 {"independence_report.json"}, started, elapsed_since(t0));

  const auto min_p = [](const stats::IndependenceReport& r) {
    double m = 1.0;
    for (const auto& t : r.tests) m = std::min(m, t.p_value);
    return m;
  };
  std::cout << "verify-independence lambda=" << format_double(params.lambda)
            << " d=" << format_double(params.d) << " k=" << params.k
            << " n=" << o.samples << " seed=" << o.seed << " bins=" << o.bins
            << "\n"
            << "  orthogonality: " << ortho.tests.size()
            << " tests, min p=" << format_double(min_p(ortho)) << " -> "
            << (ortho.pass ? "pass" : "FAIL") << "\n";
  if (suff)
    std::cout << "  sufficiency: " << suff->tests.size()
              << " tests, min p=" << format_double(min_p(*suff)) << " -> "
              << (suff->pass ? "pass" : "FAIL") << "\n";
  else
    std::cout << "  sufficiency: skipped (needs k >= 2)\n";
  std::cout << "  artifacts: " << (dir / "independence_report.json").string()
            << "\n";
  std::vector<std::string> failing;
  if (!ortho.pass) failing.push_back("orthogonality");
  if (suff && !suff->pass) failing.push_back("sufficiency");
  if (pass)
    std::cout << "verify-independence: PASS\n";
  else
    std::cout << "verify-independence: FAIL (" << join(failing) << ")\n";
  return pass ? 0 : 1;
}

int erasure_impl(const ErasureOptions& o) {
  const std::string started = report::timestamp_utc();
  const auto t0 = Clock::now();
  const auto params = model::make_params(o.lambda, o.distortion, o.channels);
  const char* mode_name =
      o.weighting == analytic::Weighting::binomial ? "binomial" : "paper-literal";

  mc::BatchConfig cfg;
  cfg.params = params;
  cfg.n_trials = o.samples;
  cfg.seed = o.seed;
  cfg.theta = o.theta;
  cfg.record_errors = true;
  cfg.workers = o.workers;
  auto batch = mc::run_batch(cfg);
  std::sort(batch.errors.begin(), batch.errors.end());

  const analytic::ErasureWeighting wb{analytic::Weighting::binomial, o.theta,
                                      params.k};
  const analytic::ErasureWeighting wl{analytic::Weighting::paper_literal,
                                      o.theta, params.k};
  const auto weights_b = analytic::reception_weights(wb);
  const auto weights_l = analytic::reception_weights(wl);
  double literal_sum = 0.0;
  for (double w : weights_l) literal_sum += w;

  const double z_max = std::log(1e4) / params.lambda;
  std::string csv =
      "z,empirical_ccdf,binomial_ccdf,paper_literal_ccdf,printed_closed_form\n";
  double dev_b = 0.0;
  double dev_l = 0.0;
  double dev_closed = 0.0;
  double dev_printed = 0.0;
  bool printed_any_finite = false;
  for (int i = 0; i < kGridPoints; ++i) {
    const double z = z_max * i / (kGridPoints - 1.0);
    const double emp = empirical_ccdf(batch.errors, z);
    const double cb = analytic::erasure_ccdf_sum(z, params, wb);
    const double cl = analytic::erasure_ccdf_sum(z, params, wl);
    const double closed = analytic::erasure_ccdf_closed(z, params, o.theta);
    const double printed = analytic::erasure_ccdf_printed_form(z, params, o.theta);
    dev_b = std::max(dev_b, std::abs(emp - cb));
    dev_l = std::max(dev_l, std::abs(emp - cl));
    dev_closed = std::max(dev_closed, std::abs(closed - cl));
    if (std::isfinite(printed)) {
      printed_any_finite = true;
      dev_printed = std::max(dev_printed, std::abs(printed - cl));
    }
    csv += format_double(z) + ',' + format_double(emp) + ',' +
           format_double(cb) + ',' + format_double(cl) + ',' +
           format_double(printed) + '\n';
  }
  const double printed_at_zero =
      analytic::erasure_ccdf_printed_form(0.0, params, o.theta);
  const double literal_at_zero = analytic::erasure_ccdf_sum(0.0, params, wl);

  const double dev_selected =
      o.weighting == analytic::Weighting::binomial ? dev_b : dev_l;
  const double tol = 3.0 / std::sqrt(static_cast<double>(batch.summary.n));
  const bool pass = dev_selected <= tol;

  const auto gof = stats::chi_square_goodness(
      batch.summary.reception_histogram, weights_b, 0.01,
      "reception counts vs binomial pmf");

  json rep;
  rep["subcommand"] = "erasure";
  rep["version"] = kToolVersion;
  rep["params"] = params_json(params, o.samples, o.seed);
  rep["params"]["theta"] = o.theta;
  rep["params"]["weighting"] = mode_name;
  rep["weights"] = {{"binomial", weights_b},
                    {"paper_literal", weights_l},
                    {"paper_literal_sum", literal_sum}};
  rep["grid"] = {{"points", kGridPoints},
                 {"z_max", z_max},
                 {"tolerance", tol},
                 {"max_abs_dev_binomial", dev_b},
                 {"max_abs_dev_paper_literal", dev_l},
                 {"max_abs_dev_selected", dev_selected}};
  rep["closed_form"] = {{"max_abs_diff_vs_literal_sum", dev_closed}};
  rep["printed_form"] = {
      {"value_at_zero", report::json_number(printed_at_zero)},
      {"literal_sum_at_zero", literal_at_zero},
      {"deviation_at_zero",
       report::json_number(std::abs(printed_at_zero - literal_at_zero))},
      {"max_finite_abs_dev_vs_literal_sum",
       printed_any_finite ? report::json_number(dev_printed)
                          : report::json_number(
                                std::numeric_limits<double>::quiet_NaN())}};
  rep["reception"] = {{"histogram", batch.summary.reception_histogram},
                      {"chi_square", gof}};
  rep["checks"] = {{"grid_match",
                    {{"deviation", dev_selected},
                     {"tolerance", tol},
                     {"pass", pass}}}};
  rep["pass"] = pass;

  const fs::path dir(o.out);
  report::write_file(dir / "erasure_report.json", report::dump_json(rep));
  report::write_file(dir / "erasure_ccdf.csv", csv);
  json mparams = params_json(params, o.samples, o.seed);
  mparams["theta"] = o.theta;
  mparams["weighting"] = mode_name;
  mparams["workers"] = o.workers;
  write_manifest(dir, "erasure", mparams,
                 {"erasure_report.json", "erasure_ccdf.csv"}, started,
                 elapsed_since(t0));

  std::cout << "erasure lambda=" << format_double(params.lambda)
            << " d=" << format_double(params.d) << " k=" << params.k
            << " theta=" << format_double(o.theta) << " weighting=" << mode_name
            << " n=" << o.samples << " seed=" << o.seed << "\n"
            << "  grid dev: binomial=" << format_double(dev_b)
            << " paper-literal=" << format_double(dev_l)
            << " tolerance=" << format_double(tol) << "\n"
            << "  paper-literal weights sum to " << format_double(literal_sum)
            << "\n"
            << "  closed form vs literal sum: max dev "
            << format_double(dev_closed) << "\n"
            << "  printed form at z=0: "
            << format_double(printed_at_zero) << " (literal sum "
            << format_double(literal_at_zero) << ")\n"
            << "  reception chi-square p=" << format_double(gof.p_value)
            << " -> " << (gof.pass ? "pass" : "FAIL") << "\n"
            << "  artifacts: " << (dir / "erasure_report.json").string() << ' '
            << (dir / "erasure_ccdf.csv").string() << "\n";
  if (pass)
    std::cout << "erasure: PASS\n";
  else
    std::cout << "erasure: FAIL (grid_match, " << mode_name << " mode)\n";
  return pass ? 0 : 1;
}

int table_impl(const TableOptions& o) {
  const std::string started = report::timestamp_utc();
  const auto t0 = Clock::now();
  if (o.distortions.empty())
    throw std::invalid_argument("at least one --distortion value is required");
  if (o.channels.empty())
    throw std::invalid_argument("at least one --channels value is required");
  for (int k : o.channels)
    if (k < 1) throw std::invalid_argument("channel count must be at least 1");
  const double base = o.log_base == LogBase::two ? std::log(2.0) : 1.0;

  struct Row {
    double d, delta, d_k, rate_d, rate_d_k, k_rate_d;
    int k;
  };
  std::vector<Row> rows;
  for (double d : o.distortions)
    for (int k : o.channels) {
      const auto p = model::make_params(o.lambda, d, k);
      const double d_k = analytic::combined_distortion(p);
      const double rate_d = analytic::rdf(o.lambda, d) / base;
      const double rate_d_k = analytic::rdf(o.lambda, d_k) / base;
      rows.push_back({d, p.delta, d_k, rate_d, rate_d_k, k * rate_d, k});
    }

  const fs::path dir(o.out);
  std::string artifact;
  if (o.format == TableFormat::csv) {
    std::string csv = "d,k,delta,d_k,rate_d,rate_d_k,k_rate_d\n";
    for (const auto& r : rows)
      csv += format_double(r.d) + ',' + std::to_string(r.k) + ',' +
             format_double(r.delta) + ',' + format_double(r.d_k) + ',' +
             format_double(r.rate_d) + ',' + format_double(r.rate_d_k) + ',' +
             format_double(r.k_rate_d) + '\n';
    artifact = "table.csv";
    report::write_file(dir / artifact, csv);
  } else {
    json jrows = json::array();
    for (const auto& r : rows)
      jrows.push_back({{"d", r.d},
                       {"k", r.k},
                       {"delta", r.delta},
                       {"d_k", r.d_k},
                       {"rate_d", r.rate_d},
                       {"rate_d_k", r.rate_d_k},
                       {"k_rate_d", r.k_rate_d}});
    json rep;
    rep["subcommand"] = "table";
    rep["version"] = kToolVersion;
    rep["lambda"] = o.lambda;
    rep["log_base"] = o.log_base == LogBase::two ? "2" : "e";
    rep["rows"] = jrows;
    artifact = "table.json";
    report::write_file(dir / artifact, report::dump_json(rep));
  }

  json mparams;
  mparams["lambda"] = o.lambda;
  mparams["distortions"] = o.distortions;
  mparams["channels"] = o.channels;
  mparams["format"] = o.format == TableFormat::csv ? "csv" : "json";
  mparams["log_base"] = o.log_base == LogBase::two ? "2" : "e";
  write_manifest(dir, "table", mparams, {artifact}, started, elapsed_since(t0));

  std::cout << "table lambda=" << format_double(o.lambda) << " ("
            << rows.size() << " rows, rates in "
            << (o.log_base == LogBase::two ? "bits" : "nats") << ")\n";
  for (const auto& r : rows)
    std::cout << "  d=" << format_double(r.d) << " k=" << r.k
              << " delta=" << format_double(r.delta)
              << " d_k=" << format_double(r.d_k)
              << " rate_d=" << format_double(r.rate_d)
              << " rate_d_k=" << format_double(r.rate_d_k)
              << " k_rate_d=" << format_double(r.k_rate_d) << "\n";
  std::cout << "  artifacts: " << (dir / artifact).string() << "\n";
  return 0;
}

}  // namespace

int cmd_verify_lemma1(const Lemma1Options& opt) {
  try {
    return lemma1_impl(opt);
  } catch (const std::exception& e) {
    std::cerr << "verify-lemma1: error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_verify_independence(const IndependenceOptions& opt) {
  try {
    return independence_impl(opt);
  } catch (const std::exception& e) {
    std::cerr << "verify-independence: error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_erasure(const ErasureOptions& opt) {
  try {
    return erasure_impl(opt);
  } catch (const std::exception& e) {
    std::cerr << "erasure: error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_table(const TableOptions& opt) {
  try {
    return table_impl(opt);
  } catch (const std::exception& e) {
    std::cerr << "table: error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace selectmax::cli
