#include <algorithm>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "selectmax/commands.hpp"

namespace {

void add_run_options(CLI::App* cmd, double& lambda, double& distortion,
                     int& channels, std::uint64_t& samples, std::uint64_t& seed,
                     unsigned& workers, std::string& out) {
  cmd->add_option("--lambda", lambda, "source rate")->capture_default_str();
  cmd->add_option("--distortion", distortion, "per-channel distortion d")
      ->capture_default_str();
  cmd->add_option("--channels", channels, "number of parallel channels k")
      ->capture_default_str();
  cmd->add_option("--samples", samples, "Monte Carlo trials")
      ->capture_default_str();
  cmd->add_option("--seed", seed, "RNG seed")->capture_default_str();
  cmd->add_option("--workers", workers,
                  "worker threads; outputs never depend on this")
      ->capture_default_str();
  cmd->add_option("--out", out, "output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace selectmax;

  CLI::App app{
      "Select-max estimation of a one-sided exponential source over parallel "
      "rate-distortion test channels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cli::kToolVersion);
  const unsigned default_workers =
      std::max(1u, std::thread::hardware_concurrency());

  cli::Lemma1Options l1;
  l1.workers = default_workers;
  auto* lem = app.add_subcommand(
      "verify-lemma1",
      "check the select-max error against Exp(lambda + k*delta)");
  add_run_options(lem, l1.lambda, l1.distortion, l1.channels, l1.samples,
                  l1.seed, l1.workers, l1.out);

  cli::IndependenceOptions ind;
  ind.workers = default_workers;
  auto* icmd = app.add_subcommand(
      "verify-independence",
      "orthogonality and sufficiency checks of the select-max error");
  add_run_options(icmd, ind.lambda, ind.distortion, ind.channels, ind.samples,
                  ind.seed, ind.workers, ind.out);
  icmd->add_option("--bins", ind.bins, "conditioning bins over the estimate")
      ->capture_default_str();

  cli::ErasureOptions era;
  era.workers = default_workers;
  std::string weighting = "binomial";
  auto* ecmd = app.add_subcommand(
      "erasure", "error law when each description is lost with probability theta");
  add_run_options(ecmd, era.lambda, era.distortion, era.channels, era.samples,
                  era.seed, era.workers, era.out);
  ecmd->add_option("--theta", era.theta, "per-description loss probability")
      ->capture_default_str();
  ecmd->add_option("--weighting", weighting,
                   "reception-count weighting: binomial sums to 1, "
                   "paper-literal drops the binomial coefficient")
      ->check(CLI::IsMember({"binomial", "paper-literal"}))
      ->capture_default_str();

  cli::TableOptions tab;
  std::string format = "csv";
  std::string log_base = "e";
  auto* tcmd = app.add_subcommand(
      "table", "distortion and rate table over (d, k) grids");
  tcmd->add_option("--lambda", tab.lambda, "source rate")->capture_default_str();
  tcmd->add_option("--distortion", tab.distortions,
                   "per-channel distortion grid")
      ->required()
      ->delimiter(',');
  tcmd->add_option("--channels", tab.channels, "channel count grid")
      ->required()
      ->delimiter(',');
  tcmd->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  tcmd->add_option("--log-base", log_base, "rate units: e for nats, 2 for bits")
      ->check(CLI::IsMember({"e", "2"}))
      ->capture_default_str();
  tcmd->add_option("--out", tab.out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (lem->parsed()) return cli::cmd_verify_lemma1(l1);
  if (icmd->parsed()) return cli::cmd_verify_independence(ind);
  if (ecmd->parsed()) {
    era.weighting = weighting == "binomial" ? analytic::Weighting::binomial
                                            : analytic::Weighting::paper_literal;
    return cli::cmd_erasure(era);
  }
  tab.format = format == "csv" ? cli::TableFormat::csv : cli::TableFormat::json;
  tab.log_base = log_base == "e" ? cli::LogBase::e : cli::LogBase::two;
  return cli::cmd_table(tab);
}
