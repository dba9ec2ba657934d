#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "selectmax/model.hpp"

namespace selectmax::mc {

struct BatchConfig {
  model::ModelParams params;
  std::uint64_t n_trials = 1;
  std::uint64_t seed = 0;
  std::optional<double> theta;  // per-description loss probability; absent => no erasures
  bool record_full = false;     // keep per-trial records (independence tests)
  bool record_errors = false;   // keep the error sample only (KS tests)
  unsigned workers = 1;         // parallelism hint; never changes any output bit
};

struct BatchSummary {
  std::uint64_t n = 0;
  double mean_error = 0.0;
  double var_error = 0.0;           // unbiased sample variance
  double atom_freq_estimate = 0.0;  // fraction of trials with estimate == 0
  double per_channel_atom_freq = 0.0;  // fraction of zero outputs over all n*k draws
  std::vector<std::uint64_t> reception_histogram;  // counts of l received, l = 0..k
  double elapsed_seconds = 0.0;
  std::uint64_t seed = 0;
};

struct BatchResult {
  BatchSummary summary;
  std::vector<model::TrialRecord> records;  // filled when record_full
  std::vector<double> errors;               // filled when record_errors or record_full
};

/// Simulates one trial; a pure function of (params, stream seed, trial_index,
/// theta). With theta set, each description is independently lost with
/// probability theta and the estimate maximizes over the received subset only
/// (0 when nothing arrives).
model::TrialRecord run_trial(const model::ModelParams& params,
                             const model::UniformStream& stream,
                             std::uint64_t trial_index,
                             std::optional<double> theta = std::nullopt);

/// Runs config.n_trials independent trials. Output is bit-identical for a
/// fixed seed regardless of the workers hint: trials are addressed draws, and
/// summaries accumulate per fixed-size chunk, merged in chunk order.
BatchResult run_batch(const BatchConfig& config);

/// Projects full records into the tuples consumed by the independence tests.
/// second_max is taken over the same received subset the estimate was
/// selected from (0 when fewer than two outputs are available).
std::vector<model::TrialProjection> paired_samples_for_independence(
    std::span<const model::TrialRecord> records);

/// Dataset spill format: a header row, then one record per line as
/// trial_index,x,y_1..y_k[,mask],estimate,error with floats printed as
/// shortest round-trip decimals. mask is k characters of 0/1, channel 1 first,
/// and appears only for erasure runs.
void write_dataset_csv(std::ostream& os,
                       std::span<const model::TrialRecord> records, int k);

}  // namespace selectmax::mc
