#include "selectmax/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "selectmax/numfmt.hpp"

namespace selectmax::mc {

namespace {

// Fixed chunk size keeps the summary accumulation order independent of the
// worker count: chunks are accumulated internally in trial order and merged
// in chunk-index order, so every bit of the summary is reproducible.
constexpr std::uint64_t kChunk = 8192;

// Hard ceiling for recorded datasets; refuse upfront instead of thrashing.
constexpr double kMaxRecordBytes = 8.0 * (1ull << 30);

// Substream layout within one trial: 0..k-1 channel output draws,
// k..2k-1 reception flags, 2k the source draw.
struct TrialScalars {
  double x = 0.0;
  double estimate = 0.0;
  double error = 0.0;
  std::uint64_t mask = 0;
  int received_count = 0;
};

TrialScalars simulate(const model::ModelParams& p,
                      const model::UniformStream& stream, std::uint64_t trial,
                      const std::optional<double>& theta,
                      std::span<double> outputs) {
  const int k = p.k;
  const auto uk = static_cast<std::uint64_t>(k);
  TrialScalars s;
  s.x = model::sample_source(p.lambda, stream.uniform(trial, 2 * uk));
  for (int c = 0; c < k; ++c)
    outputs[static_cast<std::size_t>(c)] =
        model::sample_channel_output(s.x, p.delta, stream.uniform(trial, static_cast<std::uint64_t>(c)));
  if (theta) {
    double est = 0.0;
    for (int c = 0; c < k; ++c) {
      if (stream.uniform(trial, uk + static_cast<std::uint64_t>(c)) > *theta) {
        s.mask |= 1ull << c;
        ++s.received_count;
        est = std::max(est, outputs[static_cast<std::size_t>(c)]);
      }
    }
    s.estimate = est;
  } else {
    s.mask = k == 64 ? ~0ull : (1ull << k) - 1;
    s.received_count = k;
    s.estimate = model::select_max(outputs.first(static_cast<std::size_t>(k)));
  }
  s.error = s.x - s.estimate;
  return s;
}

struct ChunkAccum {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t zero_estimates = 0;
  std::uint64_t zero_outputs = 0;
  std::vector<std::uint64_t> recv_hist;

  explicit ChunkAccum(int k = 0) : recv_hist(static_cast<std::size_t>(k) + 1, 0) {}

  void add_error(double err) {
    ++n;
    const double d1 = err - mean;
    mean += d1 / static_cast<double>(n);
    m2 += d1 * (err - mean);
  }
};

// Chan et al. pairwise merge; applied strictly left-to-right over chunks.
void merge_into(ChunkAccum& a, const ChunkAccum& b) {
  if (b.n == 0) return;
  if (a.n == 0) {
    a = b;
    return;
  }
  const std::uint64_t n = a.n + b.n;
  const double d = b.mean - a.mean;
  a.mean += d * (static_cast<double>(b.n) / static_cast<double>(n));
  a.m2 += b.m2 + d * d * (static_cast<double>(a.n) / static_cast<double>(n)) *
                     static_cast<double>(b.n);
  a.n = n;
  a.zero_estimates += b.zero_estimates;
  a.zero_outputs += b.zero_outputs;
  for (std::size_t i = 0; i < a.recv_hist.size(); ++i) a.recv_hist[i] += b.recv_hist[i];
}

void validate(const BatchConfig& cfg) {
  if (cfg.n_trials < 1)
    throw std::invalid_argument("n_trials must be at least 1");
  if (cfg.workers < 1)
    throw std::invalid_argument("workers must be at least 1");
  if (cfg.theta) {
    if (!std::isfinite(*cfg.theta) || *cfg.theta < 0.0 || *cfg.theta > 1.0)
      throw std::invalid_argument("theta must lie in [0, 1]");
    if (cfg.params.k > 64)
      throw std::invalid_argument(
          "erasure runs support at most 64 channels (reception mask width)");
  }
}

}  // namespace

model::TrialRecord run_trial(const model::ModelParams& params,
                             const model::UniformStream& stream,
                             std::uint64_t trial_index,
                             std::optional<double> theta) {
  if (theta) {
    if (!std::isfinite(*theta) || *theta < 0.0 || *theta > 1.0)
      throw std::invalid_argument("theta must lie in [0, 1]");
    if (params.k > 64)
      throw std::invalid_argument(
          "erasure runs support at most 64 channels (reception mask width)");
  }
  std::vector<double> outputs(static_cast<std::size_t>(params.k));
  const TrialScalars s = simulate(params, stream, trial_index, theta, outputs);
  model::TrialRecord rec;
  rec.x = s.x;
  rec.outputs = std::move(outputs);
  rec.estimate = s.estimate;
  rec.error = s.error;
  if (theta) rec.received = s.mask;
  return rec;
}

BatchResult run_batch(const BatchConfig& cfg) {
  validate(cfg);
  const auto& p = cfg.params;
  const std::uint64_t n = cfg.n_trials;
  const int k = p.k;
  const bool keep_errors = cfg.record_errors || cfg.record_full;

  if (cfg.record_full || keep_errors) {
    double bytes = 0.0;
    if (cfg.record_full)
      bytes += static_cast<double>(n) *
               (sizeof(model::TrialRecord) + 16.0 + 8.0 * k);
    if (keep_errors) bytes += static_cast<double>(n) * 8.0;
    if (bytes > kMaxRecordBytes)
      throw std::invalid_argument(
          "recorded dataset would need about " +
          std::to_string(static_cast<std::uint64_t>(bytes / (1ull << 20))) +
          " MiB; lower n_trials or drop record_full");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const model::UniformStream stream(cfg.seed);
  const std::uint64_t n_chunks = (n + kChunk - 1) / kChunk;

  BatchResult result;
  if (cfg.record_full) result.records.resize(n);
  if (keep_errors) result.errors.resize(n);

  std::vector<ChunkAccum> accums(n_chunks, ChunkAccum(k));

  const auto run_chunk = [&](std::uint64_t chunk, std::vector<double>& scratch) {
    ChunkAccum& acc = accums[chunk];
    const std::uint64_t lo = chunk * kChunk;
    const std::uint64_t hi = std::min(n, lo + kChunk);
    for (std::uint64_t t = lo; t < hi; ++t) {
      const TrialScalars s = simulate(p, stream, t, cfg.theta, scratch);
      acc.add_error(s.error);
      if (s.estimate == 0.0) ++acc.zero_estimates;
      for (int c = 0; c < k; ++c)
        if (scratch[static_cast<std::size_t>(c)] == 0.0) ++acc.zero_outputs;
      ++acc.recv_hist[static_cast<std::size_t>(s.received_count)];
      if (keep_errors) result.errors[t] = s.error;
      if (cfg.record_full) {
        auto& rec = result.records[t];
        rec.x = s.x;
        rec.outputs.assign(scratch.begin(), scratch.begin() + k);
        rec.estimate = s.estimate;
        rec.error = s.error;
        if (cfg.theta) rec.received = s.mask;
      }
    }
  };

  const unsigned workers = static_cast<unsigned>(
      std::min<std::uint64_t>(cfg.workers, n_chunks));
  if (workers <= 1) {
    std::vector<double> scratch(static_cast<std::size_t>(k));
    for (std::uint64_t chunk = 0; chunk < n_chunks; ++chunk)
      run_chunk(chunk, scratch);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        std::vector<double> scratch(static_cast<std::size_t>(k));
        for (;;) {
          const std::uint64_t chunk = next.fetch_add(1);
          if (chunk >= n_chunks) break;
          run_chunk(chunk, scratch);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  ChunkAccum total(k);
  for (const auto& acc : accums) merge_into(total, acc);

  BatchSummary& s = result.summary;
  s.n = total.n;
  s.mean_error = total.mean;
  s.var_error = total.n > 1 ? total.m2 / static_cast<double>(total.n - 1) : 0.0;
  s.atom_freq_estimate =
      static_cast<double>(total.zero_estimates) / static_cast<double>(total.n);
  s.per_channel_atom_freq = static_cast<double>(total.zero_outputs) /
                            (static_cast<double>(total.n) * k);
  s.reception_histogram = std::move(total.recv_hist);
  s.seed = cfg.seed;
  s.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

std::vector<model::TrialProjection> paired_samples_for_independence(
    std::span<const model::TrialRecord> records) {
  std::vector<model::TrialProjection> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    double best = -1.0;
    double second = -1.0;
    const int k = static_cast<int>(r.outputs.size());
    for (int c = 0; c < k; ++c) {
      if (r.received && !((*r.received >> c) & 1ull)) continue;
      const double y = r.outputs[static_cast<std::size_t>(c)];
      if (y > best) {
        second = best;
        best = y;
      } else if (y > second) {
        second = y;
      }
    }
    out.push_back({r.estimate, r.error, std::max(second, 0.0)});
  }
  return out;
}

void write_dataset_csv(std::ostream& os,
                       std::span<const model::TrialRecord> records, int k) {
  const bool with_mask = !records.empty() && records.front().received.has_value();
  os << "trial_index,x";
  for (int c = 1; c <= k; ++c) os << ",y_" << c;
  if (with_mask) os << ",mask";
  os << ",estimate,error\n";
  std::uint64_t idx = 0;
  for (const auto& r : records) {
    os << idx++ << ',' << format_double(r.x);
    for (int c = 0; c < k; ++c)
      os << ',' << format_double(r.outputs[static_cast<std::size_t>(c)]);
    if (with_mask) {
      os << ',';
      for (int c = 0; c < k; ++c)
        os << (((*r.received >> c) & 1ull) ? '1' : '0');
    }
    os << ',' << format_double(r.estimate) << ',' << format_double(r.error)
       << '\n';
  }
}

}  // namespace selectmax::mc
