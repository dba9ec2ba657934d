#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selectmax/analytic.hpp"

namespace selectmax::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum class LogBase { e, two };
enum class TableFormat { csv, json };

struct Lemma1Options {
  double lambda = 1.0;
  double distortion = 0.5;
  int channels = 3;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 42;
  unsigned workers = 1;
  std::string out = ".";
};

struct IndependenceOptions {
  double lambda = 1.0;
  double distortion = 0.5;
  int channels = 3;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 42;
  int bins = 8;
  unsigned workers = 1;
  std::string out = ".";
};

struct ErasureOptions {
  double lambda = 1.0;
  double distortion = 0.5;
  int channels = 3;
  double theta = 0.2;
  analytic::Weighting weighting = analytic::Weighting::binomial;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 42;
  unsigned workers = 1;
  std::string out = ".";
};

struct TableOptions {
  double lambda = 1.0;
  std::vector<double> distortions;
  std::vector<int> channels;
  TableFormat format = TableFormat::csv;
  LogBase log_base = LogBase::e;
  std::string out = ".";
};

// Each command writes its artifacts plus manifest.json under the out
// directory and prints a summary. Exit codes: 0 success, 1 verification
// failure (the failing check is named on stdout), 2 usage/validation error.
int cmd_verify_lemma1(const Lemma1Options& opt);
int cmd_verify_independence(const IndependenceOptions& opt);
int cmd_erasure(const ErasureOptions& opt);
int cmd_table(const TableOptions& opt);

}  // namespace selectmax::cli
