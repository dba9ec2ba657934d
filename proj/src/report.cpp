#include "selectmax/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace selectmax::stats {

void to_json(nlohmann::json& j, const KsResult& r) {
  j = nlohmann::json{{"statistic", r.statistic},
                     {"n", r.n},
                     {"p_value", r.p_value},
                     {"alpha", r.alpha},
                     {"pass", r.pass}};
}

void to_json(nlohmann::json& j, const IndependenceResult& r) {
  j = nlohmann::json{
      {"kind", r.kind == TestKind::two_sample_ks ? "two_sample_ks"
                                                 : "chi_square_contingency"},
      {"statistic", r.statistic},
      {"p_value", r.p_value},
      {"corrected_alpha", r.corrected_alpha},
      {"pass", r.pass},
      {"conditioning", r.conditioning}};
}

void to_json(nlohmann::json& j, const IndependenceReport& r) {
  j = nlohmann::json{{"tests", r.tests},
                     {"alpha", r.alpha},
                     {"pass", r.pass},
                     {"note", r.note}};
}

void to_json(nlohmann::json& j, const AtomFrequency& r) {
  j = nlohmann::json{{"fraction", r.fraction},
                     {"std_error", r.std_error},
                     {"count", r.count},
                     {"n", r.n}};
}

}  // namespace selectmax::stats

namespace selectmax::report {

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0.0 ? "inf" : "-inf";
}

std::string dump_json(const nlohmann::json& j) {
  return j.dump(2) + "\n";
}

void write_file(const std::filesystem::path& path,
                const std::string& contents) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << contents;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[72];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

}  // namespace selectmax::report
