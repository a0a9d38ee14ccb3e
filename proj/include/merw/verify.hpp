#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace merw {

struct CriterionResult {
  std::string id;
  std::string name;
  std::string scale;  // "full" or "smoke"
  bool pass = false;
  std::string detail;
  double seconds = 0.0;  // timing is reported on the table surface only
};

struct VerifyOptions {
  std::string tier = "fast";  // "fast": exact suites full-scale, MC suites reduced
  std::uint64_t seed = 42;
  int workers = 1;
  bool inject_fault = false;  // corrupt one oracle target; the suite must then fail
};

struct VerifyReport {
  std::string tier;
  std::uint64_t seed = 0;
  std::vector<CriterionResult> results;
  bool pass = true;

  // Byte-stable report: excludes wall-clock timings and the worker count, so
  // identical (tier, seed) runs compare equal at any parallelism.
  std::string to_json() const;
  // Human summary, one line per criterion, timings included.
  std::string to_table() const;
};

VerifyReport run_verify(const VerifyOptions& options);

}  // namespace merw
