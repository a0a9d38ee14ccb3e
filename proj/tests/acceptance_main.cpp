// Acceptance suite: runs every criterion at full scale and prints one
// pass/fail line per criterion.  Exit code 0 iff all criteria pass.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "merw/verify.hpp"

int main(int argc, char** argv) {
  merw::VerifyOptions options;
  options.tier = "full";
  options.seed = 42;
  options.workers = 4;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--seed" && i + 1 < argc) options.seed = std::strtoull(argv[++i], nullptr, 10);
    if (arg == "--workers" && i + 1 < argc) options.workers = std::atoi(argv[++i]);
    if (arg == "--tier" && i + 1 < argc) options.tier = argv[++i];
  }

  const auto report = merw::run_verify(options);
  std::fputs(report.to_table().c_str(), stdout);
  return report.pass ? 0 : 1;
}
