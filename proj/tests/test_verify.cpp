#include <doctest.h>

#include <stdexcept>

#include "merw/verify.hpp"

using namespace merw;

TEST_CASE("fault injection makes the exact-oracle criterion fail") {
  VerifyOptions options;
  options.tier = "fast";
  options.seed = 42;
  options.workers = 2;
  options.inject_fault = true;
  const auto report = run_verify(options);
  REQUIRE(!report.results.empty());
  CHECK(report.results[0].id == "C1");
  CHECK_FALSE(report.results[0].pass);
  CHECK_FALSE(report.pass);

  // Report JSON is stable and carries one entry per executed criterion.
  const std::string json = report.to_json();
  CHECK(json.find("\"tier\":\"fast\"") != std::string::npos);
  CHECK(json.find("\"id\":\"C10\"") != std::string::npos);
  CHECK(json.find("\"id\":\"C11\"") == std::string::npos);  // full tier only
  CHECK(json.find("seconds") == std::string::npos);         // timings excluded
  CHECK(json.find("workers") == std::string::npos);
}

TEST_CASE("unknown tier is rejected") {
  VerifyOptions options;
  options.tier = "medium";
  CHECK_THROWS_AS(run_verify(options), std::invalid_argument);
}
