#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace merw {

// %.17g rendering used by every numeric surface (CSV and JSON alike).
std::string fmt17(double value);

// Minimal deterministic JSON emitter: insertion-ordered keys, %.17g numbers,
// no whitespace surprises.  Byte-identical output for identical inputs.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& name);
  JsonWriter& value(double v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(int v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v);
  JsonWriter& null_value();

  std::string str() const { return out_; }

 private:
  void separator();
  std::string out_;
  std::vector<bool> first_in_scope_;
  bool pending_key_ = false;
};

std::string json_escape(const std::string& raw);

// Run manifest emitted alongside file outputs; re-running the recorded
// arguments reproduces the outputs byte for byte.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> arguments;                       // argv tail as invoked
  std::vector<std::pair<std::string, std::string>> config;  // resolved settings
  std::string tool_version;
  std::uint64_t seed = 0;
  std::string timestamp;  // ISO-8601 UTC
  std::vector<std::string> outputs;

  std::string to_json() const;
};

std::string iso8601_utc_now();

}  // namespace merw
