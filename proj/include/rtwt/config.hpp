#pragma once

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rtwt/optimizer.hpp"
#include "rtwt/params.hpp"
#include "rtwt/simulator.hpp"

namespace rtwt {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Union of every module input, as loaded from a JSON config file.
struct RunConfig {
  TrafficSpec traffic;
  LinkSpec link;
  RtwtSpec rtwt;
  int buffer = kDefaultBufferPackets;
  double percentile_q = kDefaultPercentile;
  bool allow_discretization_error = false;
  SimConfig sim;
  int sim_runs = 1;
  QosConstraint qos;
  SearchGrid grid;

  bool operator==(const RunConfig&) const = default;

  EvaluateOptions evaluate_options() const;
  void validate() const;
};

// The reference scenario: 1/lambda = 16 ms, S = 114.4 us, K = 20,
// p_err = 0.1, R = 3, T = 10 ms, N = 3.
RunConfig default_config();

// "114.4us", "16ms", "0.5 s". A bare number is rejected.
Seconds parse_duration(std::string_view text);
// Shortest text that parses back to exactly the same value.
std::string format_duration(Seconds value);

// Strict load: missing required keys and unknown keys are ConfigErrors.
RunConfig load_config(const nlohmann::json& doc);
RunConfig load_config_file(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

// Applies "section.key=value" to a config document. The value is read as
// JSON when it parses as JSON, otherwise as a plain string.
void apply_override(nlohmann::json& doc, std::string_view assignment);

std::string_view to_string(Indicator indicator);
Indicator parse_indicator(std::string_view text);

}  // namespace rtwt
