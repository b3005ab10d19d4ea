#include "rtwt/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rtwt {

namespace {

using nlohmann::json;

struct Unit {
  std::string_view suffix;
  double scale;
};

// Order matters for parsing: longer suffixes first.
constexpr std::array<Unit, 4> kUnits{{{"us", 1e-6}, {"\xC2\xB5s", 1e-6}, {"ms", 1e-3}, {"s", 1.0}}};
// Preferred order for formatting.
constexpr std::array<Unit, 3> kFormatUnits{{{"ms", 1e-3}, {"us", 1e-6}, {"s", 1.0}}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) {
    return false;
  }
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

std::string shortest(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

double parse_rate(std::string_view text) {
  for (const auto& [suffix, scale] : {std::pair<std::string_view, double>{"/ms", 1e3},
                                      std::pair<std::string_view, double>{"/s", 1.0},
                                      std::pair<std::string_view, double>{"Hz", 1.0}}) {
    if (text.size() > suffix.size() && text.substr(text.size() - suffix.size()) == suffix) {
      double v = 0.0;
      if (parse_number(text.substr(0, text.size() - suffix.size()), v)) {
        return v * scale;
      }
      break;
    }
  }
  throw ConfigError("rate '" + std::string(text) + "' needs a unit suffix (/s, /ms or Hz)");
}

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported as unknown.
class Section {
public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) {
      throw ConfigError("'" + path_ + "' must be an object");
    }
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) {
      throw ConfigError("missing required key '" + name(key) + "'");
    }
    return *v;
  }

  std::string name(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  double number(const json& v, const std::string& key) const {
    if (!v.is_number()) {
      throw ConfigError("'" + name(key) + "' must be a number");
    }
    return v.get<double>();
  }

  std::int64_t integer(const json& v, const std::string& key) const {
    if (!v.is_number_integer()) {
      throw ConfigError("'" + name(key) + "' must be an integer");
    }
    return v.get<std::int64_t>();
  }

  bool boolean(const json& v, const std::string& key) const {
    if (!v.is_boolean()) {
      throw ConfigError("'" + name(key) + "' must be true or false");
    }
    return v.get<bool>();
  }

  std::string text(const json& v, const std::string& key) const {
    if (!v.is_string()) {
      throw ConfigError("'" + name(key) + "' must be a string");
    }
    return v.get<std::string>();
  }

  Seconds duration(const json& v, const std::string& key) const {
    if (!v.is_string()) {
      throw ConfigError("'" + name(key) + "' must be a string with a unit suffix (s, ms, us)");
    }
    try {
      return parse_duration(v.get<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError("'" + name(key) + "': " + e.what());
    }
  }

  template <typename Fn>
  void optional(const std::string& key, Fn&& fn) {
    if (const json* v = find(key)) {
      fn(*v);
    }
  }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError("unknown key '" + name(item.key()) + "'");
      }
    }
  }

private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

int to_int(std::int64_t v, const std::string& key) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError("'" + key + "' out of range");
  }
  return static_cast<int>(v);
}

}  // namespace

EvaluateOptions RunConfig::evaluate_options() const {
  EvaluateOptions o;
  o.percentile_q = percentile_q;
  o.allow_discretization_error = allow_discretization_error;
  return o;
}

void RunConfig::validate() const {
  traffic.validate();
  link.validate();
  rtwt.validate_against(traffic);
  if (buffer < 1) {
    throw InvalidParameter("buffer must be >= 1");
  }
  if (!(percentile_q > 0.0 && percentile_q < 1.0)) {
    throw InvalidParameter("model.percentile_q must lie in (0, 1)");
  }
  sim.validate();
  if (sim_runs < 1) {
    throw InvalidParameter("sim.runs must be >= 1");
  }
  qos.validate();
  grid.validate();
}

RunConfig default_config() {
  RunConfig c;
  c.traffic.lambda = 1.0 / parse_duration("16ms").count();
  c.traffic.slot_time = parse_duration("114.4us");
  c.link.p_err = 0.1;
  c.link.retry_limit = 3;
  c.rtwt.period = parse_duration("10ms");
  c.rtwt.sp_slots = 3;
  c.rtwt.offset = Seconds(0.0);
  c.buffer = kDefaultBufferPackets;
  c.qos.indicator = Indicator::Percentile;
  c.qos.quantile = kDefaultPercentile;
  c.qos.target = parse_duration("20ms");
  c.grid.period_min = parse_duration("0.5ms");
  c.grid.period_max = parse_duration("16ms");
  c.grid.period_step = parse_duration("0.1ms");
  return c;
}

Seconds parse_duration(std::string_view text) {
  const std::string_view t = trim(text);
  for (const auto& [suffix, scale] : kUnits) {
    if (t.size() > suffix.size() && t.substr(t.size() - suffix.size()) == suffix) {
      double v = 0.0;
      if (!parse_number(t.substr(0, t.size() - suffix.size()), v)) {
        throw ConfigError("cannot read duration '" + std::string(text) + "'");
      }
      return Seconds(v * scale);
    }
  }
  throw ConfigError("duration '" + std::string(text) + "' needs a unit suffix (s, ms, us)");
}

std::string format_duration(Seconds value) {
  const double secs = value.count();
  if (std::abs(secs) >= 1.0) {
    return shortest(secs) + "s";
  }
  for (const auto& [suffix, scale] : kFormatUnits) {
    const std::string digits = shortest(secs / scale);
    double back = 0.0;
    if (parse_number(digits, back) && back * scale == secs) {
      return digits + std::string(suffix);
    }
  }
  return shortest(secs) + "s";
}

std::string_view to_string(Indicator indicator) {
  switch (indicator) {
    case Indicator::Percentile: return "percentile";
    case Indicator::MeanDelay: return "mean_delay";
    case Indicator::Jitter: return "jitter";
  }
  return "percentile";
}

Indicator parse_indicator(std::string_view text) {
  if (text == "percentile") return Indicator::Percentile;
  if (text == "mean_delay") return Indicator::MeanDelay;
  if (text == "jitter") return Indicator::Jitter;
  throw ConfigError("unknown QoS indicator '" + std::string(text) +
                    "' (expected percentile, mean_delay or jitter)");
}

RunConfig load_config(const json& doc) {
  RunConfig c = default_config();
  Section root(doc, "");

  {
    Section s(root.require("traffic"), "traffic");
    c.traffic.slot_time = s.duration(s.require("packet_duration"), "packet_duration");
    const json* gap = s.find("interarrival");
    const json* rate = s.find("rate");
    if ((gap == nullptr) == (rate == nullptr)) {
      throw ConfigError(gap == nullptr ? "missing required key 'traffic.interarrival' (or traffic.rate)"
                                       : "give only one of 'traffic.interarrival' and 'traffic.rate'");
    }
    if (gap != nullptr) {
      const Seconds g = s.duration(*gap, "interarrival");
      if (!(g.count() > 0.0)) {
        throw ConfigError("'traffic.interarrival' must be > 0");
      }
      c.traffic.lambda = 1.0 / g.count();
    } else {
      c.traffic.lambda = parse_rate(s.text(*rate, "rate"));
    }
    s.finish();
  }
  {
    Section s(root.require("link"), "link");
    c.link.p_err = s.number(s.require("error_prob"), "error_prob");
    c.link.retry_limit = to_int(s.integer(s.require("retry_limit"), "retry_limit"), "link.retry_limit");
    s.finish();
  }
  {
    Section s(root.require("rtwt"), "rtwt");
    c.rtwt.period = s.duration(s.require("period"), "period");
    c.rtwt.sp_slots = to_int(s.integer(s.require("sp_slots"), "sp_slots"), "rtwt.sp_slots");
    s.optional("offset", [&](const json& v) { c.rtwt.offset = s.duration(v, "offset"); });
    s.finish();
  }
  c.buffer = to_int(root.integer(root.require("buffer"), "buffer"), "buffer");

  root.optional("model", [&](const json& v) {
    Section s(v, "model");
    s.optional("percentile_q", [&](const json& x) { c.percentile_q = s.number(x, "percentile_q"); });
    s.optional("allow_discretization_error",
               [&](const json& x) { c.allow_discretization_error = s.boolean(x, "allow_discretization_error"); });
    s.finish();
  });
  root.optional("sim", [&](const json& v) {
    Section s(v, "sim");
    s.optional("seed", [&](const json& x) {
      if (!x.is_number_unsigned()) {
        throw ConfigError("'sim.seed' must be a non-negative integer");
      }
      c.sim.seed = x.get<std::uint64_t>();
    });
    s.optional("warmup_packets", [&](const json& x) { c.sim.warmup_packets = s.integer(x, "warmup_packets"); });
    s.optional("measured_packets", [&](const json& x) { c.sim.measured_packets = s.integer(x, "measured_packets"); });
    s.optional("max_sim_time", [&](const json& x) { c.sim.max_sim_time = s.duration(x, "max_sim_time"); });
    s.optional("runs", [&](const json& x) { c.sim_runs = to_int(s.integer(x, "runs"), "sim.runs"); });
    s.finish();
  });
  root.optional("qos", [&](const json& v) {
    Section s(v, "qos");
    s.optional("indicator", [&](const json& x) { c.qos.indicator = parse_indicator(s.text(x, "indicator")); });
    s.optional("quantile", [&](const json& x) { c.qos.quantile = s.number(x, "quantile"); });
    s.optional("target", [&](const json& x) { c.qos.target = s.duration(x, "target"); });
    s.finish();
  });
  root.optional("grid", [&](const json& v) {
    Section s(v, "grid");
    s.optional("period_min", [&](const json& x) { c.grid.period_min = s.duration(x, "period_min"); });
    s.optional("period_max", [&](const json& x) { c.grid.period_max = s.duration(x, "period_max"); });
    s.optional("period_step", [&](const json& x) { c.grid.period_step = s.duration(x, "period_step"); });
    s.optional("sp_min", [&](const json& x) { c.grid.sp_min = to_int(s.integer(x, "sp_min"), "grid.sp_min"); });
    s.optional("sp_max", [&](const json& x) { c.grid.sp_max = to_int(s.integer(x, "sp_max"), "grid.sp_max"); });
    s.finish();
  });
  root.finish();

  c.sim.percentile_q = c.percentile_q;
  c.validate();
  return c;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path.string() + "'");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return load_config(doc);
}

json to_json(const RunConfig& c) {
  json traffic;
  traffic["packet_duration"] = format_duration(c.traffic.slot_time);
  const double gap = 1.0 / c.traffic.lambda;
  if (c.traffic.lambda > 0.0 && 1.0 / parse_duration(format_duration(Seconds(gap))).count() == c.traffic.lambda) {
    traffic["interarrival"] = format_duration(Seconds(gap));
  } else {
    traffic["rate"] = shortest(c.traffic.lambda) + "/s";
  }

  json out;
  out["traffic"] = traffic;
  out["link"] = {{"error_prob", c.link.p_err}, {"retry_limit", c.link.retry_limit}};
  out["rtwt"] = {{"period", format_duration(c.rtwt.period)},
                 {"sp_slots", c.rtwt.sp_slots},
                 {"offset", format_duration(c.rtwt.offset)}};
  out["buffer"] = c.buffer;
  out["model"] = {{"percentile_q", c.percentile_q},
                  {"allow_discretization_error", c.allow_discretization_error}};
  out["sim"] = {{"seed", c.sim.seed},
                {"warmup_packets", c.sim.warmup_packets},
                {"measured_packets", c.sim.measured_packets},
                {"max_sim_time", format_duration(c.sim.max_sim_time)},
                {"runs", c.sim_runs}};
  out["qos"] = {{"indicator", std::string(to_string(c.qos.indicator))},
                {"quantile", c.qos.quantile},
                {"target", format_duration(c.qos.target)}};
  out["grid"] = {{"period_min", format_duration(c.grid.period_min)},
                 {"period_max", format_duration(c.grid.period_max)},
                 {"period_step", format_duration(c.grid.period_step)},
                 {"sp_min", c.grid.sp_min},
                 {"sp_max", c.grid.sp_max}};
  return out;
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' must look like key=value");
  }
  const std::string key(trim(assignment.substr(0, eq)));
  const std::string raw(trim(assignment.substr(eq + 1)));

  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }

  json* node = &doc;
  std::string_view rest = key;
  while (true) {
    const auto dot = rest.find('.');
    const std::string part(rest.substr(0, dot));
    if (part.empty()) {
      throw ConfigError("override key '" + key + "' is malformed");
    }
    if (!node->is_object()) {
      throw ConfigError("override key '" + key + "' descends into a non-object");
    }
    if (dot == std::string_view::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) {
      *node = json::object();
    }
    rest.remove_prefix(dot + 1);
  }
}

}  // namespace rtwt
