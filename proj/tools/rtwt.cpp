// rtwt: model, simulate, validate and optimize dedicated R-TWT schedules.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "rtwt/config.hpp"
#include "rtwt/experiments.hpp"
#include "rtwt/model.hpp"
#include "rtwt/optimizer.hpp"
#include "rtwt/report.hpp"
#include "rtwt/simulator.hpp"

namespace {

using namespace rtwt;

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kModel = 3,
  kSimulation = 4,
};

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::string pmf_path;
  bool want_pmf = false;
  std::string trace_path;
  std::string axis = "period";
  std::string values;
  std::string experiment;
  std::string step = "1ms";
};

RunConfig resolve_config(const Options& opt) {
  nlohmann::json doc;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) {
      throw ConfigError("cannot open config file '" + opt.config_path + "'");
    }
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config file '" + opt.config_path + "' is not valid JSON: " + e.what());
    }
  } else {
    doc = to_json(default_config());
  }
  for (const auto& o : opt.overrides) {
    apply_override(doc, o);
  }
  if (opt.seed) {
    apply_override(doc, "sim.seed=" + std::to_string(*opt.seed));
  }
  return load_config(doc);
}

// Writes to --out when given, stdout otherwise.
class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) {
        throw ConfigError("cannot write '" + path + "'");
      }
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

void check_format(const Options& opt, std::initializer_list<std::string_view> allowed) {
  for (auto f : allowed) {
    if (opt.format == f) {
      return;
    }
  }
  throw ConfigError("format '" + opt.format + "' is not supported by this command");
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "period" || name == "T") return SweepAxis::Period;
  if (name == "sp_slots" || name == "N") return SweepAxis::SpSlots;
  if (name == "interarrival") return SweepAxis::InterArrival;
  throw ConfigError("unknown axis '" + name + "' (expected period, sp_slots or interarrival)");
}

double parse_axis_value(SweepAxis axis, const std::string& text) {
  if (axis == SweepAxis::SpSlots) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size()) {
      throw ConfigError("SP slot count '" + text + "' is not an integer");
    }
    return v;
  }
  return parse_duration(text).count();
}

// "1ms,2ms,4ms" or "1ms:16ms:1ms" (first:last:step).
std::vector<double> parse_axis_values(SweepAxis axis, const std::string& text) {
  if (text.empty()) {
    throw ConfigError("--values is required");
  }
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) {
      parts.push_back(p);
    }
    if (parts.size() != 3) {
      throw ConfigError("range '" + text + "' must look like first:last:step");
    }
    const double first = parse_axis_value(axis, parts[0]);
    const double last = parse_axis_value(axis, parts[1]);
    const double step = parse_axis_value(axis, parts[2]);
    if (!(step > 0.0) || last < first) {
      throw ConfigError("range '" + text + "' is empty");
    }
    const auto n = static_cast<long>(std::floor((last - first) / step + 1e-9));
    for (long i = 0; i <= n; ++i) {
      out.push_back(first + static_cast<double>(i) * step);
    }
    return out;
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    out.push_back(parse_axis_value(axis, p));
  }
  return out;
}

int cmd_model(const Options& opt) {
  check_format(opt, {"json", "table"});
  const RunConfig cfg = resolve_config(opt);
  const Evaluation e = evaluate(cfg.traffic, cfg.link, cfg.rtwt, cfg.buffer, cfg.evaluate_options());
  Output out(opt.out_path);
  if (opt.format == "table") {
    write_table(out.stream(), e.report);
  } else {
    out.stream() << to_json(e.report).dump(2) << '\n';
  }
  if (opt.want_pmf) {
    if (opt.pmf_path.empty()) {
      out.stream() << '\n';
      write_pmf_csv(out.stream(), e.pmf, cfg.traffic.slot_time);
    } else {
      Output pmf(opt.pmf_path);
      write_pmf_csv(pmf.stream(), e.pmf, cfg.traffic.slot_time);
    }
  }
  return kOk;
}

int cmd_simulate(const Options& opt) {
  check_format(opt, {"json", "table"});
  const RunConfig cfg = resolve_config(opt);
  SimReport report;
  if (!opt.trace_path.empty()) {
    if (cfg.sim_runs != 1) {
      throw ConfigError("--trace needs sim.runs = 1");
    }
    Output trace(opt.trace_path);
    report = simulate(cfg.traffic, cfg.link, cfg.rtwt, cfg.buffer, cfg.sim,
                      csv_trace_writer(trace.stream()));
  } else {
    report = replicate(cfg.traffic, cfg.link, cfg.rtwt, cfg.buffer, cfg.sim, cfg.sim_runs);
  }
  Output out(opt.out_path);
  if (opt.format == "table") {
    write_table(out.stream(), report);
  } else {
    out.stream() << to_json(report).dump(2) << '\n';
  }
  return kOk;
}

int cmd_validate(const Options& opt) {
  check_format(opt, {"csv", "json"});
  const RunConfig cfg = resolve_config(opt);
  const SweepAxis axis = parse_axis(opt.axis);
  const auto rows = run_validation(cfg.traffic, cfg.link, cfg.rtwt, cfg.buffer, axis,
                                   parse_axis_values(axis, opt.values), cfg.evaluate_options(),
                                   cfg.sim, cfg.sim_runs);
  Output out(opt.out_path);
  write_validation_csv(out.stream(), rows, axis);
  bool any_ok = false;
  for (const auto& r : rows) {
    any_ok = any_ok || r.error.empty();
  }
  if (!any_ok) {
    std::cerr << "error: every validation row failed\n";
    return kModel;
  }
  return kOk;
}

int cmd_optimize(const Options& opt) {
  check_format(opt, {"json", "table"});
  const RunConfig cfg = resolve_config(opt);
  const OptimalChoice c = optimize(cfg.traffic, cfg.link, cfg.buffer, cfg.qos, cfg.grid);
  Output out(opt.out_path);
  if (opt.format == "table") {
    write_table(out.stream(), c, cfg.qos);
  } else {
    out.stream() << to_json(c, cfg.qos).dump(2) << '\n';
  }
  return kOk;
}

int cmd_experiment(const Options& opt) {
  const RunConfig cfg = resolve_config(opt);
  ExperimentOptions eo;
  eo.period_step = parse_duration(opt.step);
  if (!(eo.period_step.count() > 0.0)) {
    throw ConfigError("--step must be > 0");
  }
  const auto tables = run_experiment(opt.experiment, cfg, eo);
  const std::filesystem::path dir = opt.out_path.empty() ? "." : opt.out_path;
  std::filesystem::create_directories(dir);
  for (const auto& t : tables) {
    const auto path = dir / (t.name + ".csv");
    std::ofstream f(path);
    if (!f) {
      throw ConfigError("cannot write '" + path.string() + "'");
    }
    f << t.csv;
    std::cout << path.string() << '\n';
  }
  return kOk;
}

int cmd_emit_config(const Options& opt) {
  const RunConfig cfg = resolve_config(opt);
  Output out(opt.out_path);
  out.stream() << to_json(cfg).dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay/loss model, simulator and parameter search for dedicated R-TWT service periods"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_path, "JSON config file (defaults to the reference scenario)");
  app.add_option("--set", opt.overrides, "Override a config key, e.g. --set rtwt.period=6ms")
      ->take_all();
  app.add_option("--out", opt.out_path, "Output file (experiment: output directory)");
  app.add_option("--format", opt.format, "Output format")
      ->check(CLI::IsMember({"json", "table", "csv"}));
  app.add_option("--seed", opt.seed, "Simulator seed");

  auto* model = app.add_subcommand("model", "Evaluate the analytical model");
  auto* pmf_opt = model->add_option("--pmf", opt.pmf_path,
                                    "Also emit the delay pmf as CSV (to PATH, or after the report)")
                      ->expected(0, 1);
  auto* sim = app.add_subcommand("simulate", "Run the event-driven simulator");
  sim->add_option("--trace", opt.trace_path, "Write an event trace CSV");
  auto* validate = app.add_subcommand("validate", "Compare model and simulator along one axis");
  validate->add_option("--axis", opt.axis, "period | sp_slots | interarrival");
  validate->add_option("--values", opt.values, "Comma list or first:last:step, e.g. 1ms:16ms:1ms")
      ->required();
  auto* optimize = app.add_subcommand("optimize", "Search (T, N) maximising capacity under QoS");
  auto* experiment = app.add_subcommand("experiment", "Regenerate figure data tables as CSV");
  experiment->add_option("name", opt.experiment, "fig2 | fig3 | fig4 | fig5")->required();
  experiment->add_option("--step", opt.step, "Period step of the fig2 sweep");
  auto* emit = app.add_subcommand("emit-config", "Print the resolved config as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  opt.want_pmf = pmf_opt->count() > 0;
  if (validate->parsed() && opt.format == "json") {
    opt.format = "csv";
  }

  try {
    if (model->parsed()) return cmd_model(opt);
    if (sim->parsed()) return cmd_simulate(opt);
    if (validate->parsed()) return cmd_validate(opt);
    if (optimize->parsed()) return cmd_optimize(opt);
    if (experiment->parsed()) return cmd_experiment(opt);
    if (emit->parsed()) return cmd_emit_config(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kModel;
  } catch (const SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << '\n';
    return kSimulation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
