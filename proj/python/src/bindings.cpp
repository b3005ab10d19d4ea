#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "rtwt/config.hpp"
#include "rtwt/model.hpp"
#include "rtwt/optimizer.hpp"
#include "rtwt/params.hpp"
#include "rtwt/report.hpp"
#include "rtwt/simulator.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// Configs cross the boundary as JSON text; the Python side wraps them in dicts.
rtwt::RunConfig parse(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw rtwt::ConfigError(e.what());
  }
  return rtwt::load_config(doc);
}

std::string evaluate(const std::string& config, bool with_pmf) {
  const auto cfg = parse(config);
  const auto e = rtwt::evaluate(cfg.traffic, cfg.link, cfg.rtwt, cfg.buffer, cfg.evaluate_options());
  json out = rtwt::to_json(e.report);
  if (with_pmf) {
    out["pmf"] = e.pmf.mass;
    out["slot_s"] = cfg.traffic.slot_time.count();
  }
  return out.dump();
}

std::string simulate(const std::string& config) {
  const auto cfg = parse(config);
  rtwt::SimReport r;
  {
    py::gil_scoped_release release;
    r = rtwt::replicate(cfg.traffic, cfg.link, cfg.rtwt, cfg.buffer, cfg.sim, cfg.sim_runs);
  }
  return rtwt::to_json(r).dump();
}

std::string optimize(const std::string& config) {
  const auto cfg = parse(config);
  rtwt::OptimalChoice c;
  {
    py::gil_scoped_release release;
    c = rtwt::optimize(cfg.traffic, cfg.link, cfg.buffer, cfg.qos, cfg.grid);
  }
  return rtwt::to_json(c, cfg.qos).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "R-TWT delay model, simulator and parameter search";

  static py::exception<rtwt::ModelError> model_error(m, "ModelError", PyExc_RuntimeError);
  static py::exception<rtwt::SimulationError> sim_error(m, "SimulationError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const rtwt::ConfigError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const rtwt::InvalidParameter& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const rtwt::ModelError& e) {
      py::set_error(model_error, e.what());
    } catch (const rtwt::SimulationError& e) {
      py::set_error(sim_error, e.what());
    }
  });

  m.def("default_config", [] { return rtwt::to_json(rtwt::default_config()).dump(); });
  m.def("normalize_config", [](const std::string& c) { return rtwt::to_json(parse(c)).dump(); },
        py::arg("config"));
  m.def("evaluate", &evaluate, py::arg("config"), py::arg("with_pmf") = false);
  m.def("simulate", &simulate, py::arg("config"));
  m.def("optimize", &optimize, py::arg("config"));

  m.def(
      "slotify",
      [](double slot_s, double period_s, int sp_slots, int buffer, bool allow) {
        rtwt::TrafficSpec t{0.0, rtwt::Seconds(slot_s)};
        rtwt::RtwtSpec r;
        r.period = rtwt::Seconds(period_s);
        r.sp_slots = sp_slots;
        const auto s = rtwt::slotify(t, r, buffer, rtwt::SlotifyOptions{allow});
        return py::dict(py::arg("sp_slots") = s.sp_slots, py::arg("vacation_slots") = s.vacation_slots,
                        py::arg("buffer") = s.buffer,
                        py::arg("discretization_error") = s.discretization_error);
      },
      py::arg("slot_s"), py::arg("period_s"), py::arg("sp_slots"), py::arg("buffer") = 20,
      py::arg("allow_discretization_error") = false);

  m.def(
      "batch_distribution",
      [](double rate, double slot_s, double p_err, int retry_limit) {
        const auto b = rtwt::batch_distribution(rtwt::TrafficSpec{rate, rtwt::Seconds(slot_s)},
                                                rtwt::LinkSpec{p_err, retry_limit});
        return py::dict(py::arg("b0") = b.b0, py::arg("b") = b.b, py::arg("b_success") = b.b_success,
                        py::arg("b_fail") = b.b_fail, py::arg("b_hat") = b.b_hat);
      },
      py::arg("rate"), py::arg("slot_s"), py::arg("p_err"), py::arg("retry_limit"));

  m.def(
      "capacity",
      [](double period_s, int sp_slots, double slot_s) {
        rtwt::RtwtSpec r;
        r.period = rtwt::Seconds(period_s);
        r.sp_slots = sp_slots;
        return rtwt::system_capacity(r, rtwt::TrafficSpec{0.0, rtwt::Seconds(slot_s)});
      },
      py::arg("period_s"), py::arg("sp_slots"), py::arg("slot_s"));
}
