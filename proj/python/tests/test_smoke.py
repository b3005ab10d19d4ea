import json
import os
import pathlib
import subprocess

import jsonschema
import pytest

import rtwtplan

ROOT = pathlib.Path(__file__).resolve().parents[2]
SCHEMAS = ROOT / "schemas"
CLI = os.environ.get("RTWT_CLI")


def schema(name):
    return json.loads((SCHEMAS / name).read_text())


def small_sim(config):
    config["sim"].update(measured_packets=20000, warmup_packets=200)
    return config


def test_default_config_matches_shipped_file():
    shipped = json.loads((ROOT / "configs" / "default.json").read_text())
    assert rtwtplan.normalize_config(shipped) == rtwtplan.default_config()
    jsonschema.validate(shipped, schema("config.schema.json"))


def test_evaluate():
    report = rtwtplan.evaluate(with_pmf=True)
    pmf = report.pop("pmf")
    slot = report.pop("slot_s")
    jsonschema.validate(report, schema("model_report.schema.json"))
    assert report["loss_prob"] == pytest.approx(1e-3, rel=1e-12)
    assert sum(pmf) == pytest.approx(1.0, abs=1e-9)
    assert pmf[0] == 0.0
    mean = slot * sum(d * p for d, p in enumerate(pmf))
    assert mean == pytest.approx(report["mean_delay_s"], rel=1e-9)


def test_simulate_is_deterministic():
    config = small_sim(rtwtplan.default_config())
    a = rtwtplan.simulate(config)
    b = rtwtplan.simulate(config)
    assert a == b
    jsonschema.validate(a, schema("sim_report.schema.json"))
    assert a["offered"] == a["delivered"] + a["lost_retry"] + a["lost_overflow"]


def test_optimize():
    config = rtwtplan.default_config()
    config["grid"]["period_step"] = "0.5ms"
    result = rtwtplan.optimize(config)
    jsonschema.validate(result, schema("optimize_report.schema.json"))
    assert result["feasible"]
    assert result["achieved_s"] <= result["target_s"]


def test_helpers():
    b = rtwtplan.batch_distribution(62.5, 114.4e-6, 0.1, 3)
    assert b["b"] == pytest.approx(7.1245e-3, rel=1e-4)
    assert b["b0"] + sum(b["b_hat"]) == pytest.approx(1.0, abs=1e-12)
    s = rtwtplan.slotify(114.4e-6, 10e-3, 3)
    assert (s["sp_slots"], s["vacation_slots"]) == (3, 84)
    assert rtwtplan.capacity(4e-3, 1, 114.4e-6) == pytest.approx(34.965, rel=1e-4)


def test_errors():
    with pytest.raises(ValueError, match="traffic"):
        rtwtplan.evaluate({"link": {"error_prob": 0.1, "retry_limit": 3}})
    config = rtwtplan.default_config()
    del config["traffic"]["interarrival"]
    config["traffic"]["rate"] = "0/s"
    with pytest.raises(rtwtplan.ModelError):
        rtwtplan.evaluate(config)
    config = small_sim(rtwtplan.default_config())
    config["sim"]["max_sim_time"] = "1s"
    with pytest.raises(rtwtplan.SimulationError):
        rtwtplan.simulate(config)


@pytest.mark.skipif(CLI is None, reason="RTWT_CLI not set")
@pytest.mark.parametrize(
    "args, schema_name",
    [
        (["model"], "model_report.schema.json"),
        (["simulate", "--set", "sim.measured_packets=5000"], "sim_report.schema.json"),
        (["optimize", "--set", "grid.period_step=1ms"], "optimize_report.schema.json"),
        (["emit-config"], "config.schema.json"),
    ],
)
def test_cli_json_matches_schema(args, schema_name):
    out = subprocess.run([CLI, *args], check=True, capture_output=True, text=True).stdout
    jsonschema.validate(json.loads(out), schema(schema_name))
