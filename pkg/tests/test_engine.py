import json
import math
from dataclasses import replace

import pytest

from coordpursuit import scenario
from coordpursuit.core import EnergyLedger, GameConfig, validate
from coordpursuit.engine import Simulation, detect_capture, detect_crossing, run, step
from coordpursuit.errors import AdmissibilityError, HypothesisViolated
from coordpursuit.geometry import Ellipse


@pytest.fixture(scope="module")
def golden():
    return scenario.builtin("golden")


def test_step_examples():
    out, n = step([(0.0, 0.0)], [(1.0, 2.0)], 0.1)
    assert out == [pytest.approx((0.1, 0.2))] and n == 0
    led = EnergyLedger((1.0, 1.0))
    out, _ = step([(0.3, 0.4)], [(0.0, 0.0)], 0.5, [led])
    assert out == [(0.3, 0.4)] and led.consumed == [0.0, 0.0]
    p = (0.0, 0.0)
    for _ in range(8):
        (p,), _ = step([p], [(0.25, -0.5)], 0.125)
    assert p == (0.25, -0.5)


def test_step_projects_and_counts():
    e = Ellipse((0.0, 0.0), (1.0, 1.0))
    out, n = step([(0.9, 0.0)], [(1.0, 0.0)], 1.0, region=e)
    assert n == 1 and out[0] == pytest.approx((1.0, 0.0))


def test_step_overdraft_raises():
    with pytest.raises(AdmissibilityError):
        step([(0.0, 0.0)], [(10.0, 0.0)], 1.0, [EnergyLedger((1.0, 1.0))])


def test_detect_crossing_examples():
    # (x_1, y_1) pairs: gap 0.3 then -0.1
    assert detect_crossing((0.0, 0.3), (0.2, 0.1), 5.0, 0.2) == pytest.approx(5.15)
    assert detect_crossing((1.0, 1.0), (1.0, 2.0), 5.0, 0.2) == 5.0
    assert detect_crossing((0.0, 1.0), (0.1, 1.0), 5.0, 0.2) is None


def test_detect_capture_examples():
    assert detect_capture([(1.0, 1.0)], (1.0, 1.0), [(1.0, 1.0)], (1.0, 1.0), 2.0, 0.1, 1e-6) == (0, 2.0)
    hit = detect_capture([(0.0, 0.0), (5.0, 0.0)], (1.0, 0.0), [(1.6, 0.0), (5.0, 0.0)], (1.0, 0.0), 0.0, 1.0, 0.1)
    assert hit[0] == 0 and hit[1] == pytest.approx(0.9 / 1.6)
    assert detect_capture([(0.0, 0.0)], (1.0, 0.0), [(0.1, 0.0)], (1.0, 0.0), 0.0, 1.0, 0.1) is None


def test_golden_idle_captured_by_first(golden):
    tr, rep = run(golden.config, "idle")
    d = validate(golden.config)
    assert rep.captured and rep.capturing_pursuer == 1
    assert rep.capture_time <= d.T_pre + d.t_i1[0] + d.t_i2[0]
    assert rep.projection_events == 0
    assert not rep.guarantee_violated


def test_golden_splitter_captured_by_second(golden):
    tr, rep = run(golden.config, {"kind": "window_splitter", "overdraw_fraction": 0.05})
    assert rep.captured and rep.capturing_pursuer == 2
    assert rep.windows[0]["outcome"] == "failed"
    assert rep.windows[0]["window_v1_energy"] > rep.windows[0]["sigma_i1_sq"]
    assert rep.windows[1]["window_v1_energy"] <= rep.windows[1]["sigma_i1_sq"]


def test_stationary_evader_crossing_time():
    # pursuer at one end of the chord, evader above the other end
    cfg = GameConfig(Ellipse((0.0, 0.0), (3.0, 2.0)), ((1.0, 1.0),), (0.5, 0.5), ((-3.0, 0.0),), (3.0, 0.0))
    cfg = replace(cfg, evader_position=(2.999, 0.05))
    sim = Simulation(cfg, "idle")
    tr, rep = sim.run()
    d = sim.derived
    crossing = next(e for e in tr.events if e[1] == "crossing")
    assert crossing[0] == pytest.approx(5.999 / 6.0 * d.t_i1[0], rel=1e-12)


def test_exploratory_run_may_miss(golden):
    cfg = replace(golden.config, evader_budgets=(3.0, 3.0))
    with pytest.raises(HypothesisViolated):
        Simulation(cfg, "greedy_flee")
    tr, rep = run(cfg, "greedy_flee", exploratory=True)
    assert not rep.guarantee_applies
    assert not rep.guarantee_violated
    assert "exploratory" in rep.flags


def test_trace_shape_and_time(golden):
    tr, rep = run(golden.config, "random_admissible")
    ts = [r[0] for r in tr.rows]
    assert all(b > a for a, b in zip(ts, ts[1:]))
    dt = rep.dt
    assert all(r[1] <= dt * (1 + 1e-9) for r in tr.rows)
    assert tr.rows[-1][1] == 0.0
    assert rep.steps == len(tr.rows) - 1


def test_exports(golden, tmp_path):
    tr, rep = run(golden.config, "idle")
    lines = tr.to_ndjson().splitlines()
    assert len(lines) == len(tr.rows)
    first = json.loads(lines[0])
    assert set(first) == {"t", "h", "active", "phase", "positions", "controls", "energies"}
    assert len(first["positions"]["pursuers"]) == 2
    csv_lines = tr.to_csv().splitlines()
    assert csv_lines[0].split(",") == tr.columns()
    assert len(csv_lines) == len(tr.rows) + 1
    doc = json.loads(rep.to_json())
    assert doc["captured"] is True and doc["capturing_pursuer"] == 1
    arrays = tr.as_arrays()
    assert arrays["x"].shape == (len(tr.rows), 2, 2)


def test_determinism(golden):
    a, ra = run(golden.config, "random_admissible")
    b, rb = run(golden.config, "random_admissible")
    assert a.to_ndjson() == b.to_ndjson()
    assert ra.to_json() == rb.to_json()


def test_capture_time_converges_with_dt(golden):
    d = validate(golden.config)
    times = [run(replace(golden.config, dt=d.dt / 2**k), "idle")[1].capture_time for k in range(3)]
    assert abs(times[0] - times[1]) <= d.dt
    assert abs(times[1] - times[2]) <= d.dt / 2


def test_verbatim_stop_rule_still_captures(golden):
    for kind in ("idle", "boundary_hugger", "greedy_flee"):
        _, rep = run(golden.config, kind, stop_rule="verbatim")
        assert rep.captured


def test_ledgers_within_budget(golden):
    sim = Simulation(golden.config, {"kind": "window_splitter", "overdraw_fraction": 0.05})
    tr, rep = sim.run()
    d = sim.derived
    for i, e in enumerate(rep.pursuer_energy):
        assert e[0] <= d.chase_budgets[i] * (1 + 1e-9)
        assert e[1] <= d.cross_budgets[i] * (1 + 1e-9)
