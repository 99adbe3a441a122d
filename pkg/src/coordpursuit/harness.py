"""Randomized verification battery for the capture guarantee.

Every run is checked after the fact from its trace alone: ledgers, containment,
a single moving pursuer after pre-alignment, horizontal alignment while
mirroring, the window-energy inequality and the capture-time bound. Failing
scenarios are shrunk greedily and written out as scenario files.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import scenario as scenario_io
from .core import ENERGY_RTOL, GameConfig
from .engine import CaptureReport, Simulation, SimulationTrace
from .errors import ConfigError, GameError
from .evader import POLICY_KINDS, WindowSplitter, make_policy, splitter_plan
from .geometry import Ellipse, Polygon
from .scenario import Scenario
from .strategy import Phase

MIN_MARGIN = 0.05
# Coarsest step the sampler allows, as a fraction of T_bound. Event splitting
# keeps the strategy exact at any step, so this only bounds runtime.
HARNESS_STEPS = 3000

DEFAULT_POLICIES: tuple[dict, ...] = (
    {"kind": "idle"},
    {"kind": "random_admissible"},
    {"kind": "greedy_flee"},
    {"kind": "window_splitter", "overdraw_fraction": 0.05},
    {"kind": "boundary_hugger"},
)


def policy_specs(names: Iterable[str] | None) -> list[dict]:
    if names is None:
        return [dict(p) for p in DEFAULT_POLICIES]
    out = []
    for name in names:
        if name not in POLICY_KINDS:
            raise ConfigError(f"unknown evader kind {name!r}; expected one of {POLICY_KINDS}")
        out.append(next(dict(p) for p in DEFAULT_POLICIES if p["kind"] == name))
    return out


# -- scenario sampling -------------------------------------------------------

def _random_polygon(rng: random.Random) -> Polygon:
    n = rng.randint(5, 16)
    a = rng.uniform(1.0, 4.0)
    b = a * rng.uniform(0.3, 1.0)
    rot = rng.uniform(0.0, math.pi)
    cx, cy = rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)
    if rng.random() < 0.5:
        # vertices on an ellipse arc; skipping part of the turn gives flat sides
        span = rng.uniform(math.pi, 2.0 * math.pi)
        angles = sorted(rng.uniform(0.0, span) for _ in range(n))
    else:
        angles = sorted(rng.uniform(0.0, 2.0 * math.pi) for _ in range(n))
    cr, sr = math.cos(rot), math.sin(rot)
    pts = []
    for t in angles:
        x, y = a * math.cos(t), b * math.sin(t)
        pts.append((cx + cr * x - sr * y, cy + sr * x + cr * y))
    try:
        return Polygon(tuple(pts))
    except ConfigError:
        # nearly collinear triples; fall back to evenly spaced vertices
        pts = []
        for k in range(n):
            t = 2.0 * math.pi * k / n
            x, y = a * math.cos(t), b * math.sin(t)
            pts.append((cx + cr * x - sr * y, cy + sr * x + cr * y))
        return Polygon(tuple(pts))


def _random_ellipse(rng: random.Random) -> Ellipse:
    a = rng.uniform(1.0, 4.0)
    return Ellipse((rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)), (a, a * rng.uniform(0.3, 1.0)),
                   rng.uniform(0.0, math.pi))


def _uniform_point(rng: random.Random, region) -> tuple[float, float]:
    pts = region.boundary_points(64)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    lo_x, hi_x, lo_y, hi_y = min(xs), max(xs), min(ys), max(ys)
    while True:
        p = (rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y))
        if region.contains(p, 0.0):
            return p


def harness_dt(config: GameConfig) -> float:
    from .core import validate

    d = validate(config)
    return max(d.dt, d.T_bound / HARNESS_STEPS)


def sample_scenario(rng: random.Random, seed: int = 0) -> Scenario:
    """One random game satisfying the capture condition with margin >= 5%."""
    m = rng.randint(1, 5)
    region = _random_polygon(rng) if rng.random() < 0.6 else _random_ellipse(rng)
    budgets = [(rng.uniform(0.3, 3.0), rng.uniform(0.3, 3.0)) for _ in range(m)]
    tot = [sum(b[j] for b in budgets) for j in (0, 1)]
    j = rng.randrange(2)
    margin = rng.uniform(MIN_MARGIN, 0.6)
    sig = [0.0, 0.0]
    # total / sigma^2 - 1 = margin on the chosen coordinate
    sig[j] = tot[j] / (1.0 + margin)
    sig[1 - j] = tot[1 - j] * rng.uniform(0.3, 1.5)
    config = GameConfig(
        region=region,
        pursuer_budgets=tuple(budgets),
        evader_budgets=tuple(sig),
        pursuer_positions=tuple(_uniform_point(rng, region) for _ in range(m)),
        evader_position=_uniform_point(rng, region),
        rng_seed=seed,
    )
    config = replace(config, dt=harness_dt(config))
    return Scenario(config=config, name=f"random-{seed}")


def sample_scenarios(n: int, seed: int) -> list[Scenario]:
    rng = random.Random(seed)
    return [sample_scenario(rng, seed=rng.randrange(2**31)) for _ in range(n)]


def near_boundary_scenarios() -> list[Scenario]:
    """Three pinned games at 0.1% margin, run on a coarse step."""
    out = []
    specs = [
        (Ellipse((0.0, 0.0), (2.0, 1.0), 0.3), [(1.0, 1.0)], (0.0, 0.4), (-1.0, -0.2)),
        (
            Polygon(((-2.0, -1.0), (2.0, -1.0), (2.5, 0.5), (0.0, 1.5), (-2.5, 0.5))),
            [(0.5, 1.0), (1.0, 2.0), (1.5, 0.5)],
            (1.8, -0.5),
            (-1.0, 0.2),
        ),
        (
            Polygon(tuple((math.cos(k * math.pi / 3), 2.0 * math.sin(k * math.pi / 3)) for k in range(6))),
            [(2.0, 1.0), (2.0, 0.8)],
            (0.0, 1.2),
            (0.3, -0.5),
        ),
    ]
    for k, (region, budgets, y0, x_hint) in enumerate(specs):
        tot = [sum(b[j] for b in budgets) for j in (0, 1)]
        # axis 2 carries the 0.1% margin in the hexagon case
        if k == 2:
            sig = (tot[0] * 1.2, tot[1] / 1.001)
        else:
            sig = (tot[0] / 1.001, tot[1] * 1.2)
        positions = tuple((x_hint[0] + 0.3 * i, x_hint[1] - 0.1 * i) for i in range(len(budgets)))
        config = GameConfig(region, tuple(budgets), sig, positions, y0, rng_seed=100 + k)
        from .core import validate

        d = validate(config)
        config = replace(config, dt=d.T_bound / 2000.0)
        out.append(Scenario(config=config, name=f"near-boundary-{k + 1}"))
    return out


def pinned_scenarios() -> list[Scenario]:
    return [scenario_io.builtin("golden"), *near_boundary_scenarios()]


# -- post-hoc trace checks ---------------------------------------------------

def _eps(b: float) -> float:
    return ENERGY_RTOL * b


def window_energies(trace: SimulationTrace) -> list[float]:
    """Horizontal evader energy over each window's mirror part, recomputed from the steps."""
    out = []
    rows = trace.rows
    for w in trace.windows:
        if w.mirror_start is None or w.end is None:
            out.append(0.0)
            continue
        start = w.mirror_start
        total = 0.0
        for r in rows:
            if start <= r[0] < w.end and r[1] > 0.0:
                total += r[5][0] * r[5][0] * r[1]
        out.append(total)
    return out


def check_pigeonhole(trace: SimulationTrace, report: CaptureReport | None = None) -> bool:
    """Some reached window is compliant (or capture came early) and the windows share sigma_1^2."""
    d = trace.derived
    sig = d.sigma_i1_sq
    energies = window_energies(trace)
    recorded = [w.v1_energy for w in trace.windows]
    for a, b in zip(energies, recorded):
        if abs(a - b) > 1e-9 * max(1.0, d.evader_chase_budget):
            return False
    if report is not None:
        for a, w in zip(recorded, report.windows):
            if a != w["window_v1_energy"]:
                return False
    if math.fsum(energies) > d.evader_chase_budget + _eps(d.evader_chase_budget):
        return False
    reached = len(trace.windows)
    compliant = [e <= sig[w.pursuer] + _eps(d.evader_chase_budget) for e, w in zip(energies, trace.windows)]
    captured = any(e[1] == "capture" for e in trace.events)
    early = captured and (reached < d.m or trace.windows[-1].outcome != "failed")
    return any(compliant) or early


def check_prealign(trace: SimulationTrace) -> bool:
    """Everyone is on the chord at T_pre having spent at most a quarter of the vertical budget."""
    d = trace.derived
    if d.T_pre <= 0.0:
        return all(p[1] == 0.0 for p in d.pursuer_start)
    scale = max(abs(p[1]) for p in d.pursuer_start)
    row = next((r for r in trace.rows if r[0] >= d.T_pre), None)
    if row is None:
        # captured during pre-alignment
        return any(e[1] == "capture" for e in trace.events)
    for i in range(d.m):
        if abs(row[2][2 * i + 1]) > 1e-9 * scale:
            return False
        b = d.cross_budgets[i]
        if row[6][2 * i + 1] > 0.25 * b + _eps(b):
            return False
        if b - row[6][2 * i + 1] < 0.75 * b - _eps(b):
            return False
    return True


def check_trace_invariants(trace: SimulationTrace) -> list[str]:
    """Re-assert engine, strategy and evader invariants on a finished trace."""
    d = trace.derived
    region = d.region
    m = d.m
    problems = []
    budgets = []
    for i in range(m):
        budgets += [d.chase_budgets[i], d.cross_budgets[i]]
    ebud = (d.evader_chase_budget, d.evader_cross_budget)
    dt = trace.meta.get("dt", d.dt)
    prev_t = -math.inf
    vmax = 0.0
    rows = trace.rows
    for k, (t, h, xs, y, us, v, pe, ee, active, phase) in enumerate(rows):
        if not t > prev_t:
            problems.append(f"time not increasing at row {k}")
            break
        prev_t = t
        for e, b in zip(pe, budgets):
            if e > b + _eps(b):
                problems.append(f"pursuer ledger overdraft at t={t}")
                break
        for e, b in zip(ee, ebud):
            if e > b + _eps(b):
                problems.append(f"evader ledger overdraft at t={t}")
        for i in range(m):
            if not region.contains((xs[2 * i], xs[2 * i + 1]), d.boundary_tol):
                problems.append(f"pursuer {i + 1} outside region at t={t}")
        if not region.contains(y, d.boundary_tol):
            problems.append(f"evader outside region at t={t}")
        if t >= d.T_pre and phase != Phase.PREALIGN.value:
            movers = sum(1 for i in range(m) if us[2 * i] != 0.0 or us[2 * i + 1] != 0.0)
            if movers > 1:
                problems.append(f"{movers} pursuers moving at t={t}")
        vmax = max(vmax, abs(v[0]))
        if phase == Phase.MIRROR_AND_DRIVE.value and active >= 0:
            gap = abs(xs[2 * active] - y[0])
            if gap > 2.0 * dt * vmax + d.capture_tol:
                problems.append(f"alignment lost by pursuer {active + 1} at t={t} (gap {gap:.3g})")
        if problems:
            break
    if rows:
        if any(r[1] <= 0.0 for r in rows[:-1]):
            problems.append("empty step recorded")
    return problems


def check_window_splitter(trace: SimulationTrace, policy: WindowSplitter) -> bool:
    """Fully elapsed windows are overdrawn exactly where the plan says so."""
    d = trace.derived
    plan = splitter_plan(d.sigma_i1_sq, d.evader_chase_budget, policy.overdraw_fraction)
    overdrawn = [p > s * (1.0 + ENERGY_RTOL) for p, s in zip(plan, d.sigma_i1_sq)]
    eps = _eps(d.evader_chase_budget)
    for w, e in zip(trace.windows, window_energies(trace)):
        i = w.pursuer
        if w.outcome == "failed" and w.tau_i1 is not None:
            if (e > d.sigma_i1_sq[i] + eps) != overdrawn[i]:
                return False
        elif e > plan[i] + eps:
            return False
    return True


# -- running -----------------------------------------------------------------

@dataclass
class RunResult:
    name: str
    policy: dict
    captured: bool
    capture_time: float | None
    T_bound: float
    dt: float
    slack: float | None
    ok: bool
    problems: list = field(default_factory=list)
    failed_windows: int = 0


def run_checked(sc: Scenario, policy_spec: dict) -> tuple[RunResult, SimulationTrace | None, CaptureReport | None]:
    policy = make_policy(policy_spec)
    try:
        sim = Simulation(sc.config, policy, exploratory=sc.exploratory, stop_rule=sc.stop_rule)
        trace, report = sim.run()
    except GameError as exc:
        return RunResult(sc.name, policy_spec, False, None, math.nan, math.nan, None, False,
                         [f"{type(exc).__name__}: {exc}"]), None, None
    problems = check_trace_invariants(trace)
    if report.guarantee_applies:
        if not report.captured:
            problems.append("no capture")
        elif report.capture_time > report.T_bound + report.dt:
            problems.append(f"capture at {report.capture_time} after bound {report.T_bound + report.dt}")
        if not check_pigeonhole(trace, report):
            problems.append("window energy inequality")
    if not check_prealign(trace):
        problems.append("pre-alignment")
    if isinstance(policy, WindowSplitter) and not check_window_splitter(trace, policy):
        problems.append("window splitter did not overdraw as planned")
    if report.projection_events:
        problems.append(f"{report.projection_events} projection events")
    failed = sum(1 for w in trace.windows if w.outcome == "failed")
    if failed > sim.derived.m - 1:
        problems.append(f"{failed} failed windows")
    res = RunResult(
        name=sc.name,
        policy=policy_spec,
        captured=report.captured,
        capture_time=report.capture_time,
        T_bound=report.T_bound,
        dt=report.dt,
        slack=report.bound_slack,
        ok=not problems,
        problems=problems,
        failed_windows=failed,
    )
    return res, trace, report


def shrink(sc: Scenario, fails: Callable[[Scenario], bool], max_rounds: int = 50) -> Scenario:
    """Greedily simplify ``sc`` while ``fails`` keeps returning True.

    Candidates drop a pursuer, drop a polygon vertex, or double the step.
    """
    cur = sc
    for _ in range(max_rounds):
        for cand in _shrink_candidates(cur):
            try:
                still = fails(cand)
            except ConfigError:
                continue
            if still:
                cur = cand
                break
        else:
            return cur
    return cur


def _shrink_candidates(sc: Scenario):
    cfg = sc.config
    if cfg.m > 1:
        for i in range(cfg.m):
            keep = [k for k in range(cfg.m) if k != i]
            try:
                yield replace(sc, config=replace(
                    cfg,
                    pursuer_budgets=tuple(cfg.pursuer_budgets[k] for k in keep),
                    pursuer_positions=tuple(cfg.pursuer_positions[k] for k in keep),
                ))
            except ConfigError:
                pass
    if isinstance(cfg.region, Polygon) and len(cfg.region.vertices) > 3:
        vs = cfg.region.vertices
        for i in range(len(vs)):
            try:
                poly = Polygon(vs[:i] + vs[i + 1:])
                yield replace(sc, config=replace(cfg, region=poly))
            except ConfigError:
                pass
    if cfg.dt is not None:
        try:
            yield replace(sc, config=replace(cfg, dt=2.0 * cfg.dt))
        except ConfigError:
            pass


@dataclass
class HarnessReport:
    runs: int = 0
    captured: int = 0
    passed: int = 0
    worst_slack: float | None = None
    failures: list = field(default_factory=list)
    elapsed: float = 0.0
    results: list = field(default_factory=list, repr=False)

    @property
    def ok(self) -> bool:
        return self.passed == self.runs

    def summary(self) -> dict:
        return {
            "runs": self.runs,
            "captured": self.captured,
            "passed": self.passed,
            "worst_slack": self.worst_slack,
            "failures": self.failures,
            "elapsed_s": round(self.elapsed, 3),
        }


def run_battery(
    scenarios: Sequence[Scenario],
    policies: Sequence[dict] | None = None,
    out_dir: str | Path | None = None,
    shrink_failures: bool = True,
    on_result: Callable[[RunResult, SimulationTrace | None, CaptureReport | None], None] | None = None,
) -> HarnessReport:
    policies = [dict(p) for p in (policies or DEFAULT_POLICIES)]
    rep = HarnessReport()
    t0 = time.perf_counter()
    for sc in scenarios:
        for spec in policies:
            res, trace, report = run_checked(sc, spec)
            rep.runs += 1
            rep.captured += res.captured
            rep.results.append(res)
            if on_result is not None:
                on_result(res, trace, report)
            if res.slack is not None and (rep.worst_slack is None or res.slack < rep.worst_slack):
                rep.worst_slack = res.slack
            if res.ok:
                rep.passed += 1
                continue
            entry = {"scenario": sc.name, "policy": spec, "problems": res.problems}
            if out_dir is not None:
                bad = sc
                if shrink_failures:
                    bad = shrink(replace(sc, evader=spec), lambda s: not run_checked(s, spec)[0].ok)
                path = Path(out_dir) / f"{sc.name}-{spec['kind']}.json"
                scenario_io.dump(replace(bad, evader=spec), path)
                entry["repro"] = str(path)
            rep.failures.append(entry)
    rep.elapsed = time.perf_counter() - t0
    return rep


def check_capture_guarantee(
    n_scenarios: int = 200,
    seed: int = 0,
    policies: Sequence[str] | None = None,
    out_dir: str | Path | None = None,
    include_pinned: bool = False,
) -> HarnessReport:
    """Run ``n_scenarios`` random games against every policy and check each trace."""
    scenarios = sample_scenarios(n_scenarios, seed)
    if include_pinned:
        scenarios = pinned_scenarios() + scenarios
    return run_battery(scenarios, policy_specs(policies), out_dir=out_dir)


def write_summary(rep: HarnessReport, path: str | Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(rep.summary(), indent=2, default=str) + "\n", encoding="utf-8")
