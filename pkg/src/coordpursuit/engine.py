"""Fixed-step simulator for the single-integrator game.

Controls are piecewise constant, so explicit Euler is exact. Steps are cut
at scheduled strategy times (end of pre-alignment, stage-1 deadlines, window
ends) and split at stage-1 crossings and captures found by linear
interpolation inside the step.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

from . import kernels
from .core import ENERGY_RTOL, EnergyLedger, GameConfig, validate
from .evader import EvaderPolicy, make_policy
from .geometry import ConvexRegion, Point
from .strategy import Phase, Scheduler

EVENT_KINDS = (
    "prealign_done",
    "window_start",
    "crossing",
    "window_failed",
    "boundary_stop",
    "capture",
    "budget_exhausted",
    "projection",
    "alignment_lost",
)

_SNAP = 1e-9


def step(
    positions: Sequence[Point],
    controls: Sequence[Point],
    dt: float,
    ledgers: Sequence[EnergyLedger] | None = None,
    region: ConvexRegion | None = None,
    tol: float = 1e-7,
) -> tuple[list[Point], int]:
    """Advance every player by ``control * dt``.

    Ledgers, when given, are charged in place (overdraft raises). Players
    left outside ``region`` are projected back; the number of projections is
    returned alongside the new positions.
    """
    out = []
    projections = 0
    for k, (p, u) in enumerate(zip(positions, controls)):
        q = (p[0] + u[0] * dt, p[1] + u[1] * dt)
        if ledgers is not None:
            ledgers[k].charge(u, dt)
        if region is not None and not region.contains(q, tol):
            q = region.project(q)
            projections += 1
        out.append(q)
    return out, projections


def detect_crossing(prev: Sequence[float], nxt: Sequence[float], t: float, dt: float) -> float | None:
    """Time at which ``y_1 - x_1`` reaches zero inside ``[t, t + dt]``.

    ``prev`` and ``nxt`` are ``(x_1, y_1)`` at the step ends.
    """
    f = kernels.crossing_fraction(prev[1] - prev[0], nxt[1] - nxt[0])
    return None if f < 0.0 else t + f * dt


def detect_capture(
    xs0: Sequence[Point],
    y0: Point,
    xs1: Sequence[Point],
    y1: Point,
    t: float,
    dt: float,
    capture_tol: float,
) -> tuple[int, float] | None:
    """Earliest ``(pursuer, time)`` with ``|x_i - y| <= capture_tol`` inside the step."""
    best = None
    for i, (a, b) in enumerate(zip(xs0, xs1)):
        f = kernels.capture_fraction(a[0] - y0[0], a[1] - y0[1], b[0] - y1[0], b[1] - y1[1], capture_tol)
        if f >= 0.0 and (best is None or f < best[1]):
            best = (i, f)
    if best is None:
        return None
    return best[0], t + best[1] * dt


class SimulationTrace:
    """Per-step record of a run plus the strategy's events and windows.

    Row ``k`` holds the state at ``t[k]`` and the controls applied on
    ``[t[k], t[k] + h[k]]``; the last row has ``h = 0`` and zero controls.
    Positions are in the game frame (diametral chord on the x-axis);
    energies are ordered (chase axis, cross axis).
    """

    def __init__(self, m: int, meta: dict | None = None, derived=None):
        self.m = m
        self.derived = derived
        self.rows: list[tuple] = []
        self.events: list[tuple] = []
        self.windows: list = []
        self.meta = meta or {}

    def __len__(self):
        return len(self.rows)

    def record(self, t, h, xs, y, us, v, pledgers, eledger, active, phase):
        self.rows.append((
            t,
            h,
            tuple(c for p in xs for c in p),
            y,
            tuple(c for u in us for c in u),
            v,
            tuple(e for led in pledgers for e in led.consumed),
            tuple(eledger.consumed),
            active,
            phase,
        ))

    def columns(self) -> list[str]:
        cols = ["t", "h", "active", "phase"]
        for i in range(1, self.m + 1):
            cols += [f"x{i}_1", f"x{i}_2"]
        cols += ["y_1", "y_2"]
        for i in range(1, self.m + 1):
            cols += [f"u{i}_1", f"u{i}_2"]
        cols += ["v_1", "v_2"]
        for i in range(1, self.m + 1):
            cols += [f"e{i}_1", f"e{i}_2"]
        cols += ["ey_1", "ey_2"]
        return cols

    def step_dicts(self):
        m = self.m
        for t, h, xs, y, us, v, pe, ee, active, phase in self.rows:
            yield {
                "t": t,
                "h": h,
                "active": None if active < 0 else active + 1,
                "phase": phase,
                "positions": {"pursuers": [[xs[2 * i], xs[2 * i + 1]] for i in range(m)], "evader": list(y)},
                "controls": {"pursuers": [[us[2 * i], us[2 * i + 1]] for i in range(m)], "evader": list(v)},
                "energies": {"pursuers": [[pe[2 * i], pe[2 * i + 1]] for i in range(m)], "evader": list(ee)},
            }

    def to_ndjson(self) -> str:
        return "".join(json.dumps(row) + "\n" for row in self.step_dicts())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns())
        for t, h, xs, y, us, v, pe, ee, active, phase in self.rows:
            w.writerow([repr(t), repr(h), "" if active < 0 else active + 1, phase,
                        *map(repr, xs), *map(repr, y), *map(repr, us), *map(repr, v),
                        *map(repr, pe), *map(repr, ee)])
        return buf.getvalue()

    def events_dicts(self) -> list[dict]:
        return [
            {"t": t, "kind": kind, "pursuer": None if i is None else i + 1, **info}
            for t, kind, i, info in self.events
        ]

    def as_arrays(self):
        """Columns as numpy arrays, keyed like :meth:`columns` plus grouped blocks."""
        import numpy as np

        m = self.m
        t = np.array([r[0] for r in self.rows])
        h = np.array([r[1] for r in self.rows])
        xs = np.array([r[2] for r in self.rows]).reshape(len(self.rows), m, 2)
        y = np.array([r[3] for r in self.rows]).reshape(len(self.rows), 2)
        us = np.array([r[4] for r in self.rows]).reshape(len(self.rows), m, 2)
        v = np.array([r[5] for r in self.rows]).reshape(len(self.rows), 2)
        pe = np.array([r[6] for r in self.rows]).reshape(len(self.rows), m, 2)
        ee = np.array([r[7] for r in self.rows]).reshape(len(self.rows), 2)
        active = np.array([r[8] for r in self.rows])
        phase = [r[9] for r in self.rows]
        return {"t": t, "h": h, "x": xs, "y": y, "u": us, "v": v, "ep": pe, "ee": ee,
                "active": active, "phase": phase}


@dataclass
class CaptureReport:
    captured: bool
    capture_time: float | None
    capturing_pursuer: int | None
    T_bound: float
    dt: float
    guarantee_applies: bool
    guarantee_violated: bool
    evader_admissible: bool
    windows: list = field(default_factory=list)
    pursuer_energy: list = field(default_factory=list)
    evader_energy: list = field(default_factory=list)
    projection_events: int = 0
    boundary_stops: int = 0
    steps: int = 0
    flags: list = field(default_factory=list)
    derived: dict = field(default_factory=dict)
    policy: dict = field(default_factory=dict)

    @property
    def bound_slack(self) -> float | None:
        if self.capture_time is None:
            return None
        return self.T_bound + self.dt - self.capture_time

    def to_dict(self) -> dict:
        out = asdict(self)
        out["bound_slack"] = self.bound_slack
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


class Simulation:
    """One run of the game: strategy scheduler, evader policy and integrator."""

    def __init__(
        self,
        config: GameConfig,
        policy: EvaderPolicy | dict | str = "idle",
        *,
        exploratory: bool = False,
        stop_rule: str = "outward",
        dt: float | None = None,
    ):
        self.config = config
        self.derived = validate(config, exploratory=exploratory)
        d = self.derived
        self.dt = float(dt) if dt is not None else d.dt
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        self.policy = policy if isinstance(policy, EvaderPolicy) else make_policy(policy)
        self.scheduler = Scheduler(d, stop_rule)
        self.xs = list(d.pursuer_start)
        self.y = d.evader_start
        self.ledgers = [EnergyLedger((a, b)) for a, b in zip(d.chase_budgets, d.cross_budgets)]
        self.t = 0.0
        self.policy.bind(self)
        self.trace = SimulationTrace(
            d.m, meta={"dt": self.dt, "stop_rule": stop_rule, "derived": d.summary()}, derived=d
        )
        self.projections = 0
        self.capture: tuple[int, float] | None = None

    def _phase_label(self) -> tuple[int, str]:
        sched = self.scheduler
        if sched.prealigning:
            return -1, Phase.PREALIGN.value
        mach = sched.active_machine
        if mach is None:
            return -1, "none"
        return mach.index, mach.phase.value

    def run(self) -> tuple[SimulationTrace, CaptureReport]:
        d = self.derived
        sched = self.scheduler
        trace = self.trace
        region = d.region
        tol = d.capture_tol
        btol = d.boundary_tol
        dt = self.dt
        m = d.m
        t_end = d.T_bound + dt
        policy = self.policy
        eled = policy.ledger
        exhausted = [False, False]
        misaligned: set[int] = set()

        t = 0.0
        hit = detect_capture(self.xs, self.y, self.xs, self.y, t, 0.0, tol)
        if hit is None:
            sched.start(t, self.xs, self.y)
        while hit is None:
            sched.process(t, self.xs, self.y, tol)
            if sched.finished or t >= t_end:
                break
            t_sched = min(sched.next_time(), t_end)
            t_next = t + dt
            if t_next >= t_sched - _SNAP * dt:
                t_next = t_sched
            h = t_next - t
            if not h > 0.0:
                raise RuntimeError(f"non-positive step at t={t!r}")

            xs, y = self.xs, self.y
            v = policy.control(self, t, h)
            us = sched.controls(t, h, xs, y, v, self.ledgers)

            frac = 1.0
            crossing = False
            mach = sched.active_machine
            if mach is not None and mach.phase is Phase.HORIZONTAL_CHASE:
                i = mach.index
                g0 = y[0] - xs[i][0]
                f = kernels.crossing_fraction(g0, g0 + (v[0] - us[i][0]) * h)
                if f >= 0.0:
                    frac, crossing = f, True
            cap_i, cap_f = -1, 2.0
            for i in range(m):
                dx0 = xs[i][0] - y[0]
                dy0 = xs[i][1] - y[1]
                f = kernels.capture_fraction(
                    dx0, dy0, dx0 + (us[i][0] - v[0]) * h, dy0 + (us[i][1] - v[1]) * h, tol
                )
                if 0.0 <= f < cap_f:
                    cap_i, cap_f = i, f
            if cap_i >= 0 and cap_f <= frac:
                frac, crossing = cap_f, False
            else:
                cap_i = -1

            if frac < 1.0:
                h_eff = h * frac
                t_new = t + h_eff
            else:
                h_eff, t_new = h, t_next

            if h_eff > 0.0:
                active, phase = self._phase_label()
                trace.record(t, h_eff, xs, y, us, v, self.ledgers, eled, active, phase)
                new_xs = []
                for i in range(m):
                    u = us[i]
                    p = xs[i]
                    if u[0] != 0.0 or u[1] != 0.0:
                        self.ledgers[i].charge(u, h_eff)
                        p = (p[0] + u[0] * h_eff, p[1] + u[1] * h_eff)
                        if not region.contains(p, btol):
                            p = region.project(p)
                            self.projections += 1
                            sched.emit(t_new, "projection", i)
                    new_xs.append(p)
                if v[0] != 0.0 or v[1] != 0.0:
                    eled.charge(v, h_eff)
                    y = (y[0] + v[0] * h_eff, y[1] + v[1] * h_eff)
                    if not region.contains(y, btol):
                        y = region.project(y)
                        self.projections += 1
                        sched.emit(t_new, "projection", None, player="evader")
                    for j in (0, 1):
                        if not exhausted[j] and eled.consumed[j] >= eled.budget[j] * (1.0 - ENERGY_RTOL):
                            exhausted[j] = True
                            sched.emit(t_new, "budget_exhausted", None, axis=j + 1)
                sched.on_mirror_energy(v[0], h_eff)
                self.xs, self.y = new_xs, y
            t = t_new
            self.t = t

            if cap_i >= 0:
                hit = (cap_i, t)
                break
            if crossing:
                sched.on_crossing(t, self.xs, self.y)
            mach = sched.active_machine
            if mach is not None and mach.phase is Phase.MIRROR_AND_DRIVE:
                i = mach.index
                if abs(self.xs[i][0] - self.y[0]) > tol and i not in misaligned:
                    misaligned.add(i)
                    sched.emit(t, "alignment_lost", i, gap=self.xs[i][0] - self.y[0])

        if hit is not None:
            self.capture = hit
            sched.emit(hit[1], "capture", hit[0])
            sched.on_capture(hit[1], hit[0])
        active, phase = self._phase_label()
        trace.record(t, 0.0, self.xs, self.y, [(0.0, 0.0)] * m, (0.0, 0.0), self.ledgers, eled, active, phase)
        trace.events = sched.events
        trace.windows = sched.windows
        return trace, self._report()

    def _report(self) -> CaptureReport:
        d = self.derived
        captured = self.capture is not None
        ct = self.capture[1] if captured else None
        admissible = all(e <= b * (1.0 + ENERGY_RTOL) for e, b in zip(self.policy.ledger.consumed, self.policy.ledger.budget))
        applies = d.hypothesis_holds and admissible
        violated = applies and (not captured or ct > d.T_bound + self.dt)
        flags = []
        if not d.hypothesis_holds:
            flags.append("exploratory")
        if d.c == 0.0:
            flags.append("c_zero")
        if self.projections:
            flags.append("projection_fired")
        return CaptureReport(
            captured=captured,
            capture_time=ct,
            capturing_pursuer=self.capture[0] + 1 if captured else None,
            T_bound=d.T_bound,
            dt=self.dt,
            guarantee_applies=applies,
            guarantee_violated=violated,
            evader_admissible=admissible,
            windows=[w.to_dict() for w in self.scheduler.windows],
            pursuer_energy=[list(led.consumed) for led in self.ledgers],
            evader_energy=list(self.policy.ledger.consumed),
            projection_events=self.projections,
            boundary_stops=sum(1 for e in self.scheduler.events if e[1] == "boundary_stop"),
            steps=len(self.trace.rows) - 1,
            flags=flags,
            derived=d.summary(),
            policy=self.policy.to_dict(),
        )


def run(
    config: GameConfig,
    policy: EvaderPolicy | dict | str = "idle",
    **kwargs,
) -> tuple[SimulationTrace, CaptureReport]:
    """Simulate one game; see :class:`Simulation` for keyword options."""
    return Simulation(config, policy, **kwargs).run()
