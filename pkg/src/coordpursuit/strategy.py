"""Pursuer side of the game: pre-alignment plus sequential two-stage windows.

Pursuers act one at a time. Pursuer i owns the window
``[theta_i, theta_i + tau_i1 + t_i2]``: it first runs along the chord at the
constant speed ``d / t_i1`` until its abscissa meets the evader's (stage 1),
then copies the evader's horizontal velocity while closing the vertical gap at
speed ``c / t_i2`` (stage 2). Everyone else stands still.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from . import kernels
from .core import DerivedParams, EnergyLedger
from .geometry import Point


class Phase(str, Enum):
    PREALIGN = "prealign"
    IDLE = "idle"
    HORIZONTAL_CHASE = "horizontal_chase"
    MIRROR_AND_DRIVE = "mirror_and_drive"
    DONE = "done"
    FAILED = "failed"


TRANSITIONS = {
    Phase.PREALIGN: {Phase.IDLE},
    Phase.IDLE: {Phase.HORIZONTAL_CHASE},
    Phase.HORIZONTAL_CHASE: {Phase.MIRROR_AND_DRIVE, Phase.FAILED, Phase.DONE},
    Phase.MIRROR_AND_DRIVE: {Phase.DONE, Phase.FAILED},
    Phase.DONE: set(),
    Phase.FAILED: set(),
}

ACTIVE_PHASES = (Phase.HORIZONTAL_CHASE, Phase.MIRROR_AND_DRIVE)
STOP_RULES = ("outward", "verbatim")


def sgn(x: float) -> int:
    return (x > 0.0) - (x < 0.0)


@dataclass
class WindowRecord:
    pursuer: int
    theta: float
    tau_i1: float | None = None
    mirror_start: float | None = None
    end: float | None = None
    outcome: str = "open"
    v1_energy: float = 0.0
    sigma_i1_sq: float = 0.0
    guard_tripped: bool = False

    def compliant(self, eps: float) -> bool:
        return self.v1_energy <= self.sigma_i1_sq + eps

    def to_dict(self) -> dict:
        return {
            "pursuer": self.pursuer + 1,
            "theta": self.theta,
            "tau_i1": self.tau_i1,
            "mirror_start": self.mirror_start,
            "end": self.end,
            "outcome": self.outcome,
            "window_v1_energy": self.v1_energy,
            "sigma_i1_sq": self.sigma_i1_sq,
            "guard_tripped": self.guard_tripped,
        }


@dataclass
class PursuerPhaseMachine:
    index: int
    phase: Phase
    window_start: float | None = None
    tau_i1: float | None = None
    chase_sign: int = 0
    vertical_sign: int = 0
    window_v1_energy: float = 0.0
    history: list = field(default_factory=list)

    def to(self, phase: Phase, t: float) -> None:
        if phase not in TRANSITIONS[self.phase]:
            raise RuntimeError(f"pursuer {self.index + 1}: illegal transition {self.phase.value} -> {phase.value}")
        self.history.append((t, self.phase, phase))
        self.phase = phase


def prealign_control(derived: DerivedParams, i: int) -> Point:
    """Constant vertical velocity bringing pursuer ``i`` onto the chord by ``T_pre``."""
    if derived.T_pre <= 0.0:
        return (0.0, 0.0)
    return (0.0, -derived.pursuer_start[i][1] / derived.T_pre)


def stage1_control(derived: DerivedParams, machine: PursuerPhaseMachine) -> Point:
    return (machine.chase_sign * derived.d / derived.t_i1[machine.index], 0.0)


def stage2_control(
    derived: DerivedParams,
    machine: PursuerPhaseMachine,
    x: Point,
    v: Sequence[float],
    h: float,
    ledger: EnergyLedger,
    stop_rule: str = "outward",
    y: Point | None = None,
) -> tuple[Point, str | None]:
    """Mirror ``v_1`` and drive vertically, subject to the budget guard and stop rule.

    Returns the control and a flag: ``"guard"`` when mirroring would overdraw
    the horizontal budget (the control is then zero and the window fails),
    ``"boundary"`` when the stop rule cut the control, else ``None``.
    """
    i = machine.index
    t2 = derived.t_i2[i]
    u2 = machine.vertical_sign * derived.c / t2 if t2 > 0.0 else 0.0
    u1 = v[0]
    if ledger.consumed[0] + u1 * u1 * h > ledger.limit(0):
        return (0.0, 0.0), "guard"
    if ledger.consumed[1] + u2 * u2 * h > ledger.limit(1):
        u2 = math.copysign(math.sqrt(ledger.remaining(1) / h), u2)
    return apply_stop_rule(derived, x, (u1, u2), h, stop_rule, y, v)


def apply_stop_rule(
    derived: DerivedParams,
    x: Point,
    u: Point,
    h: float,
    stop_rule: str,
    y: Point | None = None,
    v: Sequence[float] | None = None,
):
    """Keep a pursuer inside the region.

    ``verbatim``: a pursuer within ``boundary_tol`` of the boundary stops.
    ``outward``: the pursuer stops only as far as the step would carry it out
    of the region (the control is scaled to end on the boundary, zero when
    already there and heading out). Both variants scale any step that would
    leave the region.

    When the evader ``y`` (moving with ``v``) is given and the unmodified
    step meets it, the control is left alone: the meeting point lies in the
    region, so by convexity so does the path leading to it, and the engine
    ends the step there.
    """
    region = derived.region
    tol = derived.boundary_tol
    if y is not None and v is not None:
        dx, dy = x[0] - y[0], x[1] - y[1]
        if kernels.capture_fraction(
            dx, dy, dx + (u[0] - v[0]) * h, dy + (u[1] - v[1]) * h, derived.capture_tol
        ) >= 0.0:
            return u, None
    if stop_rule == "verbatim" and region.on_boundary(x, tol):
        return (0.0, 0.0), "boundary"
    nxt = (x[0] + u[0] * h, x[1] + u[1] * h)
    if region.contains(nxt, tol):
        return u, None
    # stop inside the tolerance band so points that sit on the boundary up to rounding can still move along it
    a = region.max_fraction(x, (u[0] * h, u[1] * h), 0.5 * tol)
    return (u[0] * a, u[1] * a), "boundary"


class Scheduler:
    """Runs the pursuers' windows one after another.

    The engine asks for the next scheduled time, for controls over a step,
    and reports crossings and captures back.
    """

    def __init__(self, derived: DerivedParams, stop_rule: str = "outward"):
        if stop_rule not in STOP_RULES:
            raise ValueError(f"stop_rule must be one of {STOP_RULES}")
        self.derived = derived
        self.stop_rule = stop_rule
        start = Phase.PREALIGN if derived.T_pre > 0.0 else Phase.IDLE
        self.machines = [PursuerPhaseMachine(i, start) for i in range(derived.m)]
        self.windows: list[WindowRecord] = []
        self.events: list[tuple] = []
        self.active: int | None = None
        self.prealigning = derived.T_pre > 0.0
        self.mirror_start: float | None = None
        self.window_end: float | None = None
        self.finished = False
        self._stopped = set()

    # -- bookkeeping -----------------------------------------------------
    def emit(self, t: float, kind: str, pursuer: int | None = None, **info) -> None:
        self.events.append((t, kind, pursuer, info))

    @property
    def active_machine(self) -> PursuerPhaseMachine | None:
        return None if self.active is None else self.machines[self.active]

    def next_time(self) -> float:
        if self.prealigning:
            return self.derived.T_pre
        mach = self.active_machine
        if mach is None:
            return math.inf
        if mach.phase is Phase.HORIZONTAL_CHASE:
            return mach.window_start + self.derived.t_i1[mach.index]
        return self.window_end

    def _activate(self, i: int, t: float, xs, y) -> None:
        d = self.derived
        mach = self.machines[i]
        mach.to(Phase.HORIZONTAL_CHASE, t)
        mach.window_start = t
        mach.chase_sign = sgn(y[0] - xs[i][0])
        self.active = i
        self.windows.append(WindowRecord(i, t, sigma_i1_sq=d.sigma_i1_sq[i]))
        self.emit(t, "window_start", i, sign=mach.chase_sign)
        if mach.chase_sign == 0:
            self.on_crossing(t, xs, y)

    def _close_window(self, t: float, outcome: str) -> None:
        win = self.windows[-1]
        win.end = t
        win.outcome = outcome
        win.v1_energy = self.active_machine.window_v1_energy

    def _advance(self, t: float, xs, y) -> None:
        nxt = self.active + 1 if self.active is not None else 0
        self.active = None
        self.mirror_start = self.window_end = None
        if nxt >= self.derived.m:
            self.finished = True
            return
        self._activate(nxt, t, xs, y)

    # -- engine hooks ----------------------------------------------------
    def start(self, t: float, xs, y) -> None:
        if not self.prealigning:
            self._advance(t, xs, y)

    def process(self, t: float, xs, y, gap_tol: float) -> None:
        """Fire every transition scheduled at or before ``t``."""
        d = self.derived
        while not self.finished:
            if self.prealigning:
                if t < d.T_pre:
                    return
                self.prealigning = False
                for mach in self.machines:
                    mach.to(Phase.IDLE, t)
                self.emit(t, "prealign_done", None)
                self._advance(t, xs, y)
                continue
            mach = self.active_machine
            if mach.phase is Phase.HORIZONTAL_CHASE:
                if t < mach.window_start + d.t_i1[mach.index]:
                    return
                i = mach.index
                if abs(y[0] - xs[i][0]) <= gap_tol:
                    self.on_crossing(t, xs, y)
                else:
                    mach.to(Phase.FAILED, t)
                    mach.tau_i1 = d.t_i1[i]
                    self.window_end = mach.window_start + d.t_i1[i] + d.t_i2[i]
                    self.windows[-1].tau_i1 = None
                    self.emit(t, "window_failed", i, reason="no_crossing")
                continue
            if t < self.window_end:
                return
            if mach.phase is Phase.MIRROR_AND_DRIVE:
                mach.to(Phase.FAILED, t)
                self.emit(t, "window_failed", mach.index, reason="expired")
            self._close_window(t, "failed")
            self._advance(t, xs, y)

    def on_crossing(self, t: float, xs, y) -> None:
        mach = self.active_machine
        i = mach.index
        mach.to(Phase.MIRROR_AND_DRIVE, t)
        mach.tau_i1 = t - mach.window_start
        mach.vertical_sign = sgn(y[1] - xs[i][1])
        self.mirror_start = t
        self.window_end = t + self.derived.t_i2[i]
        self.windows[-1].tau_i1 = mach.tau_i1
        self.windows[-1].mirror_start = t
        self.emit(t, "crossing", i, tau_i1=mach.tau_i1, vertical_sign=mach.vertical_sign)

    def on_capture(self, t: float, i: int) -> None:
        mach = self.active_machine
        if mach is not None:
            if mach.index == i:
                mach.to(Phase.DONE, t)
                self._close_window(t, "captured")
            else:
                self._close_window(t, "interrupted")
        self.finished = True

    def on_mirror_energy(self, v1: float, h: float) -> None:
        # the mirror part of the window runs to its scheduled end even after a guard trip
        if self.active is not None and self.mirror_start is not None:
            self.machines[self.active].window_v1_energy += v1 * v1 * h

    def controls(self, t: float, h: float, xs, y, v, ledgers) -> list[Point]:
        """Per-pursuer controls on ``[t, t + h]`` given the evader's control ``v``."""
        d = self.derived
        out = [(0.0, 0.0)] * d.m
        if self.prealigning:
            return [prealign_control(d, i) for i in range(d.m)]
        mach = self.active_machine
        if mach is None:
            return out
        i = mach.index
        if mach.phase is Phase.HORIZONTAL_CHASE:
            u = stage1_control(d, mach)
            u, flag = apply_stop_rule(d, xs[i], u, h, "outward")
        elif mach.phase is Phase.MIRROR_AND_DRIVE:
            u, flag = stage2_control(d, mach, xs[i], v, h, ledgers[i], self.stop_rule, y)
            if flag == "guard":
                mach.to(Phase.FAILED, t)
                self.windows[-1].guard_tripped = True
                self.emit(t, "window_failed", i, reason="budget_guard")
        else:
            return out
        if flag == "boundary":
            if i not in self._stopped:
                self._stopped.add(i)
                self.emit(t, "boundary_stop", i, control=list(u))
        else:
            self._stopped.discard(i)
        out[i] = u
        return out

