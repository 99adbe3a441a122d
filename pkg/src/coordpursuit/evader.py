"""Admissible evader policies used as adversaries.

Each policy proposes a velocity; :meth:`EvaderPolicy.control` then makes it
admissible: the step target is projected onto the region and each coordinate
is scaled so the energy ledger stays within budget.
"""

from __future__ import annotations

import math
import random
from typing import TYPE_CHECKING

from .core import EnergyLedger
from .strategy import ACTIVE_PHASES

if TYPE_CHECKING:
    from .engine import Simulation

POLICY_KINDS = ("idle", "random_admissible", "greedy_flee", "window_splitter", "boundary_hugger")


class EvaderPolicy:
    kind = "abstract"

    def __init__(self):
        self.ledger: EnergyLedger | None = None
        self.rng: random.Random | None = None

    def bind(self, sim: "Simulation") -> None:
        d = sim.derived
        self.ledger = EnergyLedger((d.evader_chase_budget, d.evader_cross_budget))
        self.rng = random.Random(f"{sim.config.rng_seed}:{self.kind}")

    def propose(self, sim: "Simulation", t: float, h: float) -> tuple[float, float]:
        raise NotImplementedError

    def control(self, sim: "Simulation", t: float, h: float) -> tuple[float, float]:
        v = self.propose(sim, t, h)
        if v[0] == 0.0 and v[1] == 0.0:
            return (0.0, 0.0)
        region = sim.derived.region
        y = sim.y
        target = (y[0] + v[0] * h, y[1] + v[1] * h)
        if not region.contains(target, 0.0):
            target = region.project(target)
            v = ((target[0] - y[0]) / h, (target[1] - y[1]) / h)
        led = self.ledger
        out = []
        for j in (0, 1):
            vj = v[j]
            rem = led.budget[j] - led.consumed[j]
            if vj * vj * h > rem:
                vj = math.copysign(math.sqrt(rem / h), vj) if rem > 0.0 else 0.0
            out.append(vj)
        # clamping the coordinates separately turns the step; pull it back along its own line
        if not region.contains((y[0] + out[0] * h, y[1] + out[1] * h), 0.0):
            a = region.max_fraction(y, (out[0] * h, out[1] * h))
            out = [out[0] * a, out[1] * a]
        return (out[0], out[1])

    def to_dict(self) -> dict:
        return {"kind": self.kind}

    def uniform_rate(self, sim: "Simulation", t: float, h: float, j: int) -> float:
        """Speed that spends the remaining budget of coordinate ``j`` evenly until ``T_bound``."""
        span = max(sim.derived.T_bound - t, h)
        return math.sqrt(self.ledger.remaining(j) / span)


class Idle(EvaderPolicy):
    kind = "idle"

    def propose(self, sim, t, h):
        return (0.0, 0.0)


class RandomAdmissible(EvaderPolicy):
    """Piecewise-constant velocity redrawn every step, uniform in a box."""

    kind = "random_admissible"

    def __init__(self, seed: int | None = None, spread: float = 2.0):
        super().__init__()
        self.seed = seed
        self.spread = spread

    def bind(self, sim):
        super().bind(sim)
        if self.seed is not None:
            self.rng = random.Random(f"{self.seed}:{self.kind}")

    def propose(self, sim, t, h):
        r1 = self.spread * self.uniform_rate(sim, t, h, 0)
        r2 = self.spread * self.uniform_rate(sim, t, h, 1)
        return (self.rng.uniform(-r1, r1), self.rng.uniform(-r2, r2))

    def to_dict(self):
        return {"kind": self.kind, "seed": self.seed, "spread": self.spread}


class GreedyFlee(EvaderPolicy):
    """Run straight away from the nearest active pursuer."""

    kind = "greedy_flee"

    def propose(self, sim, t, h):
        y = sim.y
        active = [i for i, mach in enumerate(sim.scheduler.machines) if mach.phase in ACTIVE_PHASES]
        pool = active or range(len(sim.xs))
        i = min(pool, key=lambda k: math.hypot(y[0] - sim.xs[k][0], y[1] - sim.xs[k][1]))
        dx, dy = y[0] - sim.xs[i][0], y[1] - sim.xs[i][1]
        r = math.hypot(dx, dy)
        if r == 0.0:
            dx, dy, r = 1.0, 0.0, 1.0
        return (dx / r * self.uniform_rate(sim, t, h, 0), dy / r * self.uniform_rate(sim, t, h, 1))


def splitter_plan(sigma_i1_sq, total: float, overdraw_fraction: float) -> list[float]:
    """Horizontal energy the window splitter spends in each pursuer's mirror window."""
    plan = []
    left = total
    for s in sigma_i1_sq:
        spend = min((1.0 + overdraw_fraction) * s, left)
        plan.append(spend)
        left -= spend
    return plan


class WindowSplitter(EvaderPolicy):
    """Overdraw ``sigma_i1^2`` in each mirror window until the budget runs out.

    Inside pursuer i's mirror window the evader zig-zags horizontally (one
    step each way) to spend ``(1 + overdraw_fraction) * sigma_i1^2`` within
    the first ``burst`` fraction of the window; it is idle otherwise.
    """

    kind = "window_splitter"

    def __init__(self, overdraw_fraction: float = 0.05, burst: float = 0.25):
        super().__init__()
        if not overdraw_fraction >= 0.0:
            raise ValueError("overdraw_fraction must be non-negative")
        self.overdraw_fraction = overdraw_fraction
        self.burst = burst
        self.plan: list[float] = []
        self.sigma_i1_sq: tuple[float, ...] = ()
        self._window = None
        self._entry_energy = 0.0
        self._dir = 1.0

    def bind(self, sim):
        super().bind(sim)
        d = sim.derived
        self.sigma_i1_sq = d.sigma_i1_sq
        self.plan = splitter_plan(d.sigma_i1_sq, d.evader_chase_budget, self.overdraw_fraction)
        self._window = None

    def overdrawn_plan(self, eps_rel: float = 1e-9) -> list[bool]:
        """Which windows the plan overdraws, by ledger arithmetic alone."""
        return [p > s * (1.0 + eps_rel) for p, s in zip(self.plan, self.sigma_i1_sq)]

    def propose(self, sim, t, h):
        sched = sim.scheduler
        mach = sched.active_machine
        if mach is None or sched.mirror_start is None:
            return (0.0, 0.0)
        i = mach.index
        if self._window != i:
            self._window = i
            self._entry_energy = self.ledger.consumed[0]
        spent = self.ledger.consumed[0] - self._entry_energy
        left = self.plan[i] - spent
        if left <= 0.0:
            return (0.0, 0.0)
        span_end = sched.mirror_start + self.burst * sim.derived.t_i2[i]
        span = max(span_end - t, h)
        speed = math.sqrt(left / span)
        y = sim.y
        region = sim.derived.region
        step = self._dir * speed * h
        if region.max_fraction(y, (step, 0.0)) < 1.0:
            self._dir = -self._dir
            step = -step
        self._dir = -self._dir
        return (step / h, 0.0)

    def to_dict(self):
        return {"kind": self.kind, "overdraw_fraction": self.overdraw_fraction, "burst": self.burst}


class BoundaryHugger(EvaderPolicy):
    """Reach the boundary, then crawl counterclockwise along it."""

    kind = "boundary_hugger"

    def propose(self, sim, t, h):
        region = sim.derived.region
        y = sim.y
        speed = min(self.uniform_rate(sim, t, h, 0), self.uniform_rate(sim, t, h, 1))
        if speed == 0.0:
            return (0.0, 0.0)
        if region.on_boundary(y, 10.0 * sim.derived.boundary_tol):
            target = region.walk_boundary(y, speed * h)
        else:
            q = region.nearest_boundary_point(y)
            gx, gy = q[0] - y[0], q[1] - y[1]
            r = math.hypot(gx, gy)
            w = min(1.0, speed * h / r)
            target = (y[0] + w * gx, y[1] + w * gy)
        return ((target[0] - y[0]) / h, (target[1] - y[1]) / h)


_REGISTRY = {
    "idle": Idle,
    "random_admissible": RandomAdmissible,
    "greedy_flee": GreedyFlee,
    "window_splitter": WindowSplitter,
    "boundary_hugger": BoundaryHugger,
}


def make_policy(spec: dict | str) -> EvaderPolicy:
    """Build a policy from ``{"kind": ..., **params}`` or a bare kind name."""
    if isinstance(spec, str):
        spec = {"kind": spec}
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind not in _REGISTRY:
        raise ValueError(f"unknown evader kind {kind!r}; expected one of {POLICY_KINDS}")
    return _REGISTRY[kind](**spec)


def evader_control(policy: EvaderPolicy, sim: "Simulation", t: float, h: float) -> tuple[float, float]:
    return policy.control(sim, t, h)
