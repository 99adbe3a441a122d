"""Budgets, energy ledgers and the derived quantities of the pursuit construction.

Budgets are stored squared (energy units) per coordinate, as they appear in
the integral constraints. ``validate`` turns a :class:`GameConfig` into
:class:`DerivedParams`: it picks the coordinate where the pursuers' total
energy beats the evader's, lays the diametral chord of the region on the
x-axis, and computes the window lengths of the sequential strategy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import AdmissibilityError, ConfigError, HypothesisViolated
from .geometry import DEFAULT_BOUNDARY_TOL, ConvexRegion, Frame, Point, region_metrics

ENERGY_RTOL = 1e-9
PREALIGN_SHARE = 0.25
DEFAULT_DT_FRACTION = 1e-2
DEFAULT_CAPTURE_RTOL = 1e-6


@dataclass
class EnergyLedger:
    """Consumed ``integral u_j^2 dt`` per coordinate against a budget."""

    budget: tuple[float, float]
    consumed: list[float] = field(default_factory=lambda: [0.0, 0.0])

    def limit(self, j: int) -> float:
        return self.budget[j] * (1.0 + ENERGY_RTOL)

    def remaining(self, j: int) -> float:
        return max(0.0, self.budget[j] - self.consumed[j])

    def would_overdraw(self, u: Sequence[float], h: float) -> bool:
        return (
            self.consumed[0] + u[0] * u[0] * h > self.limit(0)
            or self.consumed[1] + u[1] * u[1] * h > self.limit(1)
        )

    def charge(self, u: Sequence[float], h: float) -> None:
        e0 = self.consumed[0] + u[0] * u[0] * h
        e1 = self.consumed[1] + u[1] * u[1] * h
        if e0 > self.limit(0) or e1 > self.limit(1):
            raise AdmissibilityError(
                f"ledger overdraft: consumed ({e0:.12g}, {e1:.12g}) vs budget {self.budget}"
            )
        self.consumed[0] = e0
        self.consumed[1] = e1

    def copy(self) -> "EnergyLedger":
        return EnergyLedger(self.budget, list(self.consumed))


def ledger_charge(ledger: EnergyLedger, control: Sequence[float], dt: float) -> EnergyLedger:
    """Return a charged copy of ``ledger``; raises on overdraft."""
    if not dt > 0.0:
        raise ConfigError("dt must be positive")
    out = ledger.copy()
    out.charge(control, dt)
    return out


@dataclass
class PlayerState:
    position: Point
    ledger: EnergyLedger


def _pos(p) -> Point:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ConfigError(f"non-finite position {p}")
    return (x, y)


@dataclass(frozen=True)
class GameConfig:
    """Everything needed to set up one game.

    ``pursuer_budgets[i] = (rho_i1^2, rho_i2^2)`` and
    ``evader_budgets = (sigma_1^2, sigma_2^2)``; coordinates are those of the
    diametral frame (coordinate 1 along the diameter). Positions are world
    coordinates. ``dt``/``capture_tol`` of ``None`` select defaults scaled
    to the game.
    """

    region: ConvexRegion
    pursuer_budgets: tuple[tuple[float, float], ...]
    evader_budgets: tuple[float, float]
    pursuer_positions: tuple[Point, ...]
    evader_position: Point
    dt: float | None = None
    capture_tol: float | None = None
    boundary_tol: float = DEFAULT_BOUNDARY_TOL
    rng_seed: int = 0

    def __post_init__(self):
        pb = tuple((float(a), float(b)) for a, b in self.pursuer_budgets)
        object.__setattr__(self, "pursuer_budgets", pb)
        object.__setattr__(self, "evader_budgets", (float(self.evader_budgets[0]), float(self.evader_budgets[1])))
        object.__setattr__(self, "pursuer_positions", tuple(_pos(p) for p in self.pursuer_positions))
        object.__setattr__(self, "evader_position", _pos(self.evader_position))
        object.__setattr__(self, "rng_seed", int(self.rng_seed))
        if len(pb) < 1:
            raise ConfigError("need at least one pursuer")
        if len(self.pursuer_positions) != len(pb):
            raise ConfigError(f"{len(pb)} pursuer budgets but {len(self.pursuer_positions)} positions")
        for i, (a, b) in enumerate(pb):
            if not (a > 0.0 and b > 0.0 and math.isfinite(a) and math.isfinite(b)):
                raise ConfigError(f"pursuer {i + 1} budgets must be positive and finite, got {(a, b)}")
        s1, s2 = self.evader_budgets
        if not (s1 > 0.0 and s2 > 0.0 and math.isfinite(s1) and math.isfinite(s2)):
            raise ConfigError(f"evader budgets must be positive and finite, got {(s1, s2)}")
        if self.dt is not None and not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.capture_tol is not None and not self.capture_tol > 0.0:
            raise ConfigError(f"capture_tol must be positive, got {self.capture_tol}")
        if not self.boundary_tol > 0.0:
            raise ConfigError(f"boundary_tol must be positive, got {self.boundary_tol}")
        for i, p in enumerate(self.pursuer_positions):
            if not self.region.contains(p, self.boundary_tol):
                raise ConfigError(f"pursuer {i + 1} starts outside the region at {p}")
        if not self.region.contains(self.evader_position, self.boundary_tol):
            raise ConfigError(f"evader starts outside the region at {self.evader_position}")

    @property
    def m(self) -> int:
        return len(self.pursuer_budgets)


@dataclass(frozen=True)
class DerivedParams:
    """Quantities of the sequential two-stage construction, in the game frame.

    The game frame has the diametral chord on the x-axis with its midpoint at
    the origin. ``chase_budgets``/``cross_budgets`` are the pursuers' squared
    budgets along and across that chord after axis selection (swapped when
    ``axis_j == 2``); likewise for the evader.
    """

    axis_j: int
    hypothesis_holds: bool
    margins: tuple[float, float]
    frame: Frame
    region: ConvexRegion
    d: float
    c: float
    chase_budgets: tuple[float, ...]
    cross_budgets: tuple[float, ...]
    evader_chase_budget: float
    evader_cross_budget: float
    rho1: float
    sigma_i1: tuple[float, ...]
    sigma_i1_sq: tuple[float, ...]
    prealign_used: tuple[bool, ...]
    rho_i2_eff_sq: tuple[float, ...]
    T_pre: float
    t_i1: tuple[float, ...]
    t_i2: tuple[float, ...]
    theta_bound: tuple[float, ...]
    T_bound: float
    dt: float
    capture_tol: float
    boundary_tol: float
    pursuer_start: tuple[Point, ...]
    evader_start: Point

    @property
    def m(self) -> int:
        return len(self.t_i1)

    @property
    def swapped(self) -> bool:
        return self.axis_j == 2

    def to_world(self, p: Sequence[float]) -> Point:
        return self.frame.from_frame(p)

    def game_axis(self, j: int) -> int:
        """Index (0 = chase) of user coordinate ``j`` in the game frame."""
        return (j - 1) if not self.swapped else (2 - j)

    def summary(self) -> dict:
        return {
            "axis_j": self.axis_j,
            "hypothesis_holds": self.hypothesis_holds,
            "margins": list(self.margins),
            "d": self.d,
            "c": self.c,
            "rho1": self.rho1,
            "chase_budgets": list(self.chase_budgets),
            "cross_budgets": list(self.cross_budgets),
            "evader_budgets": [self.evader_chase_budget, self.evader_cross_budget],
            "prealign_used": list(self.prealign_used),
            "sigma_i1": list(self.sigma_i1),
            "sigma_i1_sq": list(self.sigma_i1_sq),
            "rho_i2_eff_sq": list(self.rho_i2_eff_sq),
            "t_i1": list(self.t_i1),
            "t_i2": list(self.t_i2),
            "theta_bound": list(self.theta_bound),
            "T_pre": self.T_pre,
            "T_bound": self.T_bound,
            "dt": self.dt,
            "capture_tol": self.capture_tol,
            "frame": {"origin": list(self.frame.origin), "rotation": self.frame.rotation},
        }


def select_axis(pursuer_budgets, evader_budgets) -> tuple[int | None, tuple[float, float]]:
    """Coordinate on which total pursuer energy exceeds the evader's.

    Returns ``(j, margins)`` with ``j = None`` when neither coordinate
    qualifies; ties between two qualifying coordinates go to ``j = 1``.
    """
    margins = tuple(sum(b[j] for b in pursuer_budgets) - evader_budgets[j] for j in (0, 1))
    ok = [j for j in (0, 1) if margins[j] > 0.0]
    if not ok:
        return None, margins
    if len(ok) == 1:
        return ok[0] + 1, margins
    return (1 if margins[0] >= margins[1] else 2), margins


def validate(config: GameConfig, exploratory: bool = False) -> DerivedParams:
    """Check the sufficiency condition and compute every derived quantity.

    Raises :class:`HypothesisViolated` when the condition fails on both
    coordinates, unless ``exploratory`` is set; in that case the stage-1
    speed is computed from ``min(sigma_i1^2, rho_i1^2 / 2)`` so the windows
    stay finite.
    """
    axis_j, margins = select_axis(config.pursuer_budgets, config.evader_budgets)
    holds = axis_j is not None
    if not holds:
        if not exploratory:
            raise HypothesisViolated(
                "total pursuer energy does not exceed the evader's on either coordinate "
                f"(margins {margins[0]:.6g}, {margins[1]:.6g})"
            )
        axis_j = 1 if margins[0] >= margins[1] else 2
    jc = axis_j - 1
    jx = 1 - jc

    metrics = region_metrics(config.region)
    frame = metrics.frame
    d, c = metrics.d, metrics.c
    game_region = config.region.transformed(frame)

    chase = tuple(b[jc] for b in config.pursuer_budgets)
    cross = tuple(b[jx] for b in config.pursuer_budgets)
    sig_chase = config.evader_budgets[jc]
    sig_cross = config.evader_budgets[jx]

    total = math.fsum(chase)
    rho1 = math.sqrt(total)
    sigma_i1_sq = tuple(sig_chase * r / total for r in chase)
    sigma_i1 = tuple(math.sqrt(s) for s in sigma_i1_sq)
    if holds:
        # d^2 / (rho_i1^2 - sigma_i1^2) with the difference formed without cancellation
        excess = total - sig_chase
        t_i1 = tuple(d * d * total / (r * excess) for r in chase)
    else:
        t_i1 = tuple(d * d / (r - min(s, 0.5 * r)) for r, s in zip(chase, sigma_i1_sq))

    starts = tuple(frame.to_frame(p) for p in config.pursuer_positions)
    evader_start = frame.to_frame(config.evader_position)
    heights = [abs(p[1]) for p in starts]
    prealign_used = tuple(h > 0.0 for h in heights)
    T_pre = max((4.0 * h * h / r for h, r in zip(heights, cross) if h > 0.0), default=0.0)
    eff = tuple(r * (1.0 - PREALIGN_SHARE) if used else r for r, used in zip(cross, prealign_used))
    t_i2 = tuple(c * c / r for r in eff)

    theta = [T_pre]
    for a, b in zip(t_i1, t_i2):
        theta.append(theta[-1] + a + b)
    T_bound = theta[-1]

    if config.dt is not None:
        dt = float(config.dt)
    else:
        dt = DEFAULT_DT_FRACTION * min(x for x in t_i1 + t_i2 if x > 0.0)
    cap = config.capture_tol if config.capture_tol is not None else DEFAULT_CAPTURE_RTOL * d

    return DerivedParams(
        axis_j=axis_j,
        hypothesis_holds=holds,
        margins=margins,
        frame=frame,
        region=game_region,
        d=d,
        c=c,
        chase_budgets=chase,
        cross_budgets=cross,
        evader_chase_budget=sig_chase,
        evader_cross_budget=sig_cross,
        rho1=rho1,
        sigma_i1=sigma_i1,
        sigma_i1_sq=sigma_i1_sq,
        prealign_used=prealign_used,
        rho_i2_eff_sq=eff,
        T_pre=T_pre,
        t_i1=t_i1,
        t_i2=t_i2,
        theta_bound=tuple(theta),
        T_bound=T_bound,
        dt=dt,
        capture_tol=float(cap),
        boundary_tol=config.boundary_tol,
        pursuer_start=starts,
        evader_start=evader_start,
    )
