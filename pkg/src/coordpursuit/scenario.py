"""Scenario files: one JSON document per game, ``"schema": 1``.

Units: seconds for times, world lengths for positions and tolerances, squared
energy for budgets. Budget coordinates are those of the diametral frame
(coordinate 1 along the diameter).
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .core import DEFAULT_BOUNDARY_TOL, GameConfig
from .errors import ConfigError
from .geometry import region_from_dict

SCHEMA_VERSION = 1


@dataclass
class Scenario:
    config: GameConfig
    evader: dict = field(default_factory=lambda: {"kind": "idle"})
    exploratory: bool = False
    stop_rule: str = "outward"
    name: str = ""


def scenario_from_dict(doc: dict) -> Scenario:
    if doc.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported scenario schema {doc.get('schema')!r}; expected {SCHEMA_VERSION}")
    try:
        region = region_from_dict(doc["region"])
        pursuers = doc["pursuers"]
        ev = doc["evader"]
        config = GameConfig(
            region=region,
            pursuer_budgets=tuple(tuple(p["budget"]) for p in pursuers),
            evader_budgets=tuple(ev["budget"]),
            pursuer_positions=tuple(tuple(p["position"]) for p in pursuers),
            evader_position=tuple(ev["position"]),
            dt=doc.get("dt"),
            capture_tol=doc.get("capture_tol"),
            boundary_tol=doc.get("boundary_tol", DEFAULT_BOUNDARY_TOL),
            rng_seed=doc.get("rng_seed", 0),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise ConfigError(f"malformed scenario: {exc!r}") from exc
    policy = dict(ev.get("policy", {"kind": "idle"}))
    return Scenario(
        config=config,
        evader=policy,
        exploratory=bool(doc.get("exploratory", False)),
        stop_rule=doc.get("stop_rule", "outward"),
        name=doc.get("name", ""),
    )


def scenario_to_dict(sc: Scenario) -> dict:
    cfg = sc.config
    doc = {
        "schema": SCHEMA_VERSION,
        "name": sc.name,
        "region": cfg.region.to_dict(),
        "pursuers": [
            {"budget": list(b), "position": list(p)}
            for b, p in zip(cfg.pursuer_budgets, cfg.pursuer_positions)
        ],
        "evader": {
            "budget": list(cfg.evader_budgets),
            "position": list(cfg.evader_position),
            "policy": dict(sc.evader),
        },
        "dt": cfg.dt,
        "capture_tol": cfg.capture_tol,
        "boundary_tol": cfg.boundary_tol,
        "rng_seed": cfg.rng_seed,
        "exploratory": sc.exploratory,
        "stop_rule": sc.stop_rule,
    }
    return doc


def load(path: str | os.PathLike) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return scenario_from_dict(doc)


def dumps(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2) + "\n"


def dump(sc: Scenario, path: str | os.PathLike) -> None:
    """Write atomically (temp file in the same directory, then rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(dumps(sc))
    os.replace(tmp, path)


def builtin(name: str) -> Scenario:
    """Load a scenario shipped with the package, e.g. ``builtin("golden")``."""
    from importlib import resources

    text = resources.files("coordpursuit").joinpath("scenarios", f"{name}.json").read_text(encoding="utf-8")
    return scenario_from_dict(json.loads(text))
