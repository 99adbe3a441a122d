"""Simulation and verification of sequential pursuit with coordinate-wise energy budgets."""

from .core import DerivedParams, EnergyLedger, GameConfig, PlayerState, ledger_charge, validate
from .engine import CaptureReport, Simulation, SimulationTrace, run
from .errors import AdmissibilityError, ConfigError, GameError, HypothesisViolated, NumericError
from .evader import POLICY_KINDS, make_policy
from .geometry import ConvexRegion, Ellipse, Frame, Polygon, diameter, diametral_frame, max_ordinate
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "BACKEND",
    "CaptureReport",
    "ConfigError",
    "ConvexRegion",
    "DerivedParams",
    "Ellipse",
    "EnergyLedger",
    "Frame",
    "GameConfig",
    "GameError",
    "HypothesisViolated",
    "NumericError",
    "POLICY_KINDS",
    "PlayerState",
    "Polygon",
    "Simulation",
    "SimulationTrace",
    "diameter",
    "diametral_frame",
    "ledger_charge",
    "make_policy",
    "max_ordinate",
    "run",
    "validate",
]
