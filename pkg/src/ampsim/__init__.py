"""ampsim: a deterministic discrete-event simulator for mobile ad-hoc
routing, covering classic AODV and the AMP-AODV link-duration-prediction
variants."""

from .config import Flow, RadioConfig, ScenarioConfig, desk_scenario, paper_scenario
from .engine import Simulator, run_scenario
from .messages import ProtocolVariant
from .metrics import MetricsReport
from .mobility import MobilityConfig
from .prediction import (UNBOUNDED, adaptive_hello_interval, predict_link_duration,
                         route_expiration, tighten_expiration)
from .protocol import ProtocolConfig, RouteCandidate, select_route

__version__ = "0.1.0"

__all__ = [
    "Flow", "RadioConfig", "ScenarioConfig", "desk_scenario", "paper_scenario",
    "Simulator", "run_scenario", "ProtocolVariant", "MetricsReport",
    "MobilityConfig", "UNBOUNDED", "adaptive_hello_interval",
    "predict_link_duration", "route_expiration", "tighten_expiration",
    "ProtocolConfig", "RouteCandidate", "select_route", "__version__",
]
