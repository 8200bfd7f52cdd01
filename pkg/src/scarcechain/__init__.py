"""Equilibrium modelling of multi-tier scarce-resource supply chains with fiscal policy."""
from .analysis import (PriceSet, Profits, WelfareReport, consumer_surplus, detect_shortages,
                       profits, retrieve_prices, welfare)
from .assembly import FEvaluator, demand_of, evaluate_F, initial_state, pack, project, unpack
from .config import ConfigError, ScenarioConfig, SweepSpec, load_scenario
from .diagnostics import JacobianBundle, MonotonicityVerdict, classify, jacobian, lowest_eigenvalue
from .indexing import IndexMap, Topology, build_index_map
from .model import (Aggregate, MarketFunction, ModelError, NetworkModel, PolicyScheme,
                    QuadraticCost, validate)
from .oracle import AffineMap, solve_exhaustive
from .solver import SolveOutcome, SolverConfig, auto_step, estimate_lipschitz, solve

__version__ = "0.1.0"

__all__ = [
    "PriceSet", "Profits", "WelfareReport", "consumer_surplus", "detect_shortages", "profits",
    "retrieve_prices", "welfare", "FEvaluator", "demand_of", "evaluate_F", "initial_state", "pack",
    "project", "unpack", "ConfigError", "ScenarioConfig", "SweepSpec", "load_scenario",
    "JacobianBundle", "MonotonicityVerdict", "classify", "jacobian", "lowest_eigenvalue",
    "IndexMap", "Topology", "build_index_map", "Aggregate", "MarketFunction", "ModelError",
    "NetworkModel", "PolicyScheme", "QuadraticCost", "validate", "AffineMap", "solve_exhaustive",
    "SolveOutcome", "SolverConfig", "auto_step", "estimate_lipschitz", "solve",
]
