"""Modified projection (extragradient) method over the nonnegative orthant."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Literal, Union

import numpy as np

from .assembly import FEvaluator, initial_state, project, vi_residual
from .model import NetworkModel

log = logging.getLogger(__name__)

Status = Literal["converged", "max_iters", "diverged"]


@dataclass(frozen=True)
class SolverConfig:
    phi: Union[float, Literal["auto"]] = 0.01
    eps: float = 1e-4
    max_iters: int = 1_000_000
    initial: Union[float, str, np.ndarray, None] = None  # None -> all ones; "random" -> seeded
    seed: int = 0
    trace_every: int = 0
    explosion: float = 1e12
    safety: float = 0.9  # used when phi == "auto"

    def problems(self) -> list[str]:
        out = []
        if self.phi != "auto" and not (isinstance(self.phi, (int, float)) and self.phi > 0):
            out.append(f"phi: must be positive or 'auto', got {self.phi!r}")
        if not self.eps > 0:
            out.append(f"eps: must be positive, got {self.eps}")
        if self.max_iters < 1:
            out.append(f"max_iters: must be >= 1, got {self.max_iters}")
        if isinstance(self.initial, str) and self.initial != "random":
            out.append(f"initial: expected 'ones', 'random' or a number, got {self.initial!r}")
        if self.trace_every < 0:
            out.append("trace_every: must be >= 0")
        return out


@dataclass
class SolveOutcome:
    X: np.ndarray
    iterations: int
    final_gap: float
    residual: float
    status: Status
    phi: float
    trace: list[tuple[int, float, float]] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def power_iteration_norm(J: np.ndarray, rtol: float = 1e-6, max_iter: int = 100_000) -> float:
    """Largest singular value of ``J`` by power iteration on ``J^T J``."""
    n = J.shape[1]
    if n == 0 or not np.any(J):
        return 0.0
    # deterministic start with no special alignment to any axis
    v = np.cos(np.arange(1, n + 1) * 0.7) + 1.5
    v /= np.linalg.norm(v)
    sigma2 = 0.0
    for _ in range(max_iter):
        w = J.T @ (J @ v)
        new = float(np.linalg.norm(w))
        if new == 0.0:
            return 0.0
        v = w / new
        if abs(new - sigma2) <= rtol * new:
            sigma2 = new
            break
        sigma2 = new
    return float(np.sqrt(sigma2))


def estimate_lipschitz(model_or_ev: NetworkModel | FEvaluator) -> float:
    """Lipschitz constant of F: its (constant) Jacobian's spectral norm."""
    ev = model_or_ev if isinstance(model_or_ev, FEvaluator) else FEvaluator(model_or_ev)
    return power_iteration_norm(np.asarray(ev.J))


def auto_step(model_or_ev: NetworkModel | FEvaluator | float, safety: float = 0.9) -> float:
    """``safety / L``.  Accepts a precomputed ``L`` as a number."""
    L = (float(model_or_ev) if isinstance(model_or_ev, (int, float))
         else estimate_lipschitz(model_or_ev))
    if L <= 0:
        raise ValueError("Lipschitz constant is zero; any step works, pick one explicitly")
    return safety / L


def extragradient(F: Callable[[np.ndarray], np.ndarray], X0: np.ndarray, phi: float,
                  eps: float, max_iters: int, explosion: float = 1e12,
                  trace_every: int = 0, residual: Callable[[np.ndarray], float] | None = None):
    """Run the two-projection iteration until ``||X^t - X^{t-1}||_inf <= eps``.

    Returns ``(X, iterations, final_gap, status, trace)``.
    """
    X = project(X0)
    trace = []
    gap = float("inf")
    first_gap = None
    for it in range(1, max_iters + 1):
        Xbar = np.maximum(X - phi * F(X), 0.0)
        Xn = np.maximum(X - phi * F(Xbar), 0.0)
        gap = float(np.max(np.abs(Xn - X), initial=0.0))
        X = Xn
        if first_gap is None:
            first_gap = max(gap, 1.0)
        if trace_every and it % trace_every == 0:
            trace.append((it, gap, residual(X) if residual else float("nan")))
        if gap <= eps:
            return X, it, gap, "converged", trace
        if not np.isfinite(gap) or gap > explosion * first_gap:
            return X, it, gap, "diverged", trace
    return X, max_iters, gap, "max_iters", trace


def solve(model: NetworkModel | FEvaluator, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    problems = config.problems()
    if problems:
        raise ValueError("invalid solver config: " + "; ".join(problems))
    ev = model if isinstance(model, FEvaluator) else FEvaluator(model)
    phi = auto_step(ev, config.safety) if config.phi == "auto" else float(config.phi)

    if config.initial is None:
        X0 = initial_state(ev.model, 1.0)
    elif isinstance(config.initial, str):
        X0 = np.random.default_rng(config.seed).uniform(0.0, 2.0, ev.size)
    elif np.isscalar(config.initial):
        X0 = initial_state(ev.model, float(config.initial))
    else:
        X0 = np.array(config.initial, dtype=float)
        if X0.shape != (ev.size,):
            raise ValueError(f"initial point has shape {X0.shape}, expected ({ev.size},)")

    X, iters, gap, status, trace = extragradient(
        ev.evaluate, X0, phi, config.eps, config.max_iters, config.explosion,
        config.trace_every, lambda Z: vi_residual(ev, Z))
    res = vi_residual(ev, X) if np.all(np.isfinite(X)) else float("inf")
    log.info("solve %s: %s after %d iterations (gap %.3g, residual %.3g)",
             ev.model.name or "<model>", status, iters, gap, res)
    return SolveOutcome(X, iters, gap, res, status, phi, trace)
