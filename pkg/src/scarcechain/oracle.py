"""Brute-force LCP oracle for tiny affine instances.

Every active set ``A`` is tried: solve ``F_A(X) = 0`` with ``X`` zero off ``A``
and keep the point if it is complementary.  Exponential, so capped at 22 variables.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .assembly import FEvaluator
from .model import NetworkModel

MAX_VARS = 22
PIVOT_TOL = 1e-12
FEAS_TOL = 1e-8


@dataclass(frozen=True)
class AffineMap:
    Jc: np.ndarray
    q: np.ndarray

    def __call__(self, X):
        return self.Jc @ X + self.q

    @property
    def size(self) -> int:
        return len(self.q)

    @classmethod
    def extract(cls, F: Callable[[np.ndarray], np.ndarray] | NetworkModel | FEvaluator,
                size: int | None = None) -> "AffineMap":
        """Recover ``(Jc, q)`` by probing F at the origin and the unit vectors."""
        if isinstance(F, NetworkModel):
            F = FEvaluator(F)
        if isinstance(F, FEvaluator):
            size = F.size
        if size is None:
            raise ValueError("size is required for a bare callable")
        zero = np.zeros(size)
        q = np.asarray(F(zero), dtype=float).copy()
        Jc = np.empty((size, size))
        for c in range(size):
            e = zero.copy()
            e[c] = 1.0
            Jc[:, c] = np.asarray(F(e), dtype=float) - q
        return cls(Jc, q)


def full_pivot_solve(A, b, pivot_tol: float = PIVOT_TOL):
    """Gaussian elimination with complete pivoting; ``None`` if a pivot falls below tol."""
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    n = len(b)
    cols = np.arange(n)
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    for k in range(n):
        sub = np.abs(A[k:, k:])
        r, c = np.unravel_index(int(np.argmax(sub)), sub.shape)
        r += k
        c += k
        if abs(A[r, c]) < pivot_tol * scale:
            return None
        A[[k, r]] = A[[r, k]]
        b[[k, r]] = b[[r, k]]
        A[:, [k, c]] = A[:, [c, k]]
        cols[[k, c]] = cols[[c, k]]
        f = A[k + 1:, k] / A[k, k]
        A[k + 1:, k:] -= np.outer(f, A[k, k:])
        b[k + 1:] -= f * b[k]
    y = np.zeros(n)
    for k in range(n - 1, -1, -1):
        y[k] = (b[k] - A[k, k + 1:] @ y[k + 1:]) / A[k, k]
    x = np.empty(n)
    x[cols] = y
    return x


@dataclass
class OracleResult:
    solutions: list[np.ndarray]
    singular: list[int] = field(default_factory=list)  # bitmasks of skipped active sets


def solve_exhaustive(amap: AffineMap, tol: float = FEAS_TOL) -> OracleResult:
    n = amap.size
    if n > MAX_VARS:
        raise ValueError(f"{n} variables exceeds the enumeration cap of {MAX_VARS}")
    Jc, q = amap.Jc, amap.q
    found: list[np.ndarray] = []
    singular = []
    for mask in range(1 << n):
        active = [v for v in range(n) if mask >> v & 1]
        X = np.zeros(n)
        if active:
            sol = full_pivot_solve(Jc[np.ix_(active, active)], -q[active])
            if sol is None:
                singular.append(mask)
                continue
            X[active] = sol
        if X.min(initial=0.0) < -tol:
            continue
        X = np.maximum(X, 0.0)
        Fx = Jc @ X + q
        if Fx.min() < -tol or np.abs(X * Fx).max() > tol:
            continue
        if not any(np.abs(X - Y).max() <= tol for Y in found):
            found.append(X)
    return OracleResult(found, singular)
