"""Game Jacobian decomposition, eigenvalues and monotonicity classification."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .assembly import FEvaluator
from .model import NetworkModel

SYM_TOL = 1e-10


@dataclass
class JacobianBundle:
    J: np.ndarray
    D: np.ndarray
    N: np.ndarray
    N_bar: np.ndarray
    J_sym: np.ndarray

    @classmethod
    def from_matrix(cls, J) -> "JacobianBundle":
        J = np.array(J, dtype=float)
        D = np.diag(np.diag(J))
        N = J - D
        return cls(J, D, N, (N + N.T) / 2.0, (J + J.T) / 2.0)


def jacobian(model: NetworkModel | FEvaluator, X: Optional[np.ndarray] = None) -> JacobianBundle:
    """Analytic Jacobian of F.  It is constant for quadratic costs, so ``X`` is unused."""
    ev = model if isinstance(model, FEvaluator) else FEvaluator(model)
    return JacobianBundle.from_matrix(ev.J)


def jacobi_eigenvalues(S, tol: float = 1e-10, max_sweeps: int = 100) -> np.ndarray:
    """All eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending."""
    A = np.array(S, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    if not np.allclose(A, A.T, rtol=0.0, atol=SYM_TOL * scale):
        raise ValueError("matrix is not symmetric")
    A = (A + A.T) / 2.0
    n = A.shape[0]

    mask = ~np.eye(n, dtype=bool)

    def off(M):
        return float(np.sqrt((M[mask] ** 2).sum()))

    for _ in range(max_sweeps):
        if off(A) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(1.0, theta)) if theta != 0 else 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                A[p, q] = A[q, p] = 0.0
    else:
        raise RuntimeError("Jacobi sweeps did not converge")
    return np.sort(np.diag(A))


def lowest_eigenvalue(S) -> float:
    return float(jacobi_eigenvalues(S)[0])


@dataclass
class MonotonicityVerdict:
    kind: str  # "strongly" | "monotone" | "indefinite"
    lambda_min_sym: float
    lambda_min_D: float
    lambda_min_N_bar: float
    uniqueness_condition_holds: bool
    tol_eig: float

    def lines(self) -> list[str]:
        return [
            f"monotonicity: {self.kind}",
            f"lambda_min(J_sym): {self.lambda_min_sym:.12g}",
            f"lambda_min(D): {self.lambda_min_D:.12g}",
            f"lambda_min(N_bar): {self.lambda_min_N_bar:.12g}",
            f"uniqueness inequality |lambda_min(N_bar)| < lambda_min(D): "
            f"{'holds' if self.uniqueness_condition_holds else 'fails'}",
            f"tol_eig: {self.tol_eig:.3g}",
        ]


def classify(model: NetworkModel | FEvaluator | np.ndarray,
             samples: Iterable[np.ndarray] = ()) -> MonotonicityVerdict:
    """Classify F from its symmetrized Jacobian.

    Accepts a model, an evaluator, or a bare Jacobian matrix.  The Jacobian is
    constant here, so every sample gives the same verdict and one evaluation covers
    them all.
    """
    if isinstance(model, (NetworkModel, FEvaluator)):
        b = jacobian(model)
    else:
        b = JacobianBundle.from_matrix(model)
    tol = 1e-8 * (1.0 + float(np.abs(b.J).sum(axis=1).max(initial=0.0)))
    lam_sym = lowest_eigenvalue(b.J_sym)
    # D is diagonal: its lowest eigenvalue is its smallest entry
    lam_D = float(np.diag(b.D).min())
    lam_N = lowest_eigenvalue(b.N_bar)
    if lam_sym > tol:
        kind = "strongly"
    elif lam_sym >= -tol:
        kind = "monotone"
    else:
        kind = "indefinite"
    return MonotonicityVerdict(kind, lam_sym, lam_D, lam_N, abs(lam_N) < lam_D, tol)
