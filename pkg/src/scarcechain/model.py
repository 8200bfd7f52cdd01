"""Problem instances: costs, fiscal policies, markets and their validation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .indexing import IndexMap, Topology, build_index_map

DEFAULT_THRESHOLD = 1e6  # stands in for "sufficiently large" brackets/capacities


@dataclass(frozen=True)
class Aggregate:
    """Linear form ``sum(coef * X[var])`` over flow variables."""

    terms: tuple[tuple[int, float], ...]

    def value(self, X: np.ndarray) -> float:
        return sum(c * X[v] for v, c in self.terms)

    def coef(self, var: int) -> float:
        return sum(c for v, c in self.terms if v == var)

    @classmethod
    def of(cls, variables: Iterable[int], coef: float = 1.0) -> "Aggregate":
        return cls(tuple((int(v), float(coef)) for v in variables))


@dataclass(frozen=True)
class QuadraticCost:
    """``sum_{p<=q} quad[p][q] A_p A_q + sum_p lin[p] A_p + const`` over aggregates A."""

    aggregates: tuple[Aggregate, ...] = ()
    quad: tuple[tuple[float, ...], ...] = ()
    lin: tuple[float, ...] = ()
    const: float = 0.0

    @classmethod
    def simple(cls, variables: Iterable[int], quad: float = 0.0, lin: float = 0.0,
               const: float = 0.0) -> "QuadraticCost":
        """``quad * A^2 + lin * A + const`` with A the plain sum of ``variables``."""
        return cls((Aggregate.of(variables),), ((float(quad),),), (float(lin),), float(const))

    @property
    def is_zero(self) -> bool:
        return (self.const == 0.0 and not any(self.lin)
                and not any(any(row) for row in self.quad))

    def problems(self, n_flows: int) -> list[str]:
        out = []
        P = len(self.aggregates)
        if len(self.lin) != P or len(self.quad) != P or any(len(r) != P for r in self.quad):
            out.append(f"coefficient table shape does not match {P} aggregates")
            return out
        for p in range(P):
            for q in range(p):
                if self.quad[p][q] != 0.0:
                    out.append(f"quad[{p + 1}][{q + 1}] below the diagonal must be zero")
        for agg in self.aggregates:
            for v, _ in agg.terms:
                if not 0 <= v < n_flows:
                    out.append(f"aggregate references variable {v} outside the flow blocks")
        values = [self.const, *self.lin, *(x for r in self.quad for x in r),
                  *(c for a in self.aggregates for _, c in a.terms)]
        if not all(math.isfinite(x) for x in values):
            out.append("non-finite coefficient")
        return out


def eval_cost(cost: QuadraticCost, X: Sequence[float]) -> float:
    A = [a.value(X) for a in cost.aggregates]
    total = cost.const
    for p, Ap in enumerate(A):
        total += cost.lin[p] * Ap
        row = cost.quad[p]
        for q in range(p, len(A)):
            total += row[q] * Ap * A[q]
    return float(total)


def eval_cost_grad(cost: QuadraticCost, X: Sequence[float], var: int) -> float:
    """Exact partial derivative of ``cost`` with respect to flow ``var``."""
    if not 0 <= var < len(X):
        raise IndexError(f"variable {var} out of range")
    A = [a.value(X) for a in cost.aggregates]
    a = [agg.coef(var) for agg in cost.aggregates]
    g = 0.0
    for p in range(len(A)):
        g += cost.lin[p] * a[p]
        for q in range(p, len(A)):
            g += cost.quad[p][q] * (a[p] * A[q] + A[p] * a[q])
    return float(g)


def cost_grad_affine(cost: QuadraticCost, var: int) -> tuple[dict[int, float], float]:
    """The gradient w.r.t. ``var`` as an affine form: ``({col: coef}, const)``."""
    a = [agg.coef(var) for agg in cost.aggregates]
    row: dict[int, float] = {}
    const = 0.0
    for p, agg_p in enumerate(cost.aggregates):
        const += cost.lin[p] * a[p]
        for q in range(p, len(cost.aggregates)):
            c = cost.quad[p][q]
            if c == 0.0:
                continue
            # d(A_p A_q)/dx_var = a_p A_q + A_p a_q
            if a[p]:
                for v, w in cost.aggregates[q].terms:
                    row[v] = row.get(v, 0.0) + c * a[p] * w
            if a[q]:
                for v, w in agg_p.terms:
                    row[v] = row.get(v, 0.0) + c * a[q] * w
    return row, const


def cost_value_affine(cost: QuadraticCost) -> tuple[dict[int, float], float]:
    """Coefficients of a cost that is affine in the flows (no quadratic part)."""
    if any(any(r) for r in cost.quad):
        raise ValueError("cost has a quadratic part")
    row: dict[int, float] = {}
    for p, agg in enumerate(cost.aggregates):
        for v, w in agg.terms:
            row[v] = row.get(v, 0.0) + cost.lin[p] * w
    return row, cost.const


@dataclass(frozen=True)
class PolicyScheme:
    """Linear base payment plus bracketed marginal adjustments.

    Negative rates are taxes.  ``brackets`` holds ``(threshold, marginal_rate)``.
    """

    base_rate: float = 0.0
    base_lump: float = 0.0
    brackets: tuple[tuple[float, float], ...] = ()

    @classmethod
    def none(cls, G: int) -> "PolicyScheme":
        return cls(0.0, 0.0, tuple((DEFAULT_THRESHOLD * (g + 1), 0.0) for g in range(G)))

    @property
    def thresholds(self) -> tuple[float, ...]:
        return tuple(b[0] for b in self.brackets)

    @property
    def rates(self) -> tuple[float, ...]:
        return tuple(b[1] for b in self.brackets)

    @property
    def is_active(self) -> bool:
        return bool(self.base_rate or self.base_lump or any(self.rates))


def excess_quantities(scheme: PolicyScheme, q: float) -> list[float]:
    return [max(q - a, 0.0) for a in scheme.thresholds]


def policy_payment(scheme: PolicyScheme, q: float) -> float:
    total = scheme.base_lump + scheme.base_rate * q
    for (_, rate), delta in zip(scheme.brackets, excess_quantities(scheme, q)):
        total += rate * delta
    return total


@dataclass(frozen=True)
class MarketFunction:
    """Linear inverse demand ``p(d) = intercept + slope * d``."""

    intercept: float
    slope: float

    def price(self, d: float) -> float:
        return self.intercept + self.slope * d


@dataclass(frozen=True)
class NetworkModel:
    """A complete instance.  Cost tables are keyed by 0-based index tuples.

    Treated as immutable once validated; evaluation helpers never mutate it.
    """

    topology: Topology
    owner_op: Mapping[tuple[int, int], QuadraticCost]
    owner_txn: Mapping[tuple[int, int, int, int], QuadraticCost]
    producer_op: Mapping[tuple[int, int], QuadraticCost]
    producer_txn: Mapping[tuple[int, int, int], QuadraticCost]
    supplier_op: Mapping[tuple[int, int], QuadraticCost]
    supplier_txn: Mapping[tuple[int, int, int, int], QuadraticCost]
    market_txn: Mapping[tuple[int, int, int, int], QuadraticCost]
    owner_policies: tuple[PolicyScheme, ...]
    producer_policies: tuple[PolicyScheme, ...]
    capacity: tuple[float, ...]
    conversion: Mapping[tuple[int, int, int, int], float]
    weights: tuple[tuple[tuple[float, ...], ...], ...]  # [j][t][s]
    markets: Mapping[tuple[int, int], MarketFunction]
    name: str = field(default="", compare=False)

    @cached_property
    def index_map(self) -> IndexMap:
        return build_index_map(self.topology)

    def cost_tables(self):
        """``(table name, expected keys, table)`` for every cost table."""
        t = self.topology
        return (
            ("owner_op_cost", list(t.owners()), self.owner_op),
            ("owner_txn_cost", list(t.owner_links()), self.owner_txn),
            ("producer_op_cost", list(t.producers()), self.producer_op),
            ("producer_txn_cost", list(t.producer_links()), self.producer_txn),
            ("supplier_op_cost", list(t.suppliers()), self.supplier_op),
            ("supplier_txn_cost", list(t.market_links()), self.supplier_txn),
            ("market_txn_cost", list(t.market_links()), self.market_txn),
        )


def _fmt(idx: tuple[int, ...]) -> str:
    return "".join(f"[{v + 1}]" for v in idx)


def validate(model: NetworkModel) -> list[str]:
    """Every violated invariant, with 1-based index context.  Empty means valid."""
    topo = model.topology
    out = topo.problems()
    if out:
        return out
    imap = model.index_map
    for name, keys, table in model.cost_tables():
        missing = [k for k in keys if k not in table]
        for k in missing:
            out.append(f"{name}{_fmt(k)}: missing")
        for k in set(table) - set(keys):
            out.append(f"{name}{_fmt(k)}: index outside the topology")
        for k in keys:
            if k in table:
                out.extend(f"{name}{_fmt(k)}: {p}" for p in table[k].problems(imap.n_flows))
                # market-side costs enter F by value, so they must be affine to keep F affine
                if name == "market_txn_cost" and any(any(r) for r in table[k].quad):
                    out.append(f"{name}{_fmt(k)}: must be affine (no quadratic part)")

    for label, policies in (("owner_policies", model.owner_policies),
                            ("producer_policies", model.producer_policies)):
        if len(policies) != topo.I:
            out.append(f"{label}: expected {topo.I} schemes, got {len(policies)}")
            continue
        for r, pol in enumerate(policies):
            where = f"{label}[{r + 1}]"
            if len(pol.brackets) != topo.G:
                out.append(f"{where}.brackets: expected {topo.G} brackets, got {len(pol.brackets)}")
            th = pol.thresholds
            if any(b <= a for a, b in zip(th, th[1:])):
                out.append(f"{where}.brackets: thresholds must be strictly increasing")
            if any(a < 0 for a in th):
                out.append(f"{where}.brackets: thresholds must be nonnegative")
            # a positive marginal rate rewards unbounded excess, leaving the problem without a solution
            if any(r > 0 for r in pol.rates):
                out.append(f"{where}.brackets: marginal rates must be <= 0")
            vals = (pol.base_rate, pol.base_lump, *th, *pol.rates)
            if not all(math.isfinite(v) for v in vals):
                out.append(f"{where}: non-finite value")

    if len(model.capacity) != topo.I:
        out.append(f"capacity: expected {topo.I} entries, got {len(model.capacity)}")
    for i, u in enumerate(model.capacity):
        if not u > 0:
            out.append(f"capacity[{i + 1}]: must be positive, got {u}")

    for key in topo.owner_links():
        psi = model.conversion.get(key)
        if psi is None:
            out.append(f"conversion{_fmt(key)}: missing")
        elif not (psi >= 0 and math.isfinite(psi)):
            out.append(f"conversion{_fmt(key)}: must be nonnegative, got {psi}")

    if len(model.weights) != topo.I:
        out.append(f"weights: expected {topo.I} resources, got {len(model.weights)}")
    else:
        for j, wj in enumerate(model.weights):
            if len(wj) != topo.T[j] or any(len(row) != topo.S[j] for row in wj):
                out.append(f"weights[{j + 1}]: expected a {topo.T[j]}x{topo.S[j]} table")
                continue
            for t, row in enumerate(wj):
                for s, w in enumerate(row):
                    if not (w >= 0 and math.isfinite(w)):
                        out.append(f"weights[{j + 1}][{t + 1}][{s + 1}]: must be nonnegative")

    for j in range(topo.I):
        for k in range(topo.K):
            mk = model.markets.get((j, k))
            if mk is None:
                out.append(f"markets[{j + 1}][{k + 1}]: missing")
            elif not mk.slope < 0:
                out.append(f"markets[{j + 1}][{k + 1}]: slope must be negative, got {mk.slope}")
            elif not math.isfinite(mk.intercept):
                out.append(f"markets[{j + 1}][{k + 1}]: non-finite intercept")
    return out


class ModelError(ValueError):
    """Raised when an operation needs a valid model and gets an invalid one."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("invalid model:\n  " + "\n  ".join(problems))


def require_valid(model: NetworkModel) -> NetworkModel:
    problems = validate(model)
    if problems:
        raise ModelError(problems)
    return model


# --- aggregate helpers used to author costs ---------------------------------

def owner_output(imap: IndexMap, i: int, n: int) -> list[int]:
    """Flow ids of ``sum_{j,m} x^{in}_{jm}``."""
    return [imap.pos("q0", (i, n, j, m)) for j, m in imap.topology.producers()]


def producer_input(imap: IndexMap, j: int, m: int) -> list[int]:
    return [imap.pos("q0", (i, n, j, m)) for i, n in imap.topology.owners()]


def producer_output(imap: IndexMap, j: int, m: int) -> list[int]:
    return [imap.pos("q1", (j, m, s)) for s in range(imap.topology.S[j])]


def supplier_input(imap: IndexMap, j: int, s: int) -> list[int]:
    return [imap.pos("q1", (j, m, s)) for m in range(imap.topology.M[j])]


def supplier_output(imap: IndexMap, j: int, s: int) -> list[int]:
    t_ = imap.topology
    return [imap.pos("q2", (j, s, t, k)) for t in range(t_.T[j]) for k in range(t_.K)]
