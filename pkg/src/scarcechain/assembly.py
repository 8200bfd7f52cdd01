"""Assembly of the combined variational-inequality map F over the packed iterate.

Demand is eliminated by substitution (``d = sum w x``), so the feasible set is
the nonnegative orthant and the market price enters the supplier->market rows
as ``-p3(d(Q2))``.
"""
from __future__ import annotations

import numpy as np

from .indexing import BLOCKS, IndexMap
from .model import (NetworkModel, cost_grad_affine, cost_value_affine, eval_cost,
                    eval_cost_grad, owner_output, producer_output, require_valid)


class FEvaluator:
    """Compiled affine map ``F(X) = J X + q`` for a model in the quadratic family.

    Each row of ``J``/``q`` is the recipe for one entry of the combined map:
    own-cost gradients, policy rates, multiplier incidences (+-1, +-psi) and
    capacity/bracket constants.
    """

    def __init__(self, model: NetworkModel):
        self.model = require_valid(model)
        self.imap = model.index_map
        n = self.imap.size
        self.J = np.zeros((n, n))
        self.q = np.zeros(n)
        self._compile()
        self.J.setflags(write=False)
        self.q.setflags(write=False)

    @property
    def size(self) -> int:
        return self.imap.size

    def _add(self, r: int, row: dict[int, float], const: float = 0.0) -> None:
        for c, v in row.items():
            self.J[r, c] += v
        self.q[r] += const

    def _compile(self) -> None:
        md, im, topo = self.model, self.imap, self.model.topology
        pos = im.pos
        G = range(topo.G)

        for key in topo.owner_links():
            i, n, j, m = key
            r = pos("q0", key)
            for cost in (md.owner_op[(i, n)], md.producer_op[(j, m)], md.owner_txn[key]):
                self._add(r, *cost_grad_affine(cost, r))
            self.q[r] -= md.owner_policies[i].base_rate
            self.J[r, pos("l0", (i,))] += 1.0
            self.J[r, pos("l1", (j, m))] -= md.conversion[key]
            for g in G:
                self.J[r, pos("mu0", (i, n, g))] += 1.0

        for key in topo.producer_links():
            j, m, s = key
            r = pos("q1", key)
            for cost in (md.supplier_op[(j, s)], md.producer_txn[key]):
                self._add(r, *cost_grad_affine(cost, r))
            self.q[r] -= md.producer_policies[j].base_rate
            self.J[r, pos("l1", (j, m))] += 1.0
            self.J[r, pos("l2", (j, s))] -= 1.0
            for g in G:
                self.J[r, pos("mu1", (j, m, g))] += 1.0

        for key in topo.market_links():
            j, s, t, k = key
            r = pos("q2", key)
            self._add(r, *cost_grad_affine(md.supplier_txn[key], r))
            self._add(r, *cost_value_affine(md.market_txn[key]))
            self.J[r, pos("l2", (j, s))] += 1.0
            mk = md.markets[(j, k)]
            self.q[r] -= mk.intercept
            for tt in range(topo.T[j]):
                for ss in range(topo.S[j]):
                    self.J[r, pos("q2", (j, ss, tt, k))] -= mk.slope * md.weights[j][tt][ss]

        for i, n in topo.owners():
            pol = md.owner_policies[i]
            for g in G:
                r = pos("d0", (i, n, g))
                self.q[r] -= pol.brackets[g][1]
                self.J[r, pos("mu0", (i, n, g))] -= 1.0
                r = pos("mu0", (i, n, g))
                self.q[r] += pol.brackets[g][0]
                for v in owner_output(im, i, n):
                    self.J[r, v] -= 1.0
                self.J[r, pos("d0", (i, n, g))] += 1.0

        for j, m in topo.producers():
            pol = md.producer_policies[j]
            for g in G:
                r = pos("d1", (j, m, g))
                self.q[r] -= pol.brackets[g][1]
                self.J[r, pos("mu1", (j, m, g))] -= 1.0
                r = pos("mu1", (j, m, g))
                self.q[r] += pol.brackets[g][0]
                for v in producer_output(im, j, m):
                    self.J[r, v] -= 1.0
                self.J[r, pos("d1", (j, m, g))] += 1.0

        for i in range(topo.I):
            r = pos("l0", (i,))
            self.q[r] += md.capacity[i]
            for n in range(topo.N[i]):
                for v in owner_output(im, i, n):
                    self.J[r, v] -= 1.0
        for key in topo.owner_links():
            i, n, j, m = key
            self.J[pos("l1", (j, m)), pos("q0", key)] += md.conversion[key]
        for j, m, s in topo.producer_links():
            self.J[pos("l1", (j, m)), pos("q1", (j, m, s))] -= 1.0
            self.J[pos("l2", (j, s)), pos("q1", (j, m, s))] += 1.0
        for key in topo.market_links():
            j, s, t, k = key
            self.J[pos("l2", (j, s)), pos("q2", key)] -= 1.0

    def evaluate(self, X: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        if X.shape != (self.size,):
            raise ValueError(f"expected a vector of length {self.size}, got shape {X.shape}")
        if out is None:
            return self.J @ X + self.q
        np.matmul(self.J, X, out=out)
        out += self.q
        return out

    __call__ = evaluate


def evaluate_F(ev: FEvaluator, X: np.ndarray) -> np.ndarray:
    return ev.evaluate(np.asarray(X, dtype=float))


def project(X) -> np.ndarray:
    """Projection onto the nonnegative orthant."""
    return np.maximum(np.asarray(X, dtype=float), 0.0)


def vi_residual(ev: FEvaluator, X: np.ndarray) -> float:
    """Natural-map merit ``||X - P(X - F(X))||_inf``; zero exactly at solutions."""
    X = np.asarray(X, dtype=float)
    return float(np.max(np.abs(X - project(X - ev.evaluate(X))), initial=0.0))


def demand_of(model: NetworkModel, X: np.ndarray) -> np.ndarray:
    """``d[j, k] = sum_{t,s} w[j][t][s] x^{js}_{tk}`` as an ``(I, K)`` array."""
    topo, im = model.topology, model.index_map
    d = np.zeros((topo.I, topo.K))
    for j, s, t, k in topo.market_links():
        d[j, k] += model.weights[j][t][s] * X[im.pos("q2", (j, s, t, k))]
    return d


def unpack(imap: IndexMap, X: np.ndarray) -> dict[str, dict[tuple[int, ...], float]]:
    return {b: {idx: float(X[imap.pos(b, idx)]) for idx in imap.keys[b]} for b in BLOCKS}


def pack(imap: IndexMap, blocks: dict[str, dict[tuple[int, ...], float]]) -> np.ndarray:
    X = np.zeros(imap.size)
    for b, entries in blocks.items():
        for idx, v in entries.items():
            X[imap.pos(b, idx)] = v
    return X


def initial_state(model: NetworkModel, value: float = 1.0) -> np.ndarray:
    """All blocks set to ``value`` except excess blocks, which start at the bracket
    excess implied by the starting flows."""
    im = model.index_map
    X = np.full(im.size, float(value))
    X[im.slice("d0")] = 0.0
    X[im.slice("d1")] = 0.0
    topo = model.topology
    for i, n in topo.owners():
        q = X[owner_output(im, i, n)].sum()
        for g, (a, _) in enumerate(model.owner_policies[i].brackets):
            X[im.pos("d0", (i, n, g))] = max(q - a, 0.0)
    for j, m in topo.producers():
        q = X[producer_output(im, j, m)].sum()
        for g, (b, _) in enumerate(model.producer_policies[j].brackets):
            X[im.pos("d1", (j, m, g))] = max(q - b, 0.0)
    return X


def tier_vi_terms(model: NetworkModel, X: np.ndarray, Y: np.ndarray,
                  prices: dict[str, np.ndarray]) -> dict[str, float]:
    """Left-hand sides of the owner, producer, supplier and market optimality
    conditions at ``X`` (the candidate) against ``Y``, using arbitrary
    transaction prices ``prices['p0'|'p1'|'p2']`` indexed like the q0/q1/q2 blocks.

    Evaluated term by term from the cost tables, independently of ``FEvaluator``.
    The market term uses the spatial-price form ``[p2 + c_hat - p3(d)] (y - x)``,
    which is the demand-eliminated counterpart of the market VI.
    """
    topo, im = model.topology, model.index_map
    pos = im.pos
    p0, p1, p2 = prices["p0"], prices["p1"], prices["p2"]
    G = range(topo.G)
    dX = Y - X
    owner = producer = supplier = market = 0.0

    for a, key in enumerate(topo.owner_links()):
        i, n, j, m = key
        v = pos("q0", key)
        row = (eval_cost_grad(model.owner_op[(i, n)], X, v)
               + eval_cost_grad(model.owner_txn[key], X, v)
               - p0[a] - model.owner_policies[i].base_rate
               + X[pos("l0", (i,))] + sum(X[pos("mu0", (i, n, g))] for g in G))
        owner += row * dX[v]
        row = (eval_cost_grad(model.producer_op[(j, m)], X, v) + p0[a]
               - model.conversion[key] * X[pos("l1", (j, m))])
        producer += row * dX[v]
    for i, n in topo.owners():
        q = X[owner_output(im, i, n)].sum()
        for g in G:
            thr, rate = model.owner_policies[i].brackets[g]
            dv, mv = pos("d0", (i, n, g)), pos("mu0", (i, n, g))
            owner += (-rate - X[mv]) * dX[dv]
            owner += (thr - q + X[dv]) * dX[mv]
    for i in range(topo.I):
        used = sum(X[owner_output(im, i, n)].sum() for n in range(topo.N[i]))
        v = pos("l0", (i,))
        owner += (model.capacity[i] - used) * dX[v]

    for b, key in enumerate(topo.producer_links()):
        j, m, s = key
        v = pos("q1", key)
        row = (eval_cost_grad(model.producer_txn[key], X, v) - p1[b]
               - model.producer_policies[j].base_rate + X[pos("l1", (j, m))]
               + sum(X[pos("mu1", (j, m, g))] for g in G))
        producer += row * dX[v]
        row = eval_cost_grad(model.supplier_op[(j, s)], X, v) + p1[b] - X[pos("l2", (j, s))]
        supplier += row * dX[v]
    for j, m in topo.producers():
        out_q = X[producer_output(im, j, m)].sum()
        for g in G:
            thr, rate = model.producer_policies[j].brackets[g]
            dv, mv = pos("d1", (j, m, g)), pos("mu1", (j, m, g))
            producer += (-rate - X[mv]) * dX[dv]
            producer += (thr - out_q + X[dv]) * dX[mv]
        inflow = sum(model.conversion[(i, n, j, m)] * X[pos("q0", (i, n, j, m))]
                     for i, n in topo.owners())
        producer += (inflow - out_q) * dX[pos("l1", (j, m))]

    d = demand_of(model, X)
    for c, key in enumerate(topo.market_links()):
        j, s, t, k = key
        v = pos("q2", key)
        row = eval_cost_grad(model.supplier_txn[key], X, v) - p2[c] + X[pos("l2", (j, s))]
        supplier += row * dX[v]
        row = p2[c] + eval_cost(model.market_txn[key], X) - model.markets[(j, k)].price(d[j, k])
        market += row * dX[v]
    for j, s in topo.suppliers():
        inflow = sum(X[pos("q1", (j, m, s))] for m in range(topo.M[j]))
        outflow = sum(X[pos("q2", (j, s, t, k))] for t in range(topo.T[j]) for k in range(topo.K))
        supplier += (inflow - outflow) * dX[pos("l2", (j, s))]

    return {"owner": owner, "producer": producer, "supplier": supplier, "market": market}
