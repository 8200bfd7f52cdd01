"""Instance builders and independent reference computations shared by the tests."""
from __future__ import annotations

import numpy as np

from scarcechain.indexing import Topology, build_index_map
from scarcechain.model import (MarketFunction, NetworkModel, PolicyScheme, QuadraticCost,
                               eval_cost, eval_cost_grad, owner_output, producer_input,
                               producer_output, supplier_input, supplier_output)


def make_model(topo: Topology, *, owner_op=None, owner_txn=None, producer_op=None,
               producer_txn=None, supplier_op=None, supplier_txn=None, market_txn=None,
               owner_policies=None, producer_policies=None, capacity=1e6, conversion=1.0,
               weight=1.0, intercept=10.0, slope=-1.0, name="test") -> NetworkModel:
    """Model with zero costs except the callables given; each callable maps
    ``(imap, key) -> QuadraticCost``."""
    im = build_index_map(topo)

    def table(keys, fn):
        return {k: (fn(im, k) if fn else QuadraticCost()) for k in keys}

    return NetworkModel(
        topo,
        table(topo.owners(), owner_op), table(topo.owner_links(), owner_txn),
        table(topo.producers(), producer_op), table(topo.producer_links(), producer_txn),
        table(topo.suppliers(), supplier_op), table(topo.market_links(), supplier_txn),
        table(topo.market_links(), market_txn),
        tuple(owner_policies or [PolicyScheme.none(topo.G)] * topo.I),
        tuple(producer_policies or [PolicyScheme.none(topo.G)] * topo.I),
        tuple([capacity] * topo.I if np.isscalar(capacity) else capacity),
        {k: conversion for k in topo.owner_links()},
        tuple(tuple(tuple(weight for _ in range(topo.S[j])) for _ in range(topo.T[j]))
              for j in range(topo.I)),
        {(j, k): MarketFunction(intercept, slope) for j in range(topo.I) for k in range(topo.K)},
        name=name)


def minimal_chain() -> NetworkModel:
    """One of everything; owner cost x^2, market price 10 - d."""
    topo = Topology.uniform(1, 1, 1, 1, 1, 1)
    return make_model(topo, owner_op=lambda im, k: QuadraticCost.simple(owner_output(im, *k), 1.0))


def random_tiny_model(rng: np.random.Generator, max_vars: int = 12) -> NetworkModel:
    """Random strictly convex instance with at most ``max_vars`` variables."""
    while True:
        G = int(rng.integers(0, 2))
        topo = Topology.uniform(1, int(rng.integers(1, 3)), 1, int(rng.integers(1, 3)), 1,
                                int(rng.integers(1, 3)), G)
        if build_index_map(topo).size <= max_vars:
            break
    u = lambda lo, hi: float(rng.uniform(lo, hi))  # noqa: E731

    def policy():
        br = [(u(2.0, 15.0), -u(0.2, 2.0))] if G else []
        return PolicyScheme(u(-3.0, 3.0), 0.0, tuple(br))

    return make_model(
        topo,
        owner_op=lambda im, k: QuadraticCost.simple(owner_output(im, *k), u(0.5, 3.0), u(0, 3)),
        owner_txn=lambda im, k: QuadraticCost.simple([im.pos("q0", k)], u(0.1, 1.0), u(0, 1)),
        producer_op=lambda im, k: QuadraticCost.simple(producer_input(im, *k), u(0.1, 1.0)),
        producer_txn=lambda im, k: QuadraticCost.simple([im.pos("q1", k)], u(0.1, 1.0), u(0, 1)),
        supplier_op=lambda im, k: QuadraticCost.simple(supplier_input(im, *k), u(0.1, 1.0)),
        supplier_txn=lambda im, k: QuadraticCost.simple([im.pos("q2", k)], u(0.1, 1.0), u(0, 2)),
        market_txn=lambda im, k: QuadraticCost.simple([im.pos("q2", k)], 0.0, u(0.0, 0.5)),
        owner_policies=[policy()], producer_policies=[policy()],
        capacity=u(5.0, 60.0), conversion=u(0.7, 1.0), weight=u(0.5, 1.0),
        intercept=u(40.0, 150.0), slope=-u(0.5, 2.0), name="random")


def reference_F(model: NetworkModel, X: np.ndarray) -> np.ndarray:
    """The combined map written out row by row from the cost functions, without
    going through the compiled evaluator."""
    topo, im = model.topology, model.index_map
    pos = im.pos
    X = np.asarray(X, dtype=float)
    F = np.zeros(im.size)
    G = range(topo.G)
    d = np.zeros((topo.I, topo.K))
    for j, s, t, k in topo.market_links():
        d[j, k] += model.weights[j][t][s] * X[pos("q2", (j, s, t, k))]

    for key in topo.owner_links():
        i, n, j, m = key
        v = pos("q0", key)
        F[v] = (eval_cost_grad(model.owner_op[(i, n)], X, v)
                + eval_cost_grad(model.producer_op[(j, m)], X, v)
                + eval_cost_grad(model.owner_txn[key], X, v)
                - model.owner_policies[i].base_rate + X[pos("l0", (i,))]
                - model.conversion[key] * X[pos("l1", (j, m))]
                + sum(X[pos("mu0", (i, n, g))] for g in G))
    for key in topo.producer_links():
        j, m, s = key
        v = pos("q1", key)
        F[v] = (eval_cost_grad(model.supplier_op[(j, s)], X, v)
                + eval_cost_grad(model.producer_txn[key], X, v)
                - model.producer_policies[j].base_rate + X[pos("l1", (j, m))]
                - X[pos("l2", (j, s))] + sum(X[pos("mu1", (j, m, g))] for g in G))
    for key in topo.market_links():
        j, s, t, k = key
        v = pos("q2", key)
        F[v] = (eval_cost_grad(model.supplier_txn[key], X, v) + eval_cost(model.market_txn[key], X)
                + X[pos("l2", (j, s))] - model.markets[(j, k)].price(d[j, k]))
    for i, n in topo.owners():
        for g in G:
            F[pos("d0", (i, n, g))] = -model.owner_policies[i].brackets[g][1] - X[pos("mu0", (i, n, g))]
            F[pos("mu0", (i, n, g))] = (model.owner_policies[i].brackets[g][0]
                                        - X[owner_output(im, i, n)].sum() + X[pos("d0", (i, n, g))])
    for j, m in topo.producers():
        for g in G:
            F[pos("d1", (j, m, g))] = -model.producer_policies[j].brackets[g][1] - X[pos("mu1", (j, m, g))]
            F[pos("mu1", (j, m, g))] = (model.producer_policies[j].brackets[g][0]
                                        - X[producer_output(im, j, m)].sum() + X[pos("d1", (j, m, g))])
    for i in range(topo.I):
        F[pos("l0", (i,))] = model.capacity[i] - sum(
            X[owner_output(im, i, n)].sum() for n in range(topo.N[i]))
    for j, m in topo.producers():
        inflow = sum(model.conversion[(i, n, j, m)] * X[pos("q0", (i, n, j, m))]
                     for i, n in topo.owners())
        F[pos("l1", (j, m))] = inflow - X[producer_output(im, j, m)].sum()
    for j, s in topo.suppliers():
        F[pos("l2", (j, s))] = X[supplier_input(im, j, s)].sum() - X[supplier_output(im, j, s)].sum()
    return F


def fd_jacobian(F, X: np.ndarray, h: float = 1.0) -> np.ndarray:
    """Central differences.  Exact up to rounding for affine maps, so a unit step
    keeps cancellation error small even when rows carry 1e6-sized constants."""
    n = len(X)
    J = np.empty((n, n))
    for c in range(n):
        e = np.zeros(n)
        e[c] = h
        J[:, c] = (F(X + e) - F(X - e)) / (2 * h)
    return J


def random_feasible(rng: np.random.Generator, size: int, scale: float = 30.0) -> np.ndarray:
    return rng.uniform(0.0, scale, size)
