"""Prices, profits, consumer surplus and welfare at an equilibrium."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .assembly import demand_of
from .model import (NetworkModel, eval_cost, eval_cost_grad, owner_output, policy_payment,
                    producer_output)

FLOW_EPS = 1e-3


@dataclass
class PriceSet:
    """Transaction prices keyed by link (0-based tuples); only positive-flow links appear."""

    p0: dict[tuple[int, int, int, int], float]
    p1: dict[tuple[int, int, int], float]
    p2: dict[tuple[int, int, int, int], float]
    p3: dict[tuple[int, int], float]
    # prices on every link (accounting view, used for profits)
    full: dict[str, np.ndarray] = field(repr=False, default_factory=dict)


def retrieve_prices(model: NetworkModel, X: np.ndarray, flow_eps: float = FLOW_EPS) -> PriceSet:
    topo, im = model.topology, model.index_map
    X = np.asarray(X, dtype=float)
    d = demand_of(model, X)
    p3 = {(j, k): model.markets[(j, k)].price(d[j, k]) for j in range(topo.I) for k in range(topo.K)}

    full0, full1, full2 = [], [], []
    p0, p1, p2 = {}, {}, {}
    for key in topo.market_links():
        j, s, t, k = key
        v = im.pos("q2", key)
        price = p3[(j, k)] - eval_cost(model.market_txn[key], X)
        full2.append(price)
        if X[v] > flow_eps:
            p2[key] = price
    for key in topo.producer_links():
        j, m, s = key
        v = im.pos("q1", key)
        price = X[im.pos("l2", (j, s))] - eval_cost_grad(model.supplier_op[(j, s)], X, v)
        full1.append(price)
        if X[v] > flow_eps:
            p1[key] = price
    for key in topo.owner_links():
        i, n, j, m = key
        v = im.pos("q0", key)
        price = (model.conversion[key] * X[im.pos("l1", (j, m))]
                 - eval_cost_grad(model.producer_op[(j, m)], X, v))
        full0.append(price)
        if X[v] > flow_eps:
            p0[key] = price
    full = {"p0": np.array(full0), "p1": np.array(full1), "p2": np.array(full2)}
    return PriceSet(p0, p1, p2, p3, full)


@dataclass
class Profits:
    owners: dict[tuple[int, int], float]
    producers: dict[tuple[int, int], float]
    suppliers: dict[tuple[int, int], float]
    # realized policy payments (negative = tax), same keys as owners/producers
    owner_payments: dict[tuple[int, int], float]
    producer_payments: dict[tuple[int, int], float]


def profits(model: NetworkModel, X: np.ndarray, prices: PriceSet) -> Profits:
    """Objective values of every firm at ``X`` (policy payments included)."""
    topo, im = model.topology, model.index_map
    X = np.asarray(X, dtype=float)
    P0, P1, P2 = prices.full["p0"], prices.full["p1"], prices.full["p2"]
    q0 = X[im.slice("q0")]
    q1 = X[im.slice("q1")]
    q2 = X[im.slice("q2")]
    links0 = list(topo.owner_links())
    links1 = list(topo.producer_links())
    links2 = list(topo.market_links())

    owners, own_pay = {}, {}
    for i, n in topo.owners():
        rev = sum(P0[a] * q0[a] for a, key in enumerate(links0) if key[:2] == (i, n))
        cost = eval_cost(model.owner_op[(i, n)], X) + sum(
            eval_cost(model.owner_txn[key], X) for key in links0 if key[:2] == (i, n))
        pay = policy_payment(model.owner_policies[i], X[owner_output(im, i, n)].sum())
        owners[(i, n)] = rev - cost + pay
        own_pay[(i, n)] = pay

    producers, prod_pay = {}, {}
    for j, m in topo.producers():
        rev = sum(P1[b] * q1[b] for b, key in enumerate(links1) if key[:2] == (j, m))
        buy = sum(P0[a] * q0[a] for a, key in enumerate(links0) if key[2:] == (j, m))
        cost = eval_cost(model.producer_op[(j, m)], X) + sum(
            eval_cost(model.producer_txn[key], X) for key in links1 if key[:2] == (j, m))
        pay = policy_payment(model.producer_policies[j], X[producer_output(im, j, m)].sum())
        producers[(j, m)] = rev - buy - cost + pay
        prod_pay[(j, m)] = pay

    suppliers = {}
    for j, s in topo.suppliers():
        rev = sum(P2[c] * q2[c] for c, key in enumerate(links2) if key[:2] == (j, s))
        buy = sum(P1[b] * q1[b] for b, key in enumerate(links1) if (key[0], key[2]) == (j, s))
        cost = eval_cost(model.supplier_op[(j, s)], X) + sum(
            eval_cost(model.supplier_txn[key], X) for key in links2 if key[:2] == (j, s))
        suppliers[(j, s)] = rev - buy - cost
    return Profits(owners, producers, suppliers, own_pay, prod_pay)


def consumer_surplus(model: NetworkModel, d: np.ndarray) -> np.ndarray:
    """Area under linear inverse demand above the price: ``-slope * d^2 / 2``."""
    topo = model.topology
    cs = np.zeros((topo.I, topo.K))
    for j in range(topo.I):
        for k in range(topo.K):
            cs[j, k] = -model.markets[(j, k)].slope * d[j, k] ** 2 / 2.0
    return cs


@dataclass
class WelfareReport:
    profits: Profits
    cs: np.ndarray  # [j, k]
    demand: np.ndarray  # [j, k]
    owner_total: float
    producer_total: float
    supplier_total: float
    cs_total: float
    sw: float
    incentives: float  # payments disbursed (positive parts)
    taxes: float  # receipts collected (magnitude of negative parts)
    net_incentive: float
    delta_sw: Optional[float] = None
    benefit_cost: Optional[float] = None


def welfare(model: NetworkModel, X: np.ndarray, prices: Optional[PriceSet] = None,
            baseline: Optional[WelfareReport] = None) -> WelfareReport:
    X = np.asarray(X, dtype=float)
    if prices is None:
        prices = retrieve_prices(model, X)
    pr = profits(model, X, prices)
    d = demand_of(model, X)
    cs = consumer_surplus(model, d)
    owner_total = sum(pr.owners.values())
    producer_total = sum(pr.producers.values())
    supplier_total = sum(pr.suppliers.values())
    cs_total = float(cs.sum())
    payments = [*pr.owner_payments.values(), *pr.producer_payments.values()]
    incentives = sum(p for p in payments if p > 0)
    taxes = -sum(p for p in payments if p < 0)
    net = incentives - taxes
    rep = WelfareReport(pr, cs, d, owner_total, producer_total, supplier_total, cs_total,
                        owner_total + producer_total + supplier_total + cs_total,
                        incentives, taxes, net)
    if baseline is not None:
        rep.delta_sw = rep.sw - baseline.sw
        rep.benefit_cost = rep.delta_sw / net if net != 0 else None
    return rep


@dataclass(frozen=True)
class SeveredLink:
    tier: str  # "q0" | "q1" | "q2"
    index: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.tier}[{','.join(str(v + 1) for v in self.index)}]"


def detect_shortages(model: NetworkModel, X: np.ndarray, flow_eps: float = FLOW_EPS):
    """Links carrying less than ``flow_eps``, and the (product, market) pairs left
    with no inbound flow at all.  Returns ``(severed_links, cut_markets)``."""
    topo, im = model.topology, model.index_map
    severed = [SeveredLink(block, key) for block in ("q0", "q1", "q2")
               for key in im.keys[block] if X[im.pos(block, key)] < flow_eps]
    cut = []
    for j in range(topo.I):
        for k in range(topo.K):
            inbound = [X[im.pos("q2", (j, s, t, k))]
                       for s in range(topo.S[j]) for t in range(topo.T[j])]
            if all(x < flow_eps for x in inbound):
                cut.append((j, k))
    return severed, cut
