"""CSV/text report writers.  Headers are fixed per report type."""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .analysis import PriceSet, WelfareReport, detect_shortages
from .assembly import FEvaluator, demand_of
from .diagnostics import MonotonicityVerdict
from .model import NetworkModel
from .solver import SolveOutcome

EQUILIBRIUM_HEADER = ("variable", "block", "from", "to", "mode", "bracket", "value", "value_2dp")
PRICES_HEADER = ("price", "link", "from", "to", "mode", "flow", "value", "value_2dp")
WELFARE_HEADER = ("category", "index", "value", "value_2dp")
TRACE_HEADER = ("iteration", "gap", "residual")
COMPARE_HEADER = ("category", "index", "baseline", "policy", "delta")
SWEEP_HEADER = ("point", "target", "value", "status", "iterations", "owner_total",
                "producer_total", "supplier_total", "cs_total", "sw", "net_incentive",
                "delta_sw", "benefit_cost", "severed_links", "error")


def fmt(v) -> str:
    """17 significant digits; blank for missing values."""
    if v is None:
        return ""
    v = float(v) + 0.0  # drop negative zero
    return f"{v:.17g}"


def fmt2(v) -> str:
    if v is None:
        return ""
    return f"{round(float(v), 2) + 0.0:.2f}"


def _ix(*idx: int) -> str:
    return "(" + ",".join(str(v + 1) for v in idx) + ")"


def _write(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    path.write_bytes(buf.getvalue().encode("utf-8"))


def _describe(block: str, idx: tuple[int, ...]) -> tuple[str, str, str, str]:
    """(from, to, mode, bracket) columns for one packed variable."""
    if block == "q0":
        return "owner" + _ix(*idx[:2]), "producer" + _ix(*idx[2:]), "", ""
    if block == "q1":
        j, m, s = idx
        return "producer" + _ix(j, m), "supplier" + _ix(j, s), "", ""
    if block == "q2":
        j, s, t, k = idx
        return "supplier" + _ix(j, s), "market" + _ix(j, k), str(t + 1), ""
    if block in ("d0", "mu0"):
        return "owner" + _ix(*idx[:2]), "", "", str(idx[2] + 1)
    if block in ("d1", "mu1"):
        return "producer" + _ix(*idx[:2]), "", "", str(idx[2] + 1)
    if block == "l0":
        return "resource" + _ix(*idx), "", "", ""
    if block == "l1":
        return "producer" + _ix(*idx), "", "", ""
    if block == "l2":
        return "supplier" + _ix(*idx), "", "", ""
    raise KeyError(block)


def equilibrium_rows(model: NetworkModel, X: np.ndarray) -> list[tuple]:
    im = model.index_map
    rows = []
    for p in range(im.size):
        block, idx = im.label(p)
        rows.append((im.name(p), block, *_describe(block, idx), fmt(X[p]), fmt2(X[p])))
    d = demand_of(model, X)
    for j in range(d.shape[0]):
        for k in range(d.shape[1]):
            rows.append((f"d[{j + 1},{k + 1}]", "d", "product" + _ix(j), "market" + _ix(j, k),
                         "", "", fmt(d[j, k]), fmt2(d[j, k])))
    return rows


def write_equilibrium(path: Path, model: NetworkModel, X: np.ndarray) -> None:
    _write(path, EQUILIBRIUM_HEADER, equilibrium_rows(model, X))


def write_prices(path: Path, model: NetworkModel, X: np.ndarray, prices: PriceSet) -> None:
    im = model.index_map
    rows = []
    for tag, block, table in (("p0", "q0", prices.p0), ("p1", "q1", prices.p1),
                              ("p2", "q2", prices.p2)):
        for idx in im.keys[block]:
            if idx in table:
                p = im.pos(block, idx)
                rows.append((tag, im.name(p), *_describe(block, idx)[:3], fmt(X[p]),
                             fmt(table[idx]), fmt2(table[idx])))
    d = demand_of(model, X)
    for (j, k), v in sorted(prices.p3.items()):
        rows.append(("p3", f"d[{j + 1},{k + 1}]", "product" + _ix(j), "market" + _ix(j, k), "",
                     fmt(d[j, k]), fmt(v), fmt2(v)))
    _write(path, PRICES_HEADER, rows)


def welfare_rows(rep: WelfareReport) -> list[tuple[str, str, Optional[float]]]:
    """(category, index, value) triples in a fixed order."""
    pr = rep.profits
    out = []
    out += [("owner_profit", _ix(*k), v) for k, v in pr.owners.items()]
    out += [("producer_profit", _ix(*k), v) for k, v in pr.producers.items()]
    out += [("supplier_profit", _ix(*k), v) for k, v in pr.suppliers.items()]
    out += [("consumer_surplus", _ix(j, k), rep.cs[j, k])
            for j in range(rep.cs.shape[0]) for k in range(rep.cs.shape[1])]
    out += [("owner_total", "", rep.owner_total), ("producer_total", "", rep.producer_total),
            ("supplier_total", "", rep.supplier_total), ("cs_total", "", rep.cs_total),
            ("sw", "", rep.sw), ("incentives", "", rep.incentives), ("taxes", "", rep.taxes),
            ("net_incentive", "", rep.net_incentive), ("delta_sw", "", rep.delta_sw),
            ("benefit_cost", "", rep.benefit_cost)]
    return out


def write_welfare(path: Path, rep: WelfareReport) -> None:
    _write(path, WELFARE_HEADER, [(c, i, fmt(v), fmt2(v)) for c, i, v in welfare_rows(rep)])


def write_trace(path: Path, outcome: SolveOutcome) -> None:
    _write(path, TRACE_HEADER, [(it, fmt(g), fmt(r)) for it, g, r in outcome.trace])


def diagnostics_text(model: NetworkModel, ev: FEvaluator, outcome: SolveOutcome,
                     verdict: MonotonicityVerdict, lipschitz: float,
                     flow_eps: float = 1e-3) -> str:
    X = outcome.X
    F = ev.evaluate(X)
    severed, cut = detect_shortages(model, X, flow_eps)
    lines = [
        f"scenario: {model.name or '<unnamed>'}",
        f"variables: {ev.size}",
        f"status: {outcome.status}",
        f"iterations: {outcome.iterations}",
        f"final_gap: {fmt(outcome.final_gap)}",
        f"residual: {fmt(outcome.residual)}",
        f"max_complementarity: {fmt(np.abs(X * F).max(initial=0.0))}",
        f"phi: {fmt(outcome.phi)}",
        f"lipschitz_estimate: {fmt(lipschitz)}",
        *verdict.lines(),
        f"severed_links: {' '.join(str(s) for s in severed) or 'none'}",
        "cut_markets: " + (" ".join(f"product{_ix(j)}->market{_ix(j, k)}" for j, k in cut)
                           or "none"),
    ]
    return "\n".join(lines) + "\n"


def write_diagnostics(path: Path, text: str) -> None:
    path.write_bytes(text.encode("utf-8"))


def compare_rows(base: WelfareReport, policy: WelfareReport) -> list[tuple]:
    rows = []
    for (c, i, b), (_, _, p) in zip(welfare_rows(base), welfare_rows(policy)):
        if c in ("delta_sw", "benefit_cost"):
            continue
        delta = None if b is None or p is None else p - b
        rows.append((c, i, fmt(b), fmt(p), fmt(delta)))
    rows.append(("delta_sw", "", "", fmt(policy.delta_sw), ""))
    rows.append(("benefit_cost", "", "", fmt(policy.benefit_cost), ""))
    return rows


def write_compare(path: Path, base: WelfareReport, policy: WelfareReport) -> None:
    _write(path, COMPARE_HEADER, compare_rows(base, policy))


def write_sweep(path: Path, rows: Iterable[Sequence]) -> None:
    _write(path, SWEEP_HEADER, rows)
