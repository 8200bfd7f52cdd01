"""Scenario files: YAML trees with explicit, named index tuples.

Cost tables, policies, conversion rates, weights and markets are mappings from
an index key to an entry.  Keys name their axes with 1-based values, e.g.
``"i=1,n=2"``; axes left out act as wildcards and ``"*"`` matches everything.
The most specific matching key wins; two equally specific matches are an error.

A cost entry is either the *simple* form ``{quad, lin, const}`` applied to the
table's natural argument (the link flow, or the agent's total flow for
operating costs), or the *general* form::

    aggregates: {a: "out0[1,1]", b: "out0[2,1] + 0.5*x0[2,1,1,1]"}
    quad: {"a*a": 2.5, "a*b": 1.0}
    lin: {a: 2.0}
    const: 0.0

Aggregate references: ``x0[i,n,j,m]``, ``x1[j,m,s]``, ``x2[j,s,t,k]`` (single
flows) and the sums ``out0[i,n]``, ``in0[j,m]``, ``out1[j,m]``, ``in1[j,s]``,
``out2[j,s]``.  Inside a wildcard entry an axis letter may stand in for the
value of the key being filled, e.g. ``out0[i,n]``.
"""
from __future__ import annotations

import copy
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable

import numpy as np
import yaml

from .indexing import IndexMap, Topology, build_index_map
from .model import (DEFAULT_THRESHOLD, Aggregate, MarketFunction, NetworkModel, PolicyScheme,
                    QuadraticCost, owner_output, producer_input, producer_output,
                    supplier_input, supplier_output, validate)
from .solver import SolverConfig

BUNDLED_DIR = Path(__file__).parent / "scenarios"
BUNDLED = ("example_1_1", "example_1_2", "example_1_3", "example_1_4", "example_1_5",
           "example_2_benchmark", "example_2_policy")

REPORTS = ("equilibrium", "prices", "welfare", "diagnostics", "trace")

# table name -> (model attribute, axes, natural argument of the simple form)
COST_TABLES = {
    "owner_op_cost": ("owner_op", ("i", "n"), "out0[i,n]"),
    "owner_txn_cost": ("owner_txn", ("i", "n", "j", "m"), "x0[i,n,j,m]"),
    "producer_op_cost": ("producer_op", ("j", "m"), "in0[j,m]"),
    "producer_txn_cost": ("producer_txn", ("j", "m", "s"), "x1[j,m,s]"),
    "supplier_op_cost": ("supplier_op", ("j", "s"), "in1[j,s]"),
    "supplier_txn_cost": ("supplier_txn", ("j", "s", "t", "k"), "x2[j,s,t,k]"),
    "market_txn_cost": ("market_txn", ("j", "s", "t", "k"), "x2[j,s,t,k]"),
}

REF_AXES = {
    "x0": ("i", "n", "j", "m"), "x1": ("j", "m", "s"), "x2": ("j", "s", "t", "k"),
    "out0": ("i", "n"), "in0": ("j", "m"), "out1": ("j", "m"), "in1": ("j", "s"),
    "out2": ("j", "s"),
}


class ConfigError(ValueError):
    """Malformed or invalid scenario file.  ``where`` names the offending key."""

    def __init__(self, where: str, msg: str):
        self.where = where
        super().__init__(f"{where}: {msg}" if where else msg)


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "out"
    reports: tuple[str, ...] = REPORTS


@dataclass
class ScenarioConfig:
    model: NetworkModel
    solver: SolverConfig
    outputs: OutputSpec
    flow_eps: float = 1e-3
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def name(self) -> str:
        return self.model.name


# --- index keys --------------------------------------------------------------

def _parse_key(key: str, axes: tuple[str, ...], where: str) -> dict[str, int]:
    key = str(key).strip()
    if key == "*":
        return {}
    spec = {}
    for part in key.split(","):
        m = re.fullmatch(r"\s*([a-z])\s*=\s*(\d+)\s*", part)
        if not m:
            raise ConfigError(where, f"bad index key {key!r} (expected e.g. 'i=1,n=2')")
        axis, value = m.group(1), int(m.group(2))
        if axis not in axes:
            raise ConfigError(where, f"axis {axis!r} not in {','.join(axes)}")
        if axis in spec:
            raise ConfigError(where, f"axis {axis!r} repeated in {key!r}")
        if value < 1:
            raise ConfigError(where, f"indices are 1-based, got {axis}={value}")
        spec[axis] = value - 1
    return spec


def format_key(axes: Iterable[str], idx: Iterable[int]) -> str:
    return ",".join(f"{a}={v + 1}" for a, v in zip(axes, idx))


def _resolve(entries: dict | None, axes: tuple[str, ...], keys: Iterable[tuple[int, ...]],
             where: str) -> dict[tuple[int, ...], tuple[Any, str]]:
    """Assign each index tuple the most specific matching entry."""
    entries = entries or {}
    if not isinstance(entries, dict):
        raise ConfigError(where, "expected a mapping of index keys")
    specs = [(_parse_key(k, axes, where), k, v) for k, v in entries.items()]
    keys = list(keys)
    out = {}
    used = set()
    for idx in keys:
        coords = dict(zip(axes, idx))
        best = None
        for spec, raw_key, value in specs:
            if all(coords[a] == v for a, v in spec.items()):
                if best is None or len(spec) > len(best[0]):
                    best = (spec, raw_key, value)
                elif len(spec) == len(best[0]):
                    raise ConfigError(where, f"keys {best[1]!r} and {raw_key!r} both match "
                                             f"{format_key(axes, idx)}")
        if best is not None:
            out[idx] = (best[2], best[1])
            used.add(best[1])
    for _, raw_key, _ in specs:
        if raw_key not in used and not any(
                all(dict(zip(axes, idx))[a] == v for a, v in _parse_key(raw_key, axes, where).items())
                for idx in keys):
            raise ConfigError(where, f"key {raw_key!r} matches no index in the topology")
    return out


def _check_keys(obj: dict, allowed: Iterable[str], where: str, required: Iterable[str] = ()):
    if not isinstance(obj, dict):
        raise ConfigError(where, "expected a mapping")
    allowed = set(allowed)
    for k in obj:
        if k not in allowed:
            raise ConfigError(where, f"unknown key {k!r} (allowed: {', '.join(sorted(allowed))})")
    for k in required:
        if k not in obj:
            raise ConfigError(where, f"missing required key {k!r}")


def _num(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        try:
            return float(value)  # YAML reads "1e6" without a dot as a string
        except (TypeError, ValueError):
            raise ConfigError(where, f"expected a number, got {value!r}") from None
    return float(value)


# --- aggregate references ----------------------------------------------------

_TERM = re.compile(r"^\s*(?:([0-9.eE+-]+)\s*\*\s*)?([a-z]+[0-9]?)\[([^\]]*)\]\s*$")


def _ref_vars(imap: IndexMap, ref: str, idx: tuple[int, ...], where: str) -> list[int]:
    topo = imap.topology
    try:
        if ref == "x0":
            return [imap.pos("q0", idx)]
        if ref == "x1":
            return [imap.pos("q1", idx)]
        if ref == "x2":
            return [imap.pos("q2", idx)]
        if ref == "out0":
            return owner_output(imap, *idx)
        if ref == "in0":
            return producer_input(imap, *idx)
        if ref == "out1":
            return producer_output(imap, *idx)
        if ref == "in1":
            return supplier_input(imap, *idx)
        if ref == "out2":
            return supplier_output(imap, *idx)
    except (KeyError, IndexError):
        raise ConfigError(where, f"{ref}[{format_key(REF_AXES[ref], idx)}] is outside the "
                                 f"topology (I={topo.I})") from None
    raise ConfigError(where, f"unknown reference {ref!r}")


def parse_aggregate(expr: str, imap: IndexMap, bound: dict[str, int], where: str) -> Aggregate:
    """Parse ``"2*x0[1,1,1,1] + out0[i,n] - x1[1,1,2]"`` into an :class:`Aggregate`."""
    text = str(expr).replace("-", "+-").replace("e+-", "e-").replace("E+-", "E-")
    terms: list[tuple[int, float]] = []
    for chunk in text.split("+"):
        if not chunk.strip():
            continue
        sign = 1.0
        chunk = chunk.strip()
        if chunk.startswith("-"):
            sign, chunk = -1.0, chunk[1:]
        m = _TERM.match(chunk)
        if not m:
            raise ConfigError(where, f"cannot parse aggregate term {chunk!r}")
        coef = sign * (float(m.group(1)) if m.group(1) else 1.0)
        ref = m.group(2)
        if ref not in REF_AXES:
            raise ConfigError(where, f"unknown reference {ref!r}")
        parts = [p.strip() for p in m.group(3).split(",")]
        if len(parts) != len(REF_AXES[ref]):
            raise ConfigError(where, f"{ref} takes {len(REF_AXES[ref])} indices")
        idx = []
        for p in parts:
            if p.isdigit():
                if int(p) < 1:
                    raise ConfigError(where, "indices are 1-based")
                idx.append(int(p) - 1)
            elif p in bound:
                idx.append(bound[p])
            else:
                raise ConfigError(where, f"index {p!r} is neither a number nor a bound axis")
        terms.extend((v, coef) for v in _ref_vars(imap, ref, tuple(idx), where))
    if not terms:
        raise ConfigError(where, "empty aggregate")
    return Aggregate(tuple(terms))


def parse_cost(entry: dict, imap: IndexMap, natural: str, bound: dict[str, int],
               where: str) -> QuadraticCost:
    if entry is None or entry == 0:
        return QuadraticCost()
    if not isinstance(entry, dict):
        raise ConfigError(where, "cost entry must be a mapping")
    if "aggregates" in entry:
        _check_keys(entry, ("aggregates", "quad", "lin", "const"), where)
        names = entry["aggregates"]
        if not isinstance(names, dict) or not names:
            raise ConfigError(where, "aggregates must be a nonempty mapping name -> expression")
        order = list(names)
        aggs = tuple(parse_aggregate(names[a], imap, bound, f"{where}.aggregates.{a}")
                     for a in order)
        P = len(order)
        quad = [[0.0] * P for _ in range(P)]
        for pair, c in (entry.get("quad") or {}).items():
            bits = str(pair).replace(" ", "").split("*")
            if len(bits) != 2 or any(b not in order for b in bits):
                raise ConfigError(f"{where}.quad", f"bad product {pair!r}")
            p, q = sorted(order.index(b) for b in bits)
            quad[p][q] += _num(c, f"{where}.quad.{pair}")
        lin = [0.0] * P
        for a, c in (entry.get("lin") or {}).items():
            if a not in order:
                raise ConfigError(f"{where}.lin", f"unknown aggregate {a!r}")
            lin[order.index(a)] = _num(c, f"{where}.lin.{a}")
        const = _num(entry.get("const", 0.0), f"{where}.const")
        cost = QuadraticCost(aggs, tuple(map(tuple, quad)), tuple(lin), const)
    else:
        _check_keys(entry, ("quad", "lin", "const"), where)
        agg = parse_aggregate(natural, imap, bound, where)
        cost = QuadraticCost((agg,), ((_num(entry.get("quad", 0.0), f"{where}.quad"),),),
                             (_num(entry.get("lin", 0.0), f"{where}.lin"),),
                             _num(entry.get("const", 0.0), f"{where}.const"))
    return QuadraticCost() if cost.is_zero else cost


# --- whole scenarios ---------------------------------------------------------

TOP_KEYS = ("name", "description", "topology", "costs", "policies", "capacity", "conversion",
            "weights", "markets", "solver", "outputs", "analysis")


def _parse_topology(raw) -> Topology:
    where = "topology"
    _check_keys(raw, ("I", "N", "M", "S", "T", "K", "G"), where, ("I", "N", "M", "S", "T", "K"))
    I = raw["I"]

    def per(name):
        v = raw[name]
        if isinstance(v, int):
            return (v,) * I
        if not isinstance(v, list) or not all(isinstance(x, int) for x in v):
            raise ConfigError(f"{where}.{name}", "expected an integer or list of integers")
        return tuple(v)

    for name in ("I", "K", "G"):
        if name in raw and (isinstance(raw[name], bool) or not isinstance(raw[name], int)):
            raise ConfigError(f"{where}.{name}", "expected an integer")
    topo = Topology(I, per("N"), per("M"), per("S"), per("T"), raw["K"], raw.get("G", 0))
    problems = topo.problems()
    if problems:
        raise ConfigError(where, "; ".join(problems))
    return topo


def _parse_policy(entry, G: int, where: str) -> PolicyScheme:
    if entry is None:
        return PolicyScheme.none(G)
    _check_keys(entry, ("base_rate", "base_lump", "brackets"), where)
    if "brackets" in entry:
        br = entry["brackets"]
        if not isinstance(br, list):
            raise ConfigError(f"{where}.brackets", "expected a list of [threshold, rate]")
        brackets = []
        for b, item in enumerate(br):
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise ConfigError(f"{where}.brackets.{b}", "expected [threshold, rate]")
            brackets.append((_num(item[0], f"{where}.brackets.{b}"),
                             _num(item[1], f"{where}.brackets.{b}")))
    else:
        brackets = list(PolicyScheme.none(G).brackets)
    return PolicyScheme(_num(entry.get("base_rate", 0.0), f"{where}.base_rate"),
                        _num(entry.get("base_lump", 0.0), f"{where}.base_lump"),
                        tuple(brackets))


def build_model(raw: dict) -> NetworkModel:
    """Build a model from a parsed scenario tree (no validation of invariants)."""
    _check_keys(raw, TOP_KEYS, "", ("topology", "markets"))
    topo = _parse_topology(raw["topology"])
    imap = build_index_map(topo)

    costs_raw = raw.get("costs") or {}
    _check_keys(costs_raw, COST_TABLES, "costs")
    tables = {}
    key_sets = {
        "owner_op_cost": topo.owners, "owner_txn_cost": topo.owner_links,
        "producer_op_cost": topo.producers, "producer_txn_cost": topo.producer_links,
        "supplier_op_cost": topo.suppliers, "supplier_txn_cost": topo.market_links,
        "market_txn_cost": topo.market_links,
    }
    for tname, (attr, axes, natural) in COST_TABLES.items():
        keys = list(key_sets[tname]())
        where = f"costs.{tname}"
        chosen = _resolve(costs_raw.get(tname), axes, keys, where)
        table = {}
        for idx in keys:
            if idx in chosen:
                entry, raw_key = chosen[idx]
                table[idx] = parse_cost(entry, imap, natural, dict(zip(axes, idx)),
                                        f"{where}[{raw_key}]")
            else:
                table[idx] = QuadraticCost()
        tables[attr] = table

    pol_raw = raw.get("policies") or {}
    _check_keys(pol_raw, ("owner", "producer"), "policies")
    policies = {}
    for side, axis in (("owner", "i"), ("producer", "j")):
        chosen = _resolve(pol_raw.get(side), (axis,), [(r,) for r in range(topo.I)],
                          f"policies.{side}")
        policies[side] = tuple(
            _parse_policy(chosen[(r,)][0] if (r,) in chosen else None, topo.G,
                          f"policies.{side}[{axis}={r + 1}]")
            for r in range(topo.I))

    cap = _resolve(_scalar_table(raw.get("capacity", {"*": DEFAULT_THRESHOLD}), "capacity"),
                   ("i",), [(i,) for i in range(topo.I)], "capacity")
    capacity = tuple(_num(cap[(i,)][0], f"capacity[i={i + 1}]") if (i,) in cap
                     else DEFAULT_THRESHOLD for i in range(topo.I))

    conv = _resolve(_scalar_table(raw.get("conversion", {"*": 1.0}), "conversion"),
                    ("i", "n", "j", "m"), topo.owner_links(), "conversion")
    conversion = {k: _num(v[0], f"conversion[{v[1]}]") for k, v in conv.items()}

    wkeys = [(j, t, s) for j in range(topo.I) for t in range(topo.T[j]) for s in range(topo.S[j])]
    wres = _resolve(_scalar_table(raw.get("weights", {"*": 1.0}), "weights"),
                    ("j", "t", "s"), wkeys, "weights")
    weights = tuple(
        tuple(tuple(_num(wres[(j, t, s)][0], "weights") if (j, t, s) in wres else 0.0
                    for s in range(topo.S[j])) for t in range(topo.T[j]))
        for j in range(topo.I))

    mres = _resolve(raw["markets"], ("j", "k"),
                    [(j, k) for j in range(topo.I) for k in range(topo.K)], "markets")
    markets = {}
    for key, (entry, raw_key) in mres.items():
        where = f"markets[{raw_key}]"
        _check_keys(entry, ("intercept", "slope"), where, ("intercept", "slope"))
        markets[key] = MarketFunction(_num(entry["intercept"], where), _num(entry["slope"], where))

    return NetworkModel(
        topo, tables["owner_op"], tables["owner_txn"], tables["producer_op"],
        tables["producer_txn"], tables["supplier_op"], tables["supplier_txn"],
        tables["market_txn"], policies["owner"], policies["producer"], capacity, conversion,
        weights, markets, name=str(raw.get("name", "")))


def _scalar_table(value, where: str) -> dict:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return {"*": value}
    if isinstance(value, str):
        return {"*": _num(value, where)}
    return value


def parse_solver(raw: dict | None) -> SolverConfig:
    raw = raw or {}
    where = "solver"
    _check_keys(raw, ("phi", "eps", "max_iters", "initial", "trace_every", "explosion",
                      "safety", "seed"), where)
    phi = raw.get("phi", 0.01)
    if phi != "auto":
        phi = _num(phi, f"{where}.phi")
    initial = raw.get("initial", "ones")
    if initial == "ones":
        initial = None
    elif initial != "random":
        initial = _num(initial, f"{where}.initial")
    cfg = SolverConfig(phi=phi, eps=_num(raw.get("eps", 1e-4), f"{where}.eps"),
                       max_iters=int(raw.get("max_iters", 1_000_000)), initial=initial,
                       trace_every=int(raw.get("trace_every", 0)),
                       explosion=_num(raw.get("explosion", 1e12), f"{where}.explosion"),
                       safety=_num(raw.get("safety", 0.9), f"{where}.safety"),
                       seed=int(raw.get("seed", 0)))
    problems = cfg.problems()
    if problems:
        raise ConfigError(where, "; ".join(problems))
    return cfg


def parse_scenario(raw: dict) -> ScenarioConfig:
    """Parse and validate a scenario tree.  Raises :class:`ConfigError`."""
    if not isinstance(raw, dict):
        raise ConfigError("", "scenario must be a mapping")
    model = build_model(raw)
    problems = validate(model)
    if problems:
        raise ConfigError("validation", "; ".join(problems))
    solver = parse_solver(raw.get("solver"))
    out_raw = raw.get("outputs") or {}
    _check_keys(out_raw, ("directory", "reports"), "outputs")
    reports = tuple(out_raw.get("reports", REPORTS))
    for r in reports:
        if r not in REPORTS:
            raise ConfigError("outputs.reports", f"unknown report {r!r}")
    an = raw.get("analysis") or {}
    _check_keys(an, ("flow_eps",), "analysis")
    return ScenarioConfig(model, solver, OutputSpec(str(out_raw.get("directory", "out")), reports),
                          flow_eps=_num(an.get("flow_eps", 1e-3), "analysis.flow_eps"),
                          raw=copy.deepcopy(raw))


def load_raw(path: str | Path) -> dict:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = f"line {mark.line + 1}" if mark else str(path)
        raise ConfigError(line, f"YAML parse error: {getattr(exc, 'problem', exc)}") from None
    if not isinstance(data, dict):
        raise ConfigError(str(path), "scenario file must contain a mapping")
    return data


def bundled_path(name: str) -> Path:
    return BUNDLED_DIR / f"{name}.yaml"


def load_scenario(path_or_name: str | Path) -> ScenarioConfig:
    """Load a scenario file, or a bundled scenario by name (e.g. ``example_1_1``)."""
    p = Path(path_or_name)
    if not p.exists() and str(path_or_name) in BUNDLED:
        p = bundled_path(str(path_or_name))
    return parse_scenario(load_raw(p))


# --- serialization -----------------------------------------------------------

def _agg_expr(agg: Aggregate, imap: IndexMap) -> str:
    topo = imap.topology
    vars_ = [v for v, _ in agg.terms]
    if all(c == 1.0 for _, c in agg.terms):
        named = []
        for i, n in topo.owners():
            named.append(("out0", (i, n), owner_output(imap, i, n)))
        for j, m in topo.producers():
            named.append(("in0", (j, m), producer_input(imap, j, m)))
            named.append(("out1", (j, m), producer_output(imap, j, m)))
        for j, s in topo.suppliers():
            named.append(("in1", (j, s), supplier_input(imap, j, s)))
            named.append(("out2", (j, s), supplier_output(imap, j, s)))
        for ref, idx, vs in named:
            if vs == vars_ and len(vs) > 1:
                return f"{ref}[{','.join(str(x + 1) for x in idx)}]"
    parts = []
    for v, c in agg.terms:
        block, idx = imap.label(v)
        ref = {"q0": "x0", "q1": "x1", "q2": "x2"}[block]
        name = f"{ref}[{','.join(str(x + 1) for x in idx)}]"
        parts.append(name if c == 1.0 else f"{c!r}*{name}")
    return " + ".join(parts).replace("+ -", "- ")


def cost_to_dict(cost: QuadraticCost, imap: IndexMap) -> dict:
    names = [f"a{p + 1}" for p in range(len(cost.aggregates))]
    quad = {f"{names[p]}*{names[q]}": cost.quad[p][q]
            for p in range(len(names)) for q in range(p, len(names)) if cost.quad[p][q]}
    lin = {names[p]: cost.lin[p] for p in range(len(names)) if cost.lin[p]}
    out: dict[str, Any] = {"aggregates": {a: _agg_expr(g, imap)
                                          for a, g in zip(names, cost.aggregates)}}
    if quad:
        out["quad"] = quad
    if lin:
        out["lin"] = lin
    if cost.const:
        out["const"] = cost.const
    return out


def model_to_dict(model: NetworkModel) -> dict:
    """Serialize a model to an explicit scenario tree (every entry spelled out)."""
    topo, imap = model.topology, model.index_map
    out: dict[str, Any] = {"name": model.name} if model.name else {}
    out["topology"] = {"I": topo.I, "N": list(topo.N), "M": list(topo.M), "S": list(topo.S),
                       "T": list(topo.T), "K": topo.K, "G": topo.G}
    costs = {}
    for tname, (attr, axes, _) in COST_TABLES.items():
        table = getattr(model, attr)
        entries = {format_key(axes, k): cost_to_dict(c, imap)
                   for k, c in table.items() if not c.is_zero}
        if entries:
            costs[tname] = entries
    out["costs"] = costs
    out["policies"] = {
        side: {f"{axis}={r + 1}": {"base_rate": p.base_rate, "base_lump": p.base_lump,
                                   "brackets": [list(b) for b in p.brackets]}
               for r, p in enumerate(pols)}
        for side, axis, pols in (("owner", "i", model.owner_policies),
                                 ("producer", "j", model.producer_policies))}
    out["capacity"] = {f"i={i + 1}": u for i, u in enumerate(model.capacity)}
    out["conversion"] = {format_key("injm", k): v for k, v in model.conversion.items()}
    out["weights"] = {format_key("jts", (j, t, s)): model.weights[j][t][s]
                      for j in range(topo.I) for t in range(topo.T[j]) for s in range(topo.S[j])}
    out["markets"] = {format_key("jk", k): {"intercept": mk.intercept, "slope": mk.slope}
                      for k, mk in model.markets.items()}
    return out


def solver_to_dict(cfg: SolverConfig) -> dict:
    init = cfg.initial
    if init is None:
        init = "ones"
    elif not isinstance(init, str):
        init = float(init)
    return {"phi": cfg.phi, "eps": cfg.eps, "max_iters": cfg.max_iters, "initial": init,
            "trace_every": cfg.trace_every, "explosion": cfg.explosion,
            "safety": cfg.safety, "seed": cfg.seed}


def scenario_to_dict(sc: ScenarioConfig) -> dict:
    out = model_to_dict(sc.model)
    out["solver"] = solver_to_dict(sc.solver)
    out["outputs"] = {"directory": sc.outputs.directory, "reports": list(sc.outputs.reports)}
    out["analysis"] = {"flow_eps": sc.flow_eps}
    return out


def dump_scenario(sc: ScenarioConfig | dict, path: str | Path) -> None:
    data = scenario_to_dict(sc) if isinstance(sc, ScenarioConfig) else sc
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        yaml.safe_dump(data, fh, sort_keys=False, default_flow_style=None, width=100)


# --- parameter paths (sweeps) ------------------------------------------------

def _split_path(path: str) -> list[str]:
    return [p for p in path.split(".") if p]


def get_param(raw: dict, path: str) -> float:
    node: Any = raw
    for seg in _split_path(path):
        if isinstance(node, dict) and seg in node:
            node = node[seg]
        elif isinstance(node, list) and seg.isdigit() and int(seg) < len(node):
            node = node[int(seg)]
        else:
            raise ConfigError(path, f"segment {seg!r} does not resolve")
    if isinstance(node, bool) or not isinstance(node, (int, float, str)):
        raise ConfigError(path, "target is not a scalar")
    return _num(node, path)


def set_param(raw: dict, path: str, value: float) -> dict:
    """Copy of ``raw`` with the scalar at ``path`` replaced."""
    get_param(raw, path)
    new = copy.deepcopy(raw)
    segs = _split_path(path)
    node: Any = new
    for seg in segs[:-1]:
        node = node[int(seg)] if isinstance(node, list) else node[seg]
    last = segs[-1]
    if isinstance(node, list):
        node[int(last)] = value
    else:
        node[last] = value
    return new


@dataclass(frozen=True)
class SweepSpec:
    target: str
    grid: tuple[float, ...]

    @classmethod
    def parse(cls, target: str, grid: str | Iterable[float]) -> "SweepSpec":
        """``grid`` is ``"a,b,c"`` or ``"lo:hi:steps"`` (inclusive, ``steps`` points)."""
        if isinstance(grid, str):
            text = grid.strip()
            if ":" in text:
                bits = text.split(":")
                if len(bits) != 3:
                    raise ConfigError("--grid", "range form is lo:hi:steps")
                lo, hi, steps = float(bits[0]), float(bits[1]), int(bits[2])
                if steps < 1:
                    raise ConfigError("--grid", "steps must be >= 1")
                values = tuple(np.linspace(lo, hi, steps).tolist()) if steps > 1 else (lo,)
            else:
                values = tuple(float(x) for x in text.split(",") if x.strip())
        else:
            values = tuple(float(x) for x in grid)
        if not values:
            raise ConfigError("--grid", "grid is empty")
        return cls(target, values)

    def check(self, raw: dict) -> None:
        get_param(raw, self.target)


def with_overrides(sc: ScenarioConfig, **solver_fields) -> ScenarioConfig:
    fields = {k: v for k, v in solver_fields.items() if v is not None}
    return replace(sc, solver=replace(sc.solver, **fields)) if fields else sc
