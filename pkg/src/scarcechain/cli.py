"""Command-line front end: solve, sweep, compare, diagnose, validate."""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence


from . import reports
from .analysis import WelfareReport, detect_shortages, retrieve_prices, welfare
from .assembly import FEvaluator
from .config import (BUNDLED, ConfigError, ScenarioConfig, SweepSpec, get_param, load_scenario,
                     parse_scenario, set_param, with_overrides)
from .diagnostics import classify
from .model import ModelError
from .solver import SolveOutcome, estimate_lipschitz, solve

log = logging.getLogger("scarcechain")

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_BAD_INPUT = 2


@dataclass
class RunResult:
    scenario: ScenarioConfig
    outcome: SolveOutcome
    welfare: WelfareReport


def run_scenario(sc: ScenarioConfig, out_dir: Optional[Path] = None,
                 baseline: Optional[WelfareReport] = None) -> RunResult:
    """Solve one scenario and, if ``out_dir`` is given, write its reports there."""
    ev = FEvaluator(sc.model)
    outcome = solve(ev, sc.solver)
    prices = retrieve_prices(sc.model, outcome.X, sc.flow_eps)
    rep = welfare(sc.model, outcome.X, prices, baseline)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        wanted = set(sc.outputs.reports)
        if "equilibrium" in wanted:
            reports.write_equilibrium(out_dir / "equilibrium.csv", sc.model, outcome.X)
        if "prices" in wanted:
            reports.write_prices(out_dir / "prices.csv", sc.model, outcome.X, prices)
        if "welfare" in wanted:
            reports.write_welfare(out_dir / "welfare.csv", rep)
        if "diagnostics" in wanted:
            text = reports.diagnostics_text(sc.model, ev, outcome, classify(ev),
                                            estimate_lipschitz(ev), sc.flow_eps)
            reports.write_diagnostics(out_dir / "diagnostics.txt", text)
        if "trace" in wanted:
            reports.write_trace(out_dir / "trace.csv", outcome)
    return RunResult(sc, outcome, rep)


def _load(ref: str, args) -> ScenarioConfig:
    sc = load_scenario(ref)
    phi = getattr(args, "phi", None)
    if phi is not None and phi != "auto":
        phi = float(phi)
    return with_overrides(sc, phi=phi, eps=getattr(args, "eps", None),
                          max_iters=getattr(args, "max_iters", None),
                          trace_every=getattr(args, "trace_every", None))


def _out_dir(args, sc: ScenarioConfig) -> Path:
    return Path(args.out) if args.out else Path(sc.outputs.directory) / (sc.name or "scenario")


def _summary(res: RunResult) -> str:
    o, w = res.outcome, res.welfare
    return (f"{res.scenario.name}: {o.status} in {o.iterations} iterations "
            f"(gap {o.final_gap:.3g}, residual {o.residual:.3g}); SW {w.sw:.2f}, "
            f"net incentive {w.net_incentive:.2f}")


def cmd_solve(args) -> int:
    sc = _load(args.config, args)
    out = _out_dir(args, sc)
    res = run_scenario(sc, out)
    print(_summary(res))
    print(f"reports written to {out}")
    return EXIT_OK if res.outcome.converged else EXIT_NOT_CONVERGED


def _sweep_point(payload) -> tuple:
    """Solve one grid point; failures are reported in the row, never raised."""
    point, raw, target, value, overrides, base_sw = payload
    try:
        sc = with_overrides(parse_scenario(set_param(raw, target, value)), **overrides)
        res = run_scenario(sc)
    except (ConfigError, ModelError, ValueError) as exc:
        return (point, target, reports.fmt(value), "error", "", *[""] * 9, str(exc))
    w, o = res.welfare, res.outcome
    delta = None if base_sw is None else w.sw - base_sw
    bc = None if delta is None or w.net_incentive == 0 else delta / w.net_incentive
    severed, _ = detect_shortages(sc.model, o.X, sc.flow_eps)
    return (point, target, reports.fmt(value), o.status, o.iterations,
            reports.fmt(w.owner_total), reports.fmt(w.producer_total),
            reports.fmt(w.supplier_total), reports.fmt(w.cs_total), reports.fmt(w.sw),
            reports.fmt(w.net_incentive), reports.fmt(delta), reports.fmt(bc), len(severed), "")


def run_sweep(raw: dict, spec: SweepSpec, overrides: dict, jobs: int = 1,
              baseline_sw: Optional[float] = None) -> list[tuple]:
    """One row per grid point, in grid order regardless of completion order."""
    get_param(raw, spec.target)
    payloads = [(p, raw, spec.target, v, overrides, baseline_sw) for p, v in enumerate(spec.grid)]
    if jobs <= 1:
        return [_sweep_point(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_point, payloads))


def _solver_overrides(args) -> dict:
    phi = args.phi if args.phi in (None, "auto") else float(args.phi)
    fields = {"phi": phi, "eps": args.eps, "max_iters": args.max_iters}
    return {k: v for k, v in fields.items() if v is not None}


def cmd_sweep(args) -> int:
    sc = _load(args.config, args)
    spec = SweepSpec.parse(args.target, args.grid)
    base_sw = None
    if args.baseline:
        base = run_scenario(_load(args.baseline, args))
        if not base.outcome.converged:
            print(f"baseline did not converge: {base.outcome.status}", file=sys.stderr)
            return EXIT_NOT_CONVERGED
        base_sw = base.welfare.sw
    rows = run_sweep(sc.raw, spec, _solver_overrides(args), args.jobs, base_sw)
    out = _out_dir(args, sc)
    out.mkdir(parents=True, exist_ok=True)
    reports.write_sweep(out / "sweep.csv", rows)
    for r in rows:
        print(f"{spec.target}={r[2]}: {r[3]}" + (f" SW {float(r[9]):.2f}" if r[9] else ""))
    print(f"sweep written to {out / 'sweep.csv'}")
    return EXIT_OK if all(r[3] == "converged" for r in rows) else EXIT_NOT_CONVERGED


def compare_runs(base: ScenarioConfig, policy: ScenarioConfig) -> tuple[RunResult, RunResult]:
    b = run_scenario(base)
    p = run_scenario(policy, baseline=b.welfare)
    return b, p


def cmd_compare(args) -> int:
    base, policy = _load(args.baseline, args), _load(args.policy, args)
    b, p = compare_runs(base, policy)
    out = Path(args.out) if args.out else Path(base.outputs.directory) / "compare"
    out.mkdir(parents=True, exist_ok=True)
    reports.write_compare(out / "compare.csv", b.welfare, p.welfare)
    print(_summary(b))
    print(_summary(p))
    bc = p.welfare.benefit_cost
    print(f"delta SW {p.welfare.delta_sw:.2f}; benefit-cost "
          f"{'n/a' if bc is None else f'{bc:.2f}'}")
    print(f"comparison written to {out / 'compare.csv'}")
    ok = b.outcome.converged and p.outcome.converged
    return EXIT_OK if ok else EXIT_NOT_CONVERGED


def cmd_diagnose(args) -> int:
    sc = _load(args.config, args)
    ev = FEvaluator(sc.model)
    L = estimate_lipschitz(ev)
    verdict = classify(ev)
    lines = [f"scenario: {sc.name}", f"variables: {ev.size}",
             f"lipschitz_estimate: {L:.6g}", f"suggested_phi: {0.9 / L:.6g}" if L else
             "suggested_phi: unbounded", *verdict.lines()]
    text = "\n".join(lines) + "\n"
    print(text, end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        reports.write_diagnostics(out / "diagnostics.txt", text)
    return EXIT_OK


def cmd_validate(args) -> int:
    sc = load_scenario(args.config)
    print(f"{sc.name or args.config}: ok ({sc.model.index_map.size} variables)")
    return EXIT_OK


def cmd_list(args) -> int:
    for name in BUNDLED:
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scarcechain",
        description="Multi-tier scarce-resource supply chain equilibrium solver")
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def solver_flags(p):
        p.add_argument("--phi", help="step size, or 'auto' for 0.9/L")
        p.add_argument("--eps", type=float, help="stopping tolerance on the iterate change")
        p.add_argument("--max-iters", type=int, dest="max_iters")
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("solve", help="solve one scenario and write reports")
    p.add_argument("config", help="scenario YAML path or bundled name")
    solver_flags(p)
    p.add_argument("--trace-every", type=int, dest="trace_every",
                   help="record the iterate gap every N iterations")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="re-solve over a grid of one parameter")
    p.add_argument("config")
    p.add_argument("--target", required=True, help="dotted path, e.g. capacity.i=1")
    p.add_argument("--grid", required=True, help="'a,b,c' or 'lo:hi:steps'")
    p.add_argument("--baseline", help="scenario used for delta SW and benefit-cost")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    solver_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="baseline vs policy scenario")
    p.add_argument("baseline")
    p.add_argument("policy")
    solver_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("diagnose", help="Jacobian monotonicity and step-size check")
    p.add_argument("config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("validate", help="parse and validate a scenario")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("list", help="list bundled scenarios")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
