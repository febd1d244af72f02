"""Batch command line: ``cantor-nest <command> [options]``.

Every command writes one JSON report (``--out``, stdout when omitted) and,
where a table makes sense, one CSV (``--csv``). Options may also come from a
JSON file given with ``--config``; explicit flags win over the file, and the
file wins over built-in defaults.

Exit codes: 0 success or certified-positive, 1 usage or input error,
2 uncertifiable analysis request, 3 indeterminate, 4 certified violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import jsonschema

from . import combinatorics as comb
from . import io
from .constructions import (
    ConstructionError,
    RandomSeed,
    dio_gapset,
    dio_lower_bound,
    dio_q0_for_margin,
    flagship_K,
    random_kp,
    registry,
)
from .intervals import Interval, format_rational, parse_rational
from .model import (
    Budget,
    BudgetExceeded,
    DigitCantorSpec,
    GapCantor,
    UncertifiableError,
    ck_upper_bound,
    dimension,
    scale_set,
)
from .nesting import (
    CERTIFIED_POSITIVE,
    CERTIFIED_VIOLATION,
    SCHEMA,
    SORTED_GAP,
    cp_partial_sum,
    estimate_P,
    geometric_grid,
    lambda_scan,
    nesting_report,
    x_inner_outer,
)
from .rounding import DEFAULT_PRECISION

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNCERTIFIABLE = 2
EXIT_INDETERMINATE = 3
EXIT_VIOLATION = 4

COMMANDS = ("build", "analyze", "nest", "scan", "dio", "comb", "random-ce")


@dataclass
class RunConfig:
    """Everything a run depends on; a run is reproducible from this alone."""

    command: str = ""
    out: Optional[str] = None
    csv: Optional[str] = None
    seed: int = 0
    precision: int = DEFAULT_PRECISION
    depth: int = 6
    gaps: Optional[int] = None
    levels: Optional[int] = None
    # build
    name: Optional[str] = None
    params: Dict[str, Any] = field(default_factory=dict)
    # analyze / nest / scan
    set: Optional[str] = None
    k: Optional[str] = None
    ktilde: Optional[str] = None
    p_estimate: bool = False
    p_method: str = SORTED_GAP
    cp: List[str] = field(default_factory=list)
    ck: bool = False
    dim: bool = False
    lam: Optional[str] = None
    grid_first: str = "1/2"
    grid_ratio: str = "1/2"
    grid_count: int = 12
    # dio
    d: int = 8
    s: str = "1/5"
    M: str = "1"
    margin: str = "1/100"
    q_max: int = 40
    # comb
    max_k: int = 14
    n_max: int = 12
    comb_M: int = 3
    delta: str = "1/3"
    sweep_n: int = 0
    sweep_r: int = 0
    # random-ce
    p: str = "4/5"
    i0: int = 2
    i_max: List[int] = field(default_factory=lambda: [2, 3, 4])
    seeds: int = 20

    def budget(self) -> Budget:
        return Budget(level=self.levels, count=self.gaps)


class CliError(Exception):
    pass


# ------------------------------------------------------------------ parsing


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with option values")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--csv", help="CSV table path")
    p.add_argument("--seed", type=int)
    p.add_argument("--precision", type=int, help="dyadic rounding exponent")
    p.add_argument("--depth", type=int, help="cover depth for K")
    p.add_argument("--gaps", type=int, help="gap budget (count)")
    p.add_argument("--levels", type=int, help="gap budget (levels)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cantor-nest", description="Nesting of Cantor sets: exact oracles and bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="instantiate a registered construction")
    _common(p)
    p.add_argument("name", nargs="?")
    p.add_argument("--params", help="JSON object of construction parameters")
    p.add_argument("--list", action="store_true", help="list registered constructions")

    p = sub.add_parser("analyze", help="gap exponent, (C_p) sums, C_K and dimension of a set file")
    _common(p)
    p.add_argument("set", nargs="?")
    p.add_argument("--p-estimate", action="store_true", default=None)
    p.add_argument("--p-method", choices=("sorted-gap", "class-ratio"))
    p.add_argument("--cp", action="append", help="exponent p for a (C_p) partial sum; repeatable")
    p.add_argument("--ck", action="store_true", default=None)
    p.add_argument("--dim", action="store_true", default=None)

    p = sub.add_parser("nest", help="bound and inner/outer oracle for K inside K~")
    _common(p)
    p.add_argument("k", nargs="?")
    p.add_argument("ktilde", nargs="?")
    p.add_argument("--lam", help="scale K by this factor first")

    p = sub.add_parser("scan", help="bound over a geometric grid of scales of K")
    _common(p)
    p.add_argument("k", nargs="?")
    p.add_argument("ktilde", nargs="?")
    p.add_argument("--grid-first")
    p.add_argument("--grid-ratio")
    p.add_argument("--grid-count", type=int)

    p = sub.add_parser("dio", help="Diophantine lower bound sweep and a truncated oracle")
    _common(p)
    p.add_argument("--k", help="set file for K (default: base-16 digits {0, 8} scaled by 2^-6)")
    p.add_argument("--d", type=int)
    p.add_argument("--s")
    p.add_argument("--M")
    p.add_argument("--margin")
    p.add_argument("--q-max", type=int)

    p = sub.add_parser("comb", help="sequence counts and the counting inequalities")
    _common(p)
    p.add_argument("--max-k", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--comb-M", type=int, dest="comb_M")
    p.add_argument("--delta")
    p.add_argument("--sweep-n", type=int, help="run the binomial sweep up to this N")
    p.add_argument("--sweep-r", type=int, help="run the composition sweep up to this R")

    p = sub.add_parser("random-ce", help="seeded trend study of random decimal gap sets")
    _common(p)
    p.add_argument("--k", help="set file for K (default: base-16 digits {0, 8} scaled by 2^-6)")
    p.add_argument("--p")
    p.add_argument("--i0", type=int)
    p.add_argument("--i-max", type=int, action="append")
    p.add_argument("--seeds", type=int)
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    """Merge defaults, the ``--config`` file and explicit flags, in that order."""
    cfg = RunConfig(command=ns.command)
    known = {f.name for f in fields(RunConfig)}
    if getattr(ns, "config", None):
        data = io.read_json(ns.config)
        if not isinstance(data, dict):
            raise CliError("config file must hold a JSON object")
        unknown = set(data) - known
        if unknown:
            raise CliError(f"unknown config keys: {', '.join(sorted(unknown))}")
        for key, value in data.items():
            if key != "command":
                setattr(cfg, key, value)
    for key, value in vars(ns).items():
        if key in ("config", "command") or value is None:
            continue
        if key == "params":
            try:
                value = json.loads(value)
            except json.JSONDecodeError as exc:
                raise CliError(f"--params is not valid JSON: {exc}") from None
        if key in known:
            setattr(cfg, key, value)
    return cfg


# ------------------------------------------------------------------ helpers


def _emit(cfg: RunConfig, report: dict) -> None:
    report = {"schema": SCHEMA, "command": cfg.command, "config": _config_json(cfg), **report}
    if cfg.out:
        io.write_json(cfg.out, report)
    else:
        sys.stdout.write(io.dumps(report))


def _config_json(cfg: RunConfig) -> dict:
    return {k: v for k, v in asdict(cfg).items() if k not in ("out", "csv")}


def _q(x: Optional[Fraction]) -> Optional[str]:
    return None if x is None else format_rational(x)


def _load_set(path: Optional[str], what: str):
    if not path:
        raise CliError(f"missing {what} set file")
    try:
        return io.read_set(path)
    except OSError as exc:
        raise CliError(f"cannot read {what} file {path}: {exc}") from None


def _load_k(path: Optional[str]):
    return flagship_K(6) if path is None else _load_set(path, "K")


def _union_rows(label: str, u) -> List[list]:
    if u is None:
        return []
    return [[label, format_rational(p.lo), format_rational(p.hi), p.lo_closed, p.hi_closed] for p in u]


# ----------------------------------------------------------------- commands


def cmd_build(cfg: RunConfig) -> int:
    if not cfg.name:
        rows = {n: {"role": c.role, "schema": c.schema} for n, c in sorted(registry.REGISTRY.items())}
        sys.stdout.write(io.dumps(rows))
        return EXIT_OK
    construction = registry.get(cfg.name)
    params = dict(cfg.params)
    if cfg.name == "random_kp" and "seed" not in params:
        params["seed"] = cfg.seed
    obj = construction.build(params)
    doc = io.set_to_json(obj, gap_budget=cfg.budget(), construction=cfg.name, params=params)
    if cfg.out:
        io.write_json(cfg.out, doc)
    else:
        sys.stdout.write(io.dumps(doc))
    return EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    obj = _load_set(cfg.set, "input")
    budget = cfg.budget()
    report: Dict[str, Any] = {"set": cfg.set}
    code = EXIT_OK
    if isinstance(obj, GapCantor):
        hist = obj.length_histogram(budget)
        report["gap_count"] = sum(hist.values())
        report["gap_length_sum"] = format_rational(sum((l * c for l, c in hist.items()), Fraction(0)))
        if cfg.p_estimate:
            report["p_estimate"] = estimate_P(obj, budget, method=cfg.p_method).to_json()
        if cfg.cp:
            report["cp"] = [cp_partial_sum(obj, parse_rational(p), budget, cfg.precision).to_json() for p in cfg.cp]
    elif cfg.p_estimate or cfg.cp:
        report["p_estimate"] = None
        report["notes"] = ["gap statistics need a gap-set file"]
    if cfg.ck or cfg.dim:
        if isinstance(obj, DigitCantorSpec):
            if cfg.dim:
                dim = dimension(obj, cfg.precision)
                report["dimension"] = [format_rational(dim.lo), format_rational(dim.hi)]
            if cfg.ck:
                cert = ck_upper_bound(obj, precision=cfg.precision)
                report["ck"] = {"lower": format_rational(cert.ck_lower), "upper": format_rational(cert.ck_upper),
                                "upper_float": float(cert.ck_upper)}
        else:
            report["uncertifiable"] = "box fuzzy measure and dimension are certified only for self-similar digit sets"
            code = EXIT_UNCERTIFIABLE
    _emit(cfg, report)
    return code


def _verdict_code(verdict: str) -> int:
    if verdict == CERTIFIED_POSITIVE:
        return EXIT_OK
    if verdict == CERTIFIED_VIOLATION:
        return EXIT_VIOLATION
    return EXIT_INDETERMINATE


def cmd_nest(cfg: RunConfig) -> int:
    K = _load_set(cfg.k, "K")
    gc = _load_set(cfg.ktilde, "K~")
    if not isinstance(gc, GapCantor):
        raise CliError("K~ must be a gap-set file")
    if cfg.lam is not None:
        K = scale_set(K, parse_rational(cfg.lam))
    rep = nesting_report(K, gc, cfg.depth, cfg.budget(), precision=cfg.precision)
    _emit(cfg, {"report": rep.to_json()})
    if cfg.csv:
        io.write_csv(cfg.csv, ["set", "lo", "hi", "lo_closed", "hi_closed"],
                     _union_rows("x_inner", rep.x_inner) + _union_rows("x_outer", rep.x_outer))
    return _verdict_code(rep.verdict)


def cmd_scan(cfg: RunConfig) -> int:
    K = _load_set(cfg.k, "K")
    gc = _load_set(cfg.ktilde, "K~")
    if not isinstance(K, DigitCantorSpec):
        raise CliError("scan needs a digit-set file for K")
    grid = geometric_grid(parse_rational(cfg.grid_first), parse_rational(cfg.grid_ratio), cfg.grid_count)
    result = lambda_scan(K, gc, grid, cfg.budget(), precision=cfg.precision)
    rows = [r.to_json() for r in result.rows]
    _emit(cfg, {"rows": rows, "largest_positive": _q(result.largest_positive)})
    if cfg.csv:
        io.write_csv(cfg.csv, ["lambda", "theo1_bound", "theo1_bound_upper"],
                     [[r.lam, r.theo1_bound, r.theo1_bound_upper] for r in result.rows])
    return EXIT_OK


def cmd_dio(cfg: RunConfig) -> int:
    K = _load_k(cfg.k)
    M, s, margin = parse_rational(cfg.M), parse_rational(cfg.s), parse_rational(cfg.margin)
    ck = ck_upper_bound(K, precision=cfg.precision).ck_upper
    q0 = dio_q0_for_margin(M, ck, s, cfg.d, margin, cfg.precision)
    sweep = [(q, dio_lower_bound(M, ck, s, cfg.d, q, cfg.precision)) for q in range(2, max(q0, 2) + 3)]
    report: Dict[str, Any] = {
        "ck_upper": format_rational(ck),
        "q0": q0,
        "sweep": [{"q0": q, "lower_bound": format_rational(b), "lower_bound_float": float(b)} for q, b in sweep],
        "increasing": all(a < b for (_, a), (_, b) in zip(sweep, sweep[1:])),
    }
    if cfg.q_max >= q0:
        gc = dio_gapset(cfg.d, q0, cfg.q_max, Interval.closed(-M, M))
        o = x_inner_outer(K, gc, cfg.depth, cfg.budget())
        report["oracle"] = {"q_max": cfg.q_max, "gaps_used": o.gaps_used,
                            "measure_inner": _q(o.measure_inner), "measure_outer": _q(o.measure_outer),
                            "measure_inner_float": float(o.measure_inner), "x_inner_nonempty": bool(o.x_inner)}
    _emit(cfg, report)
    if cfg.csv:
        io.write_csv(cfg.csv, ["q0", "lower_bound"], sweep)
    return EXIT_OK


def cmd_comb(cfg: RunConfig) -> int:
    table = comb.count_ck(cfg.max_k)
    delta = parse_rational(cfg.delta)
    cards = []
    for N in range(1, cfg.n_max + 1):
        e = comb.card_E(N, cfg.comb_M, delta, cfg.precision)
        cards.append({"N": N, "card": e.card, "bound_lower": format_rational(e.bound[0]), "holds": e.holds})
    report: Dict[str, Any] = {
        "ck": [{"k": k, "C_k": c} for k, c in table.rows()],
        "ck_below_2k": table.below_power_of_two,
        "card_E": cards,
    }
    if cfg.sweep_n:
        sweep = comb.binom_sweep(cfg.sweep_n, precision=cfg.precision)
        report["binom_sweep"] = {"checks": len(sweep), "violations": sum(not c.holds for _, c in sweep)}
    if cfg.sweep_r:
        sweep = comb.composition_sweep(cfg.sweep_r, precision=cfg.precision)
        report["composition_sweep"] = {"checks": len(sweep),
                                       "violations": sum(not (a.holds and b.holds) for _, (a, b) in sweep)}
    _emit(cfg, report)
    if cfg.csv:
        io.write_csv(cfg.csv, ["k", "C_k", "two_to_k"], [(k, c, 2 ** k) for k, c in table.rows()])
    return EXIT_OK


def cmd_random_ce(cfg: RunConfig) -> int:
    K = _load_k(cfg.k)
    p = parse_rational(cfg.p)
    rows = []
    means = []
    for i1 in cfg.i_max:
        total = Fraction(0)
        for seed in range(cfg.seed, cfg.seed + cfg.seeds):
            gc = random_kp(p, (cfg.i0, i1), RandomSeed(seed))
            m = x_inner_outer(K, gc, cfg.depth).measure_outer
            rows.append((i1, seed, m))
            total += m
        means.append(total / cfg.seeds)
    report = {
        "means": [{"i_max": i1, "mean_outer": format_rational(m), "mean_outer_float": float(m)}
                  for i1, m in zip(cfg.i_max, means)],
        "non_increasing": all(b <= a for a, b in zip(means, means[1:])),
    }
    _emit(cfg, report)
    if cfg.csv:
        io.write_csv(cfg.csv, ["i_max", "seed", "measure_outer"], rows)
    return EXIT_OK


HANDLERS = {
    "build": cmd_build,
    "analyze": cmd_analyze,
    "nest": cmd_nest,
    "scan": cmd_scan,
    "dio": cmd_dio,
    "comb": cmd_comb,
    "random-ce": cmd_random_ce,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = resolve_config(ns)
        if ns.command == "build" and getattr(ns, "list", False):
            cfg.name = None
        return HANDLERS[cfg.command](cfg)
    except (CliError, jsonschema.ValidationError, ConstructionError, BudgetExceeded, UncertifiableError, ValueError, KeyError) as exc:
        msg = exc.message if isinstance(exc, jsonschema.ValidationError) else exc
        if isinstance(exc, KeyError) and exc.args:
            msg = exc.args[0]
        print(f"cantor-nest {ns.command}: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
