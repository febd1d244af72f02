"""Set-exchange JSON, report JSON and CSV, all written atomically.

A set file looks like ``{"kind": "gap" | "digit" | "finite" | "cover",
"ambient": [...], "gaps": [[lo, hi, lo_closed, hi_closed], ...], "meta": {...}}``
with every number as a ``"num/den"`` string. Files produced from a registered
construction also record its name and parameters, so reading them back
recovers closed-form tails and length histograms that a finite gap list
cannot carry.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from collections import Counter
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

from .intervals import Interval, IntervalUnion, format_rational, parse_rational
from .model import Budget, CoverApprox, DigitCantorSpec, FiniteK, GapCantor, take_gaps

PathLike = Union[str, os.PathLike]
SET_SCHEMA = "cantor-nest-set/1"


class SetFormatError(ValueError):
    pass


# ------------------------------------------------------------ atomic writes


def atomic_write_text(path: PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=1, separators=(",", ": ")) + "\n"


def write_json(path: PathLike, obj: Any) -> None:
    atomic_write_text(path, dumps(obj))


def read_json(path: PathLike) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_rational(v) if isinstance(v, Fraction) else v for v in row])
    atomic_write_text(path, buf.getvalue())


# ------------------------------------------------------------- set exchange


def _histogram_rows(hist: Counter) -> list:
    return [[format_rational(l), c] for l, c in sorted(hist.items(), reverse=True)]


def set_to_json(obj, gap_budget: Budget = Budget(), construction: Optional[str] = None, params: Optional[dict] = None) -> dict:
    """Set-exchange form of a gap set, digit set, finite union or cover."""
    meta: dict = {}
    if construction is not None:
        meta["construction"] = construction
        meta["params"] = params or {}
    if isinstance(obj, GapCantor):
        taken, complete = take_gaps(obj, gap_budget)
        meta.update({k: v for k, v in obj.meta.items() if k not in ("construction",)})
        if construction is None and "construction" in obj.meta:
            meta["construction_label"] = obj.meta["construction"]
        out = {
            "kind": "gap",
            "ambient": obj.ambient.to_json(),
            "gaps": [g.to_json() for _, g in taken],
            "gap_levels": [lvl for lvl, _ in taken],
            "gaps_complete": complete,
            "has_tail": obj.tail is not None,
            "meta": meta,
        }
        if obj.histogram_source is not None:
            out["length_histogram"] = _histogram_rows(obj.histogram_source())
        return {"schema": SET_SCHEMA, **out}
    if isinstance(obj, DigitCantorSpec):
        out = obj.to_json()
        out["meta"] = meta
        return {"schema": SET_SCHEMA, **out}
    if isinstance(obj, FiniteK):
        return {"schema": SET_SCHEMA, "kind": "finite", "ambient": obj.hull.to_json(), "parts": obj.union.to_json(), "meta": meta}
    if isinstance(obj, CoverApprox):
        hull = obj.cover.hull()
        return {
            "schema": SET_SCHEMA,
            "kind": "cover",
            "ambient": None if hull is None else hull.to_json(),
            "depth": obj.depth,
            "parts": obj.cover.to_json(),
            "meta": meta,
        }
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def set_from_json(doc: dict):
    """Inverse of :func:`set_to_json`.

    Files naming a registered construction are rebuilt from their parameters
    and checked against the stored gap prefix.
    """
    kind = doc.get("kind")
    meta = doc.get("meta") or {}
    if kind == "gap":
        name = meta.get("construction")
        stored = [Interval.from_json(r) for r in doc.get("gaps", [])]
        if name is not None:
            from .constructions import registry

            rebuilt = registry.build(name, meta.get("params", {}))
            prefix = [g for _, g in take_gaps(rebuilt, Budget(count=len(stored)))[0]]
            if prefix != stored:
                raise SetFormatError(f"stored gaps disagree with construction {name!r}")
            return rebuilt
        levels: dict = {}
        for lvl, g in zip(doc.get("gap_levels", [1] * len(stored)), stored):
            levels.setdefault(int(lvl), []).append(g)
        ordered = [levels.get(k, []) for k in range(1, max(levels, default=0) + 1)]
        gc = GapCantor.from_levels(Interval.from_json(doc["ambient"]), ordered, meta)
        hist_rows = doc.get("length_histogram")
        if hist_rows is not None and doc.get("gaps_complete") is False:
            hist = Counter({parse_rational(l): int(c) for l, c in hist_rows})
            gc = GapCantor(gc.ambient, gc.level_source, gc.meta, None, lambda: Counter(hist))
        return gc
    if kind == "digit":
        return DigitCantorSpec(
            int(doc["base"]),
            tuple(int(d) for d in doc["digits"]),
            parse_rational(doc.get("translate", "0")),
            parse_rational(doc.get("scale", "1")),
        )
    if kind in ("finite", "cover"):
        return FiniteK(IntervalUnion.from_json(doc["parts"]))
    raise SetFormatError(f"unknown set kind {kind!r}")


def write_set(path: PathLike, obj, **kwargs) -> dict:
    doc = set_to_json(obj, **kwargs)
    write_json(path, doc)
    return doc


def read_set(path: PathLike):
    return set_from_json(read_json(path))
