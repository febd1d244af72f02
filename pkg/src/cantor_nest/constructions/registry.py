"""Named constructions with JSON parameter schemas, for instantiation by name."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Dict

import jsonschema

from ..intervals import Interval, IntervalUnion, parse_rational
from ..model import FiniteK, digit_cantor
from . import chebyshev, decimal, gallery

RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^-?\d+(/\d+)?$"},
    ]
}
INTERVAL_PAIR = {"type": "array", "items": RATIONAL, "minItems": 2, "maxItems": 2}


@dataclass(frozen=True)
class Construction:
    name: str
    role: str  # "gap" builds a K-tilde, "k" builds a K, "cover" an outer cover
    schema: dict
    factory: Callable[..., Any]
    deterministic: bool = True

    def validate(self, params: dict) -> None:
        jsonschema.validate(params, self.schema)

    def build(self, params: dict):
        self.validate(params)
        return self.factory(**params)


def _obj(props: dict, required=None, **extra) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": list(props) if required is None else required,
        "additionalProperties": False,
        **extra,
    }


def _interval(pair) -> Interval:
    return Interval.closed(parse_rational(pair[0]), parse_rational(pair[1]))


def _middle_gap(s, levels):
    return gallery.middle_gap(parse_rational(s), levels)


def _counterexample(p, n_start, i_max):
    return decimal.counterexample_kp(parse_rational(p), n_start, i_max)


def _random(p, i_range, seed, stream=(), resolution=53):
    return decimal.random_kp(parse_rational(p), tuple(i_range), decimal.RandomSeed(seed, tuple(stream)), resolution)


def _pesin_k2(s, N, sum_budget):
    return chebyshev.pesin_k2(parse_rational(s), N, sum_budget)


def _pesin_k3(M, delta, sum_budget):
    return chebyshev.pesin_k3(M, parse_rational(delta), sum_budget)


def _dio(d, q0, q_max, range):  # noqa: A002 - matches the JSON key
    return gallery.dio_gapset(d, q0, q_max, _interval(range))


def _digit(base, digits, translate="0", scale="1"):
    return digit_cantor(base, digits, parse_rational(translate), parse_rational(scale))


def _finite(parts):
    return FiniteK(IntervalUnion.of(_interval(p) for p in parts))


def _cf(k, depth):
    return gallery.cf_cantor(k, depth)


REGISTRY: Dict[str, Construction] = {}


def register(c: Construction) -> Construction:
    REGISTRY[c.name] = c
    return c


register(Construction("middle_gap", "gap", _obj({"s": RATIONAL, "levels": {"type": "integer", "minimum": 0}}), _middle_gap))
register(Construction(
    "counterexample_kp", "gap",
    _obj({"p": RATIONAL, "n_start": {"type": "integer", "minimum": 1}, "i_max": {"type": "integer"}}),
    _counterexample,
))
register(Construction(
    "random_kp", "gap",
    _obj(
        {
            "p": RATIONAL,
            "i_range": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
            "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
            "stream": {"type": "array", "items": {"type": "integer"}},
            "resolution": {"type": "integer", "minimum": 1},
        },
        required=["p", "i_range", "seed"],
    ),
    _random,
))
register(Construction(
    "pesin_k2", "gap",
    _obj({"s": RATIONAL, "N": {"type": "integer", "minimum": 2}, "sum_budget": {"type": "integer", "minimum": 0}}),
    _pesin_k2,
))
register(Construction(
    "pesin_k3", "gap",
    _obj({"M": {"type": "integer", "minimum": 3}, "delta": RATIONAL, "sum_budget": {"type": "integer", "minimum": 0}}),
    _pesin_k3,
))
register(Construction(
    "dio_gapset", "gap",
    _obj({
        "d": {"type": "integer", "minimum": 2},
        "q0": {"type": "integer", "minimum": 2},
        "q_max": {"type": "integer"},
        "range": INTERVAL_PAIR,
    }),
    _dio,
))
register(Construction(
    "digit_cantor", "k",
    _obj(
        {
            "base": {"type": "integer", "minimum": 2},
            "digits": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
            "translate": RATIONAL,
            "scale": RATIONAL,
        },
        required=["base", "digits"],
    ),
    _digit,
))
register(Construction("even_digit_K", "k", _obj({}), lambda: gallery.even_digit_K()))
register(Construction("flagship_K", "k", _obj({"m": {"type": "integer", "minimum": 0}}, required=[]), lambda m=6: gallery.flagship_K(m)))
register(Construction("finite", "k", _obj({"parts": {"type": "array", "items": INTERVAL_PAIR}}), _finite))
register(Construction(
    "cf_cantor", "cover",
    _obj({"k": {"type": "integer", "minimum": 1}, "depth": {"type": "integer", "minimum": 0}}),
    _cf,
))

# random_kp is deterministic given its seed, but flag it so callers know a seed is part of the identity
REGISTRY["random_kp"] = Construction(
    "random_kp", "gap", REGISTRY["random_kp"].schema, _random, deterministic=False
)


def get(name: str) -> Construction:
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown construction {name!r}; known: {', '.join(sorted(REGISTRY))}") from None


def build(name: str, params: dict):
    return get(name).build(params)
