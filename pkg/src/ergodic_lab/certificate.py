"""Outcome records for theorem checks and their deterministic JSON form."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

PASS = "pass"
FAIL = "fail"
UNCONVERGED = "unconverged"
UNKNOWN = "unknown"


def jsonable(x: Any) -> Any:
    """Rationals become "p/q" strings, infinities "inf"; containers recurse."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    raise TypeError(f"cannot serialize {type(x).__name__}")


def canonical_dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical_dumps(obj).encode()).hexdigest()[:16]


@dataclass
class Certificate:
    experiment: str
    verdict: str
    inputs: dict = field(default_factory=dict)
    measured: dict = field(default_factory=dict)
    bound: Any = None
    tolerance: Any = "exact"
    seed: int | None = None

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment,
            "verdict": self.verdict,
            "inputs": jsonable(self.inputs),
            "input_digest": digest(self.inputs),
            "measured": jsonable(self.measured),
            "bound": jsonable(self.bound),
            "tolerance": jsonable(self.tolerance),
            "seed": self.seed,
        }

    def to_line(self) -> str:
        return canonical_dumps(self.to_json())


def verdict_of(ok: bool) -> str:
    return PASS if ok else FAIL


def combine_verdicts(verdicts) -> str:
    verdicts = list(verdicts)
    if FAIL in verdicts:
        return FAIL
    if UNCONVERGED in verdicts:
        return UNCONVERGED
    if UNKNOWN in verdicts:
        return UNKNOWN
    return PASS
