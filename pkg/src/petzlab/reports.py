from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class CheckReport:
    """Outcome of evaluating one inequality ``lhs >= rhs`` on one instance.

    ``gap = lhs - rhs`` and the check passes iff ``gap >= -tol``. An infinite
    left side makes the inequality trivially true; such passes are flagged
    ``vacuous`` and carry a ``reason``.
    """

    suite: str
    lhs: float
    rhs: float
    gap: float
    passed: bool
    tol: float
    vacuous: bool = False
    reason: str = ""
    instance: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def make(cls, suite: str, lhs: float, rhs: float, tol: float, *, reason: str = "",
             instance: dict | None = None, seed: int | None = None, extra: dict | None = None) -> "CheckReport":
        lhs = float(lhs)
        rhs = float(rhs)
        vacuous = False
        if lhs == math.inf:
            vacuous = True
            reason = reason or "support"
            gap = math.inf
        elif rhs == -math.inf:
            vacuous = True
            reason = reason or "support"
            gap = math.inf
        else:
            gap = lhs - rhs
        if math.isnan(gap):
            passed = False
            reason = reason or "nan"
        else:
            passed = gap >= -tol
        return cls(suite, lhs, rhs, gap, bool(passed), float(tol), vacuous, reason,
                   dict(instance or {}), seed, dict(extra or {}))
