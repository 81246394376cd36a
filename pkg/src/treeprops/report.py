"""Pass/fail verdicts with a re-checkable counterexample."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


def _jsonable(obj: Any) -> Any:
    # nodes are tuples; render them as int lists
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, tuple) else _key(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_jsonable(x) for x in items]
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if hasattr(obj, "value") and hasattr(obj, "name"):
        return obj.value
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return str(obj)


def _key(t: tuple) -> str:
    if all(isinstance(s, int) for s in t):
        return "e" if not t else "".join(map(str, t)) if all(s < 10 for s in t) else str(list(t))
    return str(t)


@dataclass
class CheckReport:
    passed: bool
    clause: str | None = None
    counterexample: Any = None
    stats: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    @classmethod
    def ok(cls, **stats) -> "CheckReport":
        return cls(True, stats=stats)

    @classmethod
    def fail(cls, clause: str, counterexample: Any = None, **stats) -> "CheckReport":
        return cls(False, clause, counterexample, stats)

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "clause": self.clause,
            "counterexample": _jsonable(self.counterexample),
            "stats": _jsonable(self.stats),
        }

    def __str__(self):
        if self.passed:
            return "pass"
        return f"fail [{self.clause}]: {_jsonable(self.counterexample)}"
