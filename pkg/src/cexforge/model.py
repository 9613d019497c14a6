"""Immutable DTMC model, labelings, and reachability properties."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

ROW_SUM_TOL = 1e-9

Transition = tuple[int, float]


class LabelNotFoundError(KeyError):
    """Raised when a property refers to a label the model does not declare."""


class Comparison(str, enum.Enum):
    LESS_EQ = "le"
    LESS = "lt"

    def symbol(self) -> str:
        return "<=" if self is Comparison.LESS_EQ else "<"


@dataclass(frozen=True)
class ReachabilityProperty:
    """Upper-bounded reachability query: P <comparison> threshold (eventually target_label)."""

    comparison: Comparison
    threshold: float
    target_label: str

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")

    def __str__(self) -> str:
        return f'P{self.comparison.symbol()}{self.threshold} [ F "{self.target_label}" ]'


class Dtmc:
    """Sparse row-stochastic transition system.

    Immutable after construction: rows are tuples sorted by target index,
    labels map names to frozen state sets.  Construction normalizes the
    representation but does not validate stochasticity; `validate_dtmc`
    reports violations without aborting.
    """

    __slots__ = ("num_states", "initial", "rows", "labels")

    def __init__(
        self,
        num_states: int,
        rows: Iterable[Iterable[Transition]],
        initial: int = 0,
        labels: Mapping[str, Iterable[int]] | None = None,
    ):
        object.__setattr__(self, "num_states", int(num_states))
        object.__setattr__(
            self, "rows", tuple(tuple(sorted((int(t), float(p)) for t, p in row)) for row in rows)
        )
        object.__setattr__(self, "initial", int(initial))
        object.__setattr__(
            self,
            "labels",
            {name: frozenset(int(s) for s in states) for name, states in (labels or {}).items()},
        )
        if len(self.rows) != self.num_states:
            raise ValueError(f"expected {self.num_states} rows, got {len(self.rows)}")
        if not 0 <= self.initial < max(self.num_states, 1):
            raise ValueError(f"initial state {self.initial} out of range")

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("Dtmc is immutable")

    @property
    def num_transitions(self) -> int:
        return sum(len(row) for row in self.rows)

    def labels_of(self, state: int) -> frozenset[str]:
        return frozenset(name for name, states in self.labels.items() if state in states)

    def with_labels(self, labels: Mapping[str, Iterable[int]]) -> "Dtmc":
        return Dtmc(self.num_states, self.rows, self.initial, labels)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Dtmc)
            and self.num_states == other.num_states
            and self.initial == other.initial
            and self.rows == other.rows
            and self.labels == other.labels
        )

    def __hash__(self):
        return hash((self.num_states, self.initial, self.rows))

    def __repr__(self) -> str:
        return (
            f"Dtmc(states={self.num_states}, transitions={self.num_transitions}, "
            f"initial={self.initial}, labels={sorted(self.labels)})"
        )


def validate_dtmc(model: Dtmc) -> list[str]:
    """Check all model invariants; returns one message per violation (empty iff valid)."""
    violations: list[str] = []
    for s, row in enumerate(model.rows):
        seen: set[int] = set()
        total = 0.0
        for t, p in row:
            if not 0 <= t < model.num_states:
                violations.append(f"row {s}: target {t} out of range [0, {model.num_states})")
            if t in seen:
                violations.append(f"row {s}: duplicate transition to {t}")
            seen.add(t)
            if p <= 0.0:
                violations.append(f"row {s}: non-positive probability {p!r} to {t}")
            total += p
        if abs(total - 1.0) > ROW_SUM_TOL:
            violations.append(f"row {s} sums to {total!r}")
    if not 0 <= model.initial < model.num_states:
        violations.append(f"initial state {model.initial} out of range")
    for name, states in model.labels.items():
        for st in states:
            if not 0 <= st < model.num_states:
                violations.append(f"label {name!r}: state {st} out of range")
    return violations


def successors(model: Dtmc, s: int) -> Sequence[Transition]:
    """Positive-probability transitions of row s, sorted by target index."""
    if not 0 <= s < model.num_states:
        raise ValueError(f"state {s} out of range [0, {model.num_states})")
    return model.rows[s]


def target_states(model: Dtmc, prop: ReachabilityProperty) -> frozenset[int]:
    if prop.target_label not in model.labels:
        raise LabelNotFoundError(prop.target_label)
    return model.labels[prop.target_label]
