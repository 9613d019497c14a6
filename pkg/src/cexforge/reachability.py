"""Unbounded reachability probabilities and property verdicts.

Solver: Gauss-Seidel over the unknown states, processed one SCC block at a
time in reverse topological order (acyclic parts solve exactly in a single
sweep; cyclic blocks iterate with a geometric-extrapolation stopping rule).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graphs import backward_reachable, predecessor_lists, strongly_connected_components
from .model import Comparison, Dtmc, ReachabilityProperty, target_states

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 1_000_000


@dataclass
class ProbVector:
    values: list[float]
    residual: float
    iterations: int


class SolverError(RuntimeError):
    """Non-convergence within the iteration budget; carries the best iterate."""

    def __init__(self, message: str, best: ProbVector):
        super().__init__(message)
        self.best = best


def compute_prob01(model: Dtmc, targets: Iterable[int]) -> tuple[frozenset[int], frozenset[int]]:
    """Qualitative precomputation.

    prob0: states that cannot reach the targets at all.
    prob1: states that reach the targets with probability exactly 1 (for a
    DTMC these are the states that cannot reach prob0 once targets are made
    absorbing).
    """
    target_set = frozenset(targets)
    if not target_set:
        raise ValueError("targets must be non-empty")
    preds = predecessor_lists(model.num_states, model.rows)
    can_reach = backward_reachable(target_set, preds)
    prob0 = frozenset(range(model.num_states)) - can_reach
    bad = backward_reachable(prob0, preds, blocked=target_set) if prob0 else set()
    prob1 = frozenset(range(model.num_states)) - frozenset(bad)
    return prob0, prob1


def solve_reachability(
    model: Dtmc,
    targets: Iterable[int],
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    warm_start: Sequence[float] | None = None,
) -> ProbVector:
    """Solve x = P·x with x=1 on prob1 and x=0 on prob0, to residual <= tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    prob0, prob1 = compute_prob01(model, targets)
    n = model.num_states
    rows = model.rows
    x = [0.0] * n
    for s in prob1:
        x[s] = 1.0
    unknown = [s for s in range(n) if s not in prob0 and s not in prob1]
    if warm_start is not None:
        for s in unknown:
            x[s] = min(1.0, max(0.0, warm_start[s]))
    if not unknown:
        return ProbVector(x, 0.0, 0)

    unknown_set = set(unknown)
    blocks = strongly_connected_components(
        unknown, lambda v: (t for t, _p in rows[v] if t in unknown_set)
    )

    sweeps = 0

    def gs_pass(states: Sequence[int]) -> float:
        delta = 0.0
        for s in states:
            self_p = 0.0
            acc = 0.0
            for t, p in rows[s]:
                if t == s:
                    self_p = p
                else:
                    acc += p * x[t]
            new = acc / (1.0 - self_p) if self_p < 1.0 else 0.0
            d = abs(new - x[s])
            if d > delta:
                delta = d
            x[s] = new
        return delta

    # Successors-first order: each block sees converged downstream values.
    for block in blocks:
        if len(block) == 1:
            gs_pass(block)
            sweeps += 1
            continue
        prev_delta = math.inf
        while True:
            delta = gs_pass(block)
            sweeps += 1
            if delta == 0.0:
                break
            ratio = min(delta / prev_delta if prev_delta > 0 else 0.5, 0.9999)
            # a-posteriori geometric bound on the remaining error
            if delta <= tol and delta * ratio / (1.0 - ratio) <= 0.5 * tol:
                break
            prev_delta = delta
            if sweeps >= max_iter:
                best = ProbVector(list(x), _residual(rows, unknown, x), sweeps)
                raise SolverError(
                    f"no convergence after {sweeps} sweeps (residual {best.residual:.3e})", best
                )

    residual = _residual(rows, unknown, x)
    while residual > tol:
        gs_pass(unknown)
        sweeps += 1
        residual = _residual(rows, unknown, x)
        if sweeps >= max_iter:
            best = ProbVector(list(x), residual, sweeps)
            raise SolverError(
                f"no convergence after {sweeps} sweeps (residual {residual:.3e})", best
            )
    return ProbVector(x, residual, sweeps)


def _residual(rows, unknown: Sequence[int], x: Sequence[float]) -> float:
    worst = 0.0
    for s in unknown:
        acc = 0.0
        for t, p in rows[s]:
            acc += p * x[t]
        r = abs(x[s] - acc)
        if r > worst:
            worst = r
    return worst


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    prob: float

    @property
    def violated(self) -> bool:
        return not self.holds


def violates(prob: float, prop: ReachabilityProperty) -> bool:
    """Strict bounds are violated at equality; non-strict are not."""
    if prop.comparison is Comparison.LESS_EQ:
        return prob > prop.threshold
    return prob >= prop.threshold


def check_property(
    model: Dtmc,
    prop: ReachabilityProperty,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> CheckResult:
    targets = target_states(model, prop)
    if not targets:
        return CheckResult(holds=not violates(0.0, prop), prob=0.0)
    result = solve_reachability(model, targets, tol=tol, max_iter=max_iter)
    prob = result.values[model.initial]
    return CheckResult(holds=not violates(prob, prop), prob=prob)
