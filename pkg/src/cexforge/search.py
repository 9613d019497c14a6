"""Subsystem-growing heuristics: global most-probable-path enumeration and
Dijkstra-based local fragment search, both on negative-log edge weights."""
from __future__ import annotations

import enum
import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .model import ReachabilityProperty, target_states
from . import reachability
from .scc import Vertex, View, vertex_state
from .subsystem import Subsystem, probability

PROB_FLOOR = 1e-300


def _walk_key(walk: Sequence[Vertex]) -> tuple[int, ...]:
    return tuple(vertex_state(v) for v in walk)


def _alive_vertices(view: View, targets: frozenset[Vertex]) -> set[Vertex]:
    """Vertices from which some target is reachable in the view."""
    preds: dict[Vertex, list[Vertex]] = {v: [] for v in view.vertices}
    for v, row in view.adj.items():
        for t, _p in row:
            preds[t].append(v)
    seen = set(targets)
    frontier = list(seen)
    while frontier:
        u = frontier.pop()
        for p in preds[u]:
            if p not in seen:
                seen.add(p)
                frontier.append(p)
    return seen


def enumerate_paths(
    view: View, source: Vertex, targets: Iterable[Vertex]
) -> Iterator[tuple[tuple[Vertex, ...], float]]:
    """Walks from source to the targets in nonincreasing probability order.

    Best-first expansion over -ln weights; ties broken by the lexicographic
    order of the walk's underlying state indices.  Walks stop at the first
    target hit; revisits are allowed, so the stream can be infinite.
    """
    target_set = frozenset(targets)
    alive = _alive_vertices(view, target_set)
    if source not in alive:
        return
    heap: list[tuple[float, tuple[int, ...], tuple[Vertex, ...], float]] = [
        (0.0, _walk_key((source,)), (source,), 1.0)
    ]
    while heap:
        nll, key, walk, prob = heapq.heappop(heap)
        last = walk[-1]
        if last in target_set:
            yield walk, prob
            continue
        for t, p in view.adj[last]:
            if t not in alive:
                continue
            nxt_prob = prob * p
            if nxt_prob < PROB_FLOOR:
                continue
            heapq.heappush(
                heap, (nll - math.log(p), key + (vertex_state(t),), walk + (t,), nxt_prob)
            )


@dataclass(frozen=True)
class Fragment:
    """A connecting detour: both ends inside the subsystem, interior outside."""

    vertices: tuple[Vertex, ...]
    probability: float


def best_fragment(
    view: View, subsystem: Subsystem, targets: Iterable[Vertex] = ()
) -> Fragment | None:
    """Most probable fragment leaving and re-entering the subsystem.

    Dijkstra from a virtual source fanning out of every subsystem vertex,
    restricted to outside vertices; deterministic tie-breaking by the
    lexicographic state sequence of the path.  A fragment may also end at a
    target vertex that is not yet a subsystem member (otherwise probability
    mass flowing to further target states would be unreachable).
    """
    inside = subsystem.vertices
    if not inside:
        raise ValueError("subsystem is empty")
    outside_targets = frozenset(targets) - inside
    # dist[v] = (nll, path key); parent reconstructs the walk
    dist: dict[Vertex, tuple[float, tuple[int, ...]]] = {}
    parent: dict[Vertex, Vertex] = {}
    heap: list[tuple[float, tuple[int, ...], Vertex]] = []
    best: tuple[float, tuple[int, ...], Vertex, Vertex | None] | None = None

    def offer_end(w: float, key: tuple[int, ...], mid: Vertex, end: Vertex | None) -> None:
        nonlocal best
        if best is None or (w, key) < (best[0], best[1]):
            best = (w, key, mid, end)

    for u in sorted(inside, key=vertex_state):
        base_key = (vertex_state(u),)
        for t, p in view.adj[u]:
            if t in inside:
                continue
            cand = (-math.log(p), base_key + (vertex_state(t),))
            if t not in dist or cand < dist[t]:
                dist[t] = cand
                parent[t] = u
                heapq.heappush(heap, (cand[0], cand[1], t))
    done: set[Vertex] = set()
    while heap:
        d, key, v = heapq.heappop(heap)
        if v in done or (d, key) != dist[v]:
            continue
        done.add(v)
        if v in outside_targets:
            offer_end(d, key, v, None)
            continue
        for t, p in view.adj[v]:
            w = d - math.log(p)
            if t in inside:
                offer_end(w, key + (vertex_state(t),), v, t)
            else:
                cand = (w, key + (vertex_state(t),))
                if t not in dist or cand < dist[t]:
                    dist[t] = cand
                    parent[t] = v
                    heapq.heappush(heap, (cand[0], cand[1], t))
    if best is None:
        return None
    _w, _key, mid, end = best
    chain = [mid] if end is None else [end, mid]
    while chain[-1] not in inside:
        chain.append(parent[chain[-1]])
    chain.reverse()
    prob = 1.0
    for a, b in zip(chain, chain[1:]):
        prob *= next(p for t, p in view.adj[a] if t == b)
    return Fragment(tuple(chain), prob)


class SearchStatus(enum.Enum):
    CRITICAL = "critical"
    BUDGET_EXHAUSTED = "budget_exhausted"
    FAILED = "failed"


@dataclass(frozen=True)
class Budget:
    max_steps: int = 100_000
    max_seconds: float | None = None


@dataclass
class SearchResult:
    status: SearchStatus
    subsystem: Subsystem
    trace: list[float] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.trace)


def _view_targets(view: View, prop: ReachabilityProperty) -> tuple[frozenset[int], list[Vertex]]:
    concrete = target_states(view.model, prop)
    return concrete, [s for s in sorted(concrete) if view.rep.get(s) == s]


def global_search(view: View, prop: ReachabilityProperty, budget: Budget = Budget()) -> SearchResult:
    """Grow the subsystem with initial-to-target walks in decreasing
    probability order until it is critical on its own."""
    concrete_targets, target_vertices = _view_targets(view, prop)
    sub = Subsystem(view)
    trace: list[float] = []
    started = time.monotonic()
    for walk, _p in enumerate_paths(view, view.init_vertex, target_vertices):
        if len(trace) >= budget.max_steps or (
            budget.max_seconds is not None and time.monotonic() - started > budget.max_seconds
        ):
            return SearchResult(SearchStatus.BUDGET_EXHAUSTED, sub, trace)
        sub.add_walk(walk)
        prob = probability(view, sub, concrete_targets)
        trace.append(prob)
        if reachability.violates(prob, prop):
            return SearchResult(SearchStatus.CRITICAL, sub, trace)
    return SearchResult(
        SearchStatus.CRITICAL if sub.vertices and reachability.violates(
            probability(view, sub, concrete_targets), prop
        ) else SearchStatus.FAILED,
        sub,
        trace,
    )


def local_search(view: View, prop: ReachabilityProperty, budget: Budget = Budget()) -> SearchResult:
    """Seed with the single most probable walk, then extend with the best
    connecting fragment until critical."""
    concrete_targets, target_vertices = _view_targets(view, prop)
    sub = Subsystem(view)
    trace: list[float] = []
    started = time.monotonic()
    seeded = False
    for walk, _p in enumerate_paths(view, view.init_vertex, target_vertices):
        sub.add_walk(walk)
        seeded = True
        break
    if not seeded:
        return SearchResult(SearchStatus.FAILED, sub, trace)
    while True:
        prob = probability(view, sub, concrete_targets)
        trace.append(prob)
        if reachability.violates(prob, prop):
            return SearchResult(SearchStatus.CRITICAL, sub, trace)
        if len(trace) >= budget.max_steps or (
            budget.max_seconds is not None and time.monotonic() - started > budget.max_seconds
        ):
            return SearchResult(SearchStatus.BUDGET_EXHAUSTED, sub, trace)
        fragment = best_fragment(view, sub, target_vertices)
        if fragment is None:
            return SearchResult(SearchStatus.FAILED, sub, trace)
        sub.add_walk(fragment.vertices)


def run_search(
    method: str, view: View, prop: ReachabilityProperty, budget: Budget = Budget()
) -> SearchResult:
    if method == "global":
        return global_search(view, prop, budget)
    if method == "local":
        return local_search(view, prop, budget)
    raise ValueError(f"unknown search method {method!r}")
