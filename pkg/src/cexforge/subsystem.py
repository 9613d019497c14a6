"""Critical subsystems: vertex/edge sets of a view with induced-model semantics.

The probability of a subsystem is computed on the induced model: member
vertices keep their member-to-member edges, every missing bit of row mass is
redirected to a fresh absorbing sink.  By default the induced model is the
vertex closure (all view edges between members); `edges_only=True` restricts
it to the edges explicitly recorded by the search.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import Dtmc, ReachabilityProperty
from . import reachability
from .scc import Vertex, View, vertex_state


class Subsystem:
    """Mutable, single-owner set of view vertices and edges."""

    def __init__(self, view: View):
        self.view = view
        self.vertices: set[Vertex] = set()
        self.edges: set[tuple[Vertex, Vertex]] = set()
        self.cached_prob: float | None = None
        self._cached_vec: dict[Vertex, float] | None = None

    def add_walk(self, walk: Sequence[Vertex]) -> "Subsystem":
        """Union in the walk's vertices and edges; idempotent."""
        for v in walk:
            if v not in self.view.adj:
                raise ValueError(f"vertex {v!r} not in view")
        self.vertices.update(walk)
        for a, b in zip(walk, walk[1:]):
            self.edges.add((a, b))
        self.cached_prob = None
        return self

    def copy(self) -> "Subsystem":
        dup = Subsystem(self.view)
        dup.vertices = set(self.vertices)
        dup.edges = set(self.edges)
        dup.cached_prob = self.cached_prob
        dup._cached_vec = dict(self._cached_vec) if self._cached_vec else None
        return dup

    def closure_edges(self) -> set[tuple[Vertex, Vertex]]:
        """All view edges between member vertices."""
        out = set()
        for v in self.vertices:
            for t, _p in self.view.adj[v]:
                if t in self.vertices:
                    out.add((v, t))
        return out


def induce(
    view: View,
    subsystem: Subsystem,
    targets: Iterable[int],
    edges_only: bool = False,
) -> tuple[Dtmc, list[Vertex]]:
    """Induced model over the subsystem plus an absorbing sink (last state).

    Member target states and the sink are absorbing.  Returns the model and
    the member ordering (index i of the model is members[i]).
    """
    if not subsystem.vertices:
        raise ValueError("subsystem is empty")
    if view.init_vertex not in subsystem.vertices:
        raise ValueError("subsystem does not contain the initial vertex")
    target_set = frozenset(targets)
    members = sorted(subsystem.vertices, key=vertex_state)
    index = {v: k for k, v in enumerate(members)}
    sink = len(members)
    rows: list[list[tuple[int, float]]] = []
    for v in members:
        if isinstance(v, int) and v in target_set:
            rows.append([(index[v], 1.0)])
            continue
        row: list[tuple[int, float]] = []
        kept = 0.0
        for t, p in view.adj[v]:
            if t in index and (not edges_only or (v, t) in subsystem.edges):
                row.append((index[t], p))
                kept += p
        if kept < 1.0 - 1e-15:
            row.append((sink, 1.0 - kept))
        rows.append(row)
    rows.append([(sink, 1.0)])
    return Dtmc(sink + 1, rows, initial=index[view.init_vertex]), members


def probability(
    view: View,
    subsystem: Subsystem,
    targets: Iterable[int],
    edges_only: bool = False,
    tol: float = reachability.DEFAULT_TOL,
) -> float:
    """Pr(init |= eventually targets) in the induced model; caches the solver
    vector keyed by vertex so subsequent solves warm-start."""
    target_set = frozenset(targets)
    if not subsystem.vertices:
        return 0.0
    member_targets = {v for v in subsystem.vertices if isinstance(v, int) and v in target_set}
    if not member_targets:
        subsystem.cached_prob = 0.0
        return 0.0
    induced, members = induce(view, subsystem, target_set, edges_only=edges_only)
    warm = None
    if subsystem._cached_vec is not None:
        warm = [subsystem._cached_vec.get(v, 0.0) for v in members] + [0.0]
    vec = reachability.solve_reachability(
        induced, {i for i, v in enumerate(members) if v in member_targets}, tol=tol, warm_start=warm
    )
    subsystem._cached_vec = {v: vec.values[i] for i, v in enumerate(members)}
    prob = vec.values[induced.initial]
    subsystem.cached_prob = prob
    return prob


def is_critical(
    view: View,
    subsystem: Subsystem,
    prop: ReachabilityProperty,
    targets: Iterable[int],
    edges_only: bool = False,
) -> bool:
    prob = probability(view, subsystem, targets, edges_only=edges_only)
    return reachability.violates(prob, prop)


@dataclass(frozen=True)
class SizeStats:
    covered_concrete_states: int
    view_vertices: int
    view_edges: int
    probability: float


def stats(subsystem: Subsystem, view: View) -> SizeStats:
    covered: set[int] = set()
    for v in subsystem.vertices:
        covered.update(view.covered(v))
    return SizeStats(
        covered_concrete_states=len(covered),
        view_vertices=len(subsystem.vertices),
        view_edges=len(subsystem.closure_edges()),
        probability=subsystem.cached_prob if subsystem.cached_prob is not None else 0.0,
    )
