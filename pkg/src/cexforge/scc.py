"""SCC decomposition, hierarchical abstraction, and mixed concrete/abstract views.

An abstracted SCC is replaced by one vertex per *input* state; each such
vertex carries direct edges to the SCC's output states, weighted by the exact
reachability probability of that output inside the SCC.  This keeps every
view's initial-to-target probability equal to the concrete model's.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

from .graphs import predecessor_lists, strongly_connected_components
from .model import Dtmc
from . import reachability

ABSTRACT_TOL = 1e-12

# A view vertex is either a concrete state (int) or an abstract entry point
# (node id, input state).  Within one view the underlying state index is
# unique across vertices, so it doubles as the deterministic sort key.
Vertex = Union[int, tuple[int, int]]


def vertex_state(v: Vertex) -> int:
    return v if isinstance(v, int) else v[1]


def is_abstract_vertex(v: Vertex) -> bool:
    return not isinstance(v, int)


def vertex_id(v: Vertex) -> str:
    return f"s{v}" if isinstance(v, int) else f"n{v[0]}:s{v[1]}"


def parse_vertex_id(text: str) -> Vertex:
    if text.startswith("n"):
        node_part, state_part = text.split(":", 1)
        return (int(node_part[1:]), int(state_part[1:]))
    if text.startswith("s"):
        return int(text[1:])
    raise ValueError(f"malformed vertex id {text!r}")


@dataclass(frozen=True)
class Scc:
    states: tuple[int, ...]
    nontrivial: bool


def decompose_sccs(model: Dtmc) -> list[Scc]:
    """All SCCs in reverse topological order.

    Non-trivial means: at least two states, or a single self-looping state
    that is not absorbing (self-loop probability < 1).
    """
    comps = strongly_connected_components(
        range(model.num_states), lambda v: (t for t, _p in model.rows[v])
    )
    out = []
    for comp in comps:
        if len(comp) >= 2:
            out.append(Scc(tuple(comp), True))
        else:
            s = comp[0]
            self_p = next((p for t, p in model.rows[s] if t == s), None)
            out.append(Scc(tuple(comp), self_p is not None and self_p < 1.0))
    return out


@dataclass
class SccNode:
    id: int
    parent: int | None
    member_states: frozenset[int]
    inputs: frozenset[int]
    outputs: frozenset[int]
    children: tuple[int, ...] = ()
    # (input, output) -> probability of leaving through that output
    abstract_trans: dict[tuple[int, int], float] = field(default_factory=dict)


@dataclass
class SccHierarchy:
    roots: tuple[int, ...]
    nodes: dict[int, SccNode]
    home: dict[int, int]  # state -> deepest node containing it
    targets: frozenset[int]

    def node(self, node_id: int) -> SccNode:
        return self.nodes[node_id]

    def all_ids_parent_first(self) -> list[int]:
        order: list[int] = []

        def visit(nid: int) -> None:
            order.append(nid)
            for c in self.nodes[nid].children:
                visit(c)

        for r in self.roots:
            visit(r)
        return order

    def ancestors(self, node_id: int) -> list[int]:
        out = []
        p = self.nodes[node_id].parent
        while p is not None:
            out.append(p)
            p = self.nodes[p].parent
        return out


def _nontrivial_components(model: Dtmc, region: set[int]) -> list[list[int]]:
    comps = strongly_connected_components(
        sorted(region), lambda v: (t for t, _p in model.rows[v] if t in region)
    )
    keep = []
    for comp in comps:
        if len(comp) >= 2:
            keep.append(comp)
        else:
            s = comp[0]
            self_p = next((p for t, p in model.rows[s] if t == s), None)
            if self_p is not None and self_p < 1.0:
                keep.append(comp)
    keep.sort(key=lambda c: c[0])
    return keep


def _sub_dtmc(model: Dtmc, members: list[int], outputs: list[int]) -> tuple[Dtmc, dict[int, int]]:
    """Induced sub-DTMC over members plus absorbing copies of the outputs."""
    states = members + outputs
    index = {s: i for i, s in enumerate(states)}
    rows: list[list[tuple[int, float]]] = []
    for m in members:
        rows.append([(index[t], p) for t, p in model.rows[m]])
    for _o in outputs:
        rows.append([(len(rows), 1.0)])
    return Dtmc(len(states), rows, initial=0), index


def abstract_transitions(node: SccNode, model: Dtmc) -> dict[tuple[int, int], float]:
    """Exact input-to-output exit probabilities of the SCC, one reachability
    solve per output on the induced sub-DTMC (outputs made absorbing)."""
    members = sorted(node.member_states)
    outputs = sorted(node.outputs)
    if not outputs:
        return {}
    sub, index = _sub_dtmc(model, members, outputs)
    trans: dict[tuple[int, int], float] = {}
    for o in outputs:
        vec = reachability.solve_reachability(sub, {index[o]}, tol=ABSTRACT_TOL)
        for i in sorted(node.inputs):
            val = vec.values[index[i]]
            if val > 0.0:
                trans[(i, o)] = val
    return trans


def _abstract_trans_by_visits(node: SccNode, model: Dtmc) -> dict[tuple[int, int], float]:
    """Same quantity via expected visit counts, one solve per *input*.

    Solves mu = e_i + mu.Q by Gauss-Seidel on the transposed member graph;
    the exit probability to output o is then sum_m mu[m] P[m,o].  Used when a
    node has fewer inputs than outputs.
    """
    members = sorted(node.member_states)
    idx = {m: k for k, m in enumerate(members)}
    m_count = len(members)
    # transposed restriction: incoming[k] = [(j, p)] with member_j -> member_k
    incoming: list[list[tuple[int, float]]] = [[] for _ in range(m_count)]
    exits: list[list[tuple[int, float]]] = [[] for _ in range(m_count)]
    for j, m in enumerate(members):
        for t, p in model.rows[m]:
            if t in idx:
                incoming[idx[t]].append((j, p))
            else:
                exits[j].append((t, p))
    member_set = set(range(m_count))
    blocks = strongly_connected_components(
        range(m_count), lambda k: (j for j, _p in incoming[k] if j in member_set)
    )
    trans: dict[tuple[int, int], float] = {}
    for i in sorted(node.inputs):
        mu = [0.0] * m_count
        src = idx[i]
        for block in blocks:
            prev = float("inf")
            while True:
                delta = 0.0
                for k in block:
                    self_p = 0.0
                    acc = 1.0 if k == src else 0.0
                    for j, p in incoming[k]:
                        if j == k:
                            self_p = p
                        else:
                            acc += mu[j] * p
                    new = acc / (1.0 - self_p) if self_p < 1.0 else 0.0
                    d = abs(new - mu[k])
                    if d > delta:
                        delta = d
                    mu[k] = new
                if delta == 0.0:
                    break
                ratio = min(delta / prev if prev > 0 else 0.5, 0.9999)
                if delta <= ABSTRACT_TOL and delta * ratio / (1.0 - ratio) <= ABSTRACT_TOL:
                    break
                prev = delta
        for k in range(m_count):
            if mu[k] > 0.0:
                for o, p in exits[k]:
                    key = (i, o)
                    trans[key] = trans.get(key, 0.0) + mu[k] * p
    return {k: v for k, v in trans.items() if v > 0.0}


def build_hierarchy(model: Dtmc, targets: Iterable[int] = ()) -> SccHierarchy:
    """Nested non-trivial SCCs with cached abstract transition probabilities.

    Target states are excluded from membership so that every view keeps them
    visible (an abstracted target would make the property unstatable).
    """
    target_set = frozenset(targets)
    preds = predecessor_lists(model.num_states, model.rows)
    nodes: dict[int, SccNode] = {}
    home: dict[int, int] = {}
    counter = 0

    def build_level(region: set[int], parent: int | None) -> tuple[int, ...]:
        nonlocal counter
        ids = []
        for comp in _nontrivial_components(model, region):
            members = frozenset(comp)
            inputs = frozenset(
                m
                for m in members
                if m == model.initial or any(p not in members for p in preds[m])
            )
            if not inputs:
                # unreachable component: pick a canonical entry so the
                # recursion still strictly shrinks
                inputs = frozenset({min(members)})
            outputs = frozenset(
                t for m in members for t, _p in model.rows[m] if t not in members
            )
            nid = counter
            counter += 1
            node = SccNode(nid, parent, members, inputs, outputs)
            nodes[nid] = node
            for m in members:
                home[m] = nid
            node.children = build_level(set(members - inputs), nid)
            if len(inputs) < len(outputs):
                node.abstract_trans = _abstract_trans_by_visits(node, model)
            else:
                node.abstract_trans = abstract_transitions(node, model)
            ids.append(nid)
        return tuple(ids)

    roots = build_level(set(range(model.num_states)) - target_set, None)
    return SccHierarchy(roots, nodes, home, target_set)


class ViewError(ValueError):
    """Inadmissible expansion set (unknown node or child expanded before parent)."""


@dataclass
class View:
    model: Dtmc
    hierarchy: SccHierarchy
    expanded: frozenset[int]
    vertices: tuple[Vertex, ...]
    adj: dict[Vertex, tuple[tuple[Vertex, float], ...]]
    init_vertex: Vertex
    frontier: frozenset[int]  # abstracted (topmost unexpanded) node ids
    rep: dict[int, Vertex]  # visible state / input state -> its vertex

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return sum(len(row) for row in self.adj.values())

    def covered(self, v: Vertex) -> frozenset[int]:
        if isinstance(v, int):
            return frozenset({v})
        return self.hierarchy.nodes[v[0]].member_states

    def vertex_labels(self, v: Vertex) -> frozenset[str]:
        if isinstance(v, int):
            return self.model.labels_of(v)
        return frozenset()


def build_view(model: Dtmc, hierarchy: SccHierarchy, expanded: Iterable[int]) -> View:
    expanded_set = frozenset(expanded)
    for nid in expanded_set:
        if nid not in hierarchy.nodes:
            raise ViewError(f"unknown hierarchy node {nid}")
        parent = hierarchy.nodes[nid].parent
        if parent is not None and parent not in expanded_set:
            raise ViewError(f"node {nid} expanded while its parent {parent} is abstract")

    frontier = frozenset(
        nid
        for nid, node in hierarchy.nodes.items()
        if nid not in expanded_set
        and (node.parent is None or node.parent in expanded_set)
    )
    hidden: dict[int, int] = {}
    for nid in frontier:
        for m in hierarchy.nodes[nid].member_states:
            hidden[m] = nid

    rep: dict[int, Vertex] = {}
    vertices: list[Vertex] = []
    for s in range(model.num_states):
        if s not in hidden:
            rep[s] = s
            vertices.append(s)
    for nid in sorted(frontier):
        for i in sorted(hierarchy.nodes[nid].inputs):
            rep[i] = (nid, i)
            vertices.append((nid, i))
    vertices.sort(key=vertex_state)

    adj: dict[Vertex, tuple[tuple[Vertex, float], ...]] = {}
    for v in vertices:
        if isinstance(v, int):
            adj[v] = tuple(
                sorted(((rep[t], p) for t, p in model.rows[v]), key=lambda e: vertex_state(e[0]))
            )
        else:
            nid, i = v
            node = hierarchy.nodes[nid]
            row = [
                (rep[o], p) for (src, o), p in node.abstract_trans.items() if src == i
            ]
            total = sum(p for _t, p in row)
            if total < 1.0 - 1e-9:
                # trapped mass (bottom SCC): keep the row stochastic
                row.append((v, 1.0 - total))
            row.sort(key=lambda e: vertex_state(e[0]))
            adj[v] = tuple(row)

    init_vertex = rep[model.initial]
    return View(
        model=model,
        hierarchy=hierarchy,
        expanded=expanded_set,
        vertices=tuple(vertices),
        adj=adj,
        init_vertex=init_vertex,
        frontier=frontier,
        rep=rep,
    )
