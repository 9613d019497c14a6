"""Shared sparse-graph algorithms (iterative Tarjan SCC, backward reachability)."""
from __future__ import annotations

from typing import Callable, Iterable, Sequence


def strongly_connected_components(
    nodes: Iterable[int], successors: Callable[[int], Iterable[int]]
) -> list[list[int]]:
    """Tarjan's algorithm, iterative to survive deep graphs.

    Returns SCCs in reverse topological order of the condensation: every
    component is emitted before any component that can reach it.
    """
    nodes = list(nodes)
    node_set = set(nodes)
    index: dict[int, int] = {}
    lowlink: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        # work items: (vertex, iterator over remaining successors)
        work = [(root, iter([s for s in successors(root) if s in node_set]))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter([s for s in successors(w) if s in node_set])))
                    advanced = True
                    break
                if w in on_stack:
                    if index[w] < lowlink[v]:
                        lowlink[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if lowlink[v] < lowlink[parent]:
                    lowlink[parent] = lowlink[v]
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comp.sort()
                components.append(comp)
    return components


def backward_reachable(
    seeds: Iterable[int],
    predecessors: Sequence[Sequence[int]],
    blocked: frozenset[int] = frozenset(),
) -> set[int]:
    """States that can reach a seed.  Expansion never passes *through* a
    blocked state (blocked seeds are still included)."""
    seen = set(seeds)
    frontier = list(seen)
    while frontier:
        u = frontier.pop()
        for p in predecessors[u]:
            if p not in seen and p not in blocked:
                seen.add(p)
                frontier.append(p)
    return seen


def predecessor_lists(num_states: int, rows) -> list[list[int]]:
    preds: list[list[int]] = [[] for _ in range(num_states)]
    for s in range(num_states):
        for t, _p in rows[s]:
            preds[t].append(s)
    return preds
