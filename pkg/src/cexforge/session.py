"""Hierarchical refinement workflow: view + subsystem + replayable history.

History stores semantic actions (search / concretize), so any session state
can be reproduced by replaying them from the initial state; undo is replay of
all but the last action.
"""
from __future__ import annotations

import enum
import json
from typing import Iterable, Sequence

from . import ingest, scc, search, subsystem as subsys
from .model import Dtmc, Comparison, ReachabilityProperty, target_states
from .reachability import check_property, violates
from .scc import SccHierarchy, Vertex, View, build_hierarchy, build_view, vertex_state
from .search import Budget, SearchStatus
from .subsystem import Subsystem, probability

SESSION_SCHEMA = "cexforge-session/1"


class SessionStatus(enum.Enum):
    SATISFIED = "satisfied"
    SEARCHING = "searching"
    CRITICAL = "critical"
    BUDGET_EXHAUSTED = "budget_exhausted"


class InvalidActionError(RuntimeError):
    """Action not allowed in the session's current status."""


Action = tuple  # ("search",) | ("concretize", tuple[int, ...])


class RefinementSession:
    def __init__(
        self,
        model: Dtmc,
        prop: ReachabilityProperty,
        method: str = "global",
        budget: Budget | None = None,
    ):
        if method not in ("global", "local"):
            raise ValueError(f"unknown search method {method!r}")
        self.model = model
        self.prop = prop
        self.method = method
        self.budget = budget or Budget()
        self.targets = target_states(model, prop)
        self.history: list[Action] = []
        self.trace: list[float] = []
        verdict = check_property(model, prop)
        self.check_prob = verdict.prob
        if verdict.holds:
            self.status = SessionStatus.SATISFIED
            self.hierarchy: SccHierarchy | None = None
            self.view: View | None = None
            self.subsystem: Subsystem | None = None
            self.expanded: frozenset[int] = frozenset()
            return
        self.status = SessionStatus.SEARCHING
        self.hierarchy = build_hierarchy(model, self.targets)
        self.expanded = frozenset()
        self.view = build_view(model, self.hierarchy, self.expanded)
        self.subsystem = Subsystem(self.view)

    # -- internal action application (no precondition checks; used by replay) --

    def _apply_search(self) -> None:
        result = search.run_search(self.method, self.view, self.prop, self.budget)
        self.subsystem = result.subsystem
        self.trace = result.trace
        if result.status is SearchStatus.CRITICAL:
            self.status = SessionStatus.CRITICAL
        else:
            self.status = SessionStatus.BUDGET_EXHAUSTED

    def _apply_concretize(self, node_ids: Sequence[int]) -> None:
        ids = sorted(set(node_ids))
        new_expanded = set(self.expanded)
        for nid in ids:
            if nid not in self.hierarchy.nodes:
                raise InvalidActionError(f"unknown hierarchy node {nid}")
        # parent-first within the batch: expand shallow nodes before deep ones
        for nid in sorted(ids, key=lambda n: len(self.hierarchy.ancestors(n))):
            parent = self.hierarchy.nodes[nid].parent
            if parent is not None and parent not in new_expanded:
                raise InvalidActionError(
                    f"cannot concretize node {nid}: parent {parent} is still abstract"
                )
            new_expanded.add(nid)
        old_sub = self.subsystem
        self.expanded = frozenset(new_expanded)
        self.view = build_view(self.model, self.hierarchy, self.expanded)
        new_sub = Subsystem(self.view)
        if old_sub is not None and old_sub.vertices:
            vertices: set[Vertex] = set()
            for v in old_sub.vertices:
                if isinstance(v, int):
                    vertices.add(v)
                    continue
                nid, entry = v
                if nid in self.expanded:
                    # replace by the node's full member subgraph
                    for m in self.hierarchy.nodes[nid].member_states:
                        rv = self.view.rep.get(m)
                        if rv is not None:
                            vertices.add(rv)
                else:
                    vertices.add(v)
            new_sub.vertices = vertices
            new_sub.edges = new_sub.closure_edges()
        self.subsystem = new_sub
        if self.subsystem.vertices and subsys.is_critical(
            self.view, self.subsystem, self.prop, self.targets
        ):
            self.status = SessionStatus.CRITICAL
        else:
            self.status = SessionStatus.SEARCHING

    def _apply(self, action: Action) -> None:
        if action[0] == "search":
            self._apply_search()
        elif action[0] == "concretize":
            self._apply_concretize(action[1])
        else:
            raise ValueError(f"unknown action {action!r}")
        self.history.append(action)

    # -- public operations --

    def run_search(self) -> "RefinementSession":
        if self.status is not SessionStatus.SEARCHING:
            raise InvalidActionError(f"search not allowed in status {self.status.value}")
        self._apply(("search",))
        return self

    def concretize(self, node_ids: Iterable[int]) -> "RefinementSession":
        if self.status is SessionStatus.SATISFIED:
            raise InvalidActionError("property holds; nothing to refine")
        ids = tuple(sorted(set(node_ids)))
        if not ids:
            return self
        self._apply(("concretize", ids))
        return self

    def undo(self) -> "RefinementSession":
        if not self.history:
            raise InvalidActionError("nothing to undo")
        replay = self.history[:-1]
        fresh = RefinementSession(self.model, self.prop, self.method, self.budget)
        for action in replay:
            fresh._apply(action)
        self.__dict__.update(fresh.__dict__)
        return self

    def abstract_subsystem_vertices(self) -> list[Vertex]:
        if self.subsystem is None:
            return []
        return sorted(
            (v for v in self.subsystem.vertices if not isinstance(v, int)),
            key=vertex_state,
        )

    def auto_refine(self, policy: str = "mass") -> "RefinementSession":
        """Concretize until the critical subsystem is fully concrete.

        "mass": repeatedly expand the abstract vertex with the largest
        reachability value inside the current subsystem, re-searching after
        each expansion.  "expand-all": expand every node, then search once.
        """
        if self.status is not SessionStatus.CRITICAL:
            raise InvalidActionError(f"auto_refine requires a critical subsystem")
        if policy == "expand-all":
            remaining = tuple(
                nid for nid in self.hierarchy.all_ids_parent_first() if nid not in self.expanded
            )
            if remaining:
                self._apply(("concretize", remaining))
                self._apply(("search",))
            return self
        if policy != "mass":
            raise ValueError(f"unknown refinement policy {policy!r}")
        while True:
            abstract = self.abstract_subsystem_vertices()
            if not abstract:
                return self
            vec = self.subsystem._cached_vec or {}
            node_id = max(abstract, key=lambda v: (vec.get(v, 0.0), -vertex_state(v)))[0]
            self._apply(("concretize", (node_id,)))
            self._apply(("search",))

    def export(self) -> str:
        """Canonical JSON serialization; loading and re-exporting is byte-identical."""
        doc = {
            "schema": SESSION_SCHEMA,
            "model": {"tra": ingest.write_tra(self.model), "lab": ingest.write_lab(self.model)},
            "property": {
                "comparison": self.prop.comparison.value,
                "threshold": self.prop.threshold,
                "target_label": self.prop.target_label,
            },
            "method": self.method,
            "budget": {"max_steps": self.budget.max_steps, "max_seconds": self.budget.max_seconds},
            "history": [list(a) if a[0] == "search" else ["concretize", list(a[1])] for a in self.history],
            "status": self.status.value,
            "probability": self.check_prob,
            "expanded": sorted(self.expanded),
            "trace": list(self.trace),
            "subsystem": {
                "vertices": [scc.vertex_id(v) for v in sorted(self.subsystem.vertices, key=vertex_state)]
                if self.subsystem
                else [],
                "probability": (self.subsystem.cached_prob or 0.0) if self.subsystem else 0.0,
            },
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_session(text: str) -> RefinementSession:
    doc = json.loads(text)
    if doc.get("schema") != SESSION_SCHEMA:
        raise ValueError(f"unsupported session schema {doc.get('schema')!r}")
    model = ingest.parse_tra(doc["model"]["tra"])
    model = ingest.parse_lab(doc["model"]["lab"], model)
    prop = ReachabilityProperty(
        Comparison(doc["property"]["comparison"]),
        doc["property"]["threshold"],
        doc["property"]["target_label"],
    )
    budget = Budget(
        max_steps=doc["budget"]["max_steps"], max_seconds=doc["budget"]["max_seconds"]
    )
    session = RefinementSession(model, prop, doc["method"], budget)
    for action in doc["history"]:
        if action[0] == "search":
            session._apply(("search",))
        else:
            session._apply(("concretize", tuple(action[1])))
    return session
