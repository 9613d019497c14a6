"""Explicit-state file I/O (.tra / .lab), random benchmark models, reports.

`.tra`: header lines ``STATES <n>`` and ``TRANSITIONS <m>`` followed by m
whitespace-separated ``<src> <dst> <prob>`` triples, 0-based, '#' comments
allowed.  The strict-MRMC 1-based dialect is accepted via ``mrmc=True``.
Probabilities may be decimal, scientific, or rational ``p/q`` literals.
"""
from __future__ import annotations

import io
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable, Iterator

from .model import ROW_SUM_TOL, Dtmc, validate_dtmc

REPORT_SCHEMA = "cexforge-report/1"


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _lines(text: str | IO[str]) -> Iterator[tuple[int, str]]:
    stream = io.StringIO(text) if isinstance(text, str) else text
    for lineno, raw in enumerate(stream, start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            yield lineno, stripped


def _parse_prob(token: str, lineno: int) -> float:
    try:
        if "/" in token:
            return float(Fraction(token))
        return float(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad probability literal {token!r}", lineno) from None


def parse_tra(text: str | IO[str], mrmc: bool = False) -> Dtmc:
    """Parse a transition file into an unlabeled Dtmc with initial state 0."""
    base = 1 if mrmc else 0
    lines = _lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty transition file") from None
    parts = header.split()
    if len(parts) != 2 or parts[0].upper() != "STATES":
        raise ParseError(f"expected 'STATES <n>', got {header!r}", lineno)
    num_states = int(parts[1])
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("missing TRANSITIONS header") from None
    parts = header.split()
    if len(parts) != 2 or parts[0].upper() != "TRANSITIONS":
        raise ParseError(f"expected 'TRANSITIONS <m>', got {header!r}", lineno)
    num_transitions = int(parts[1])

    rows: list[list[tuple[int, float]]] = [[] for _ in range(num_states)]
    seen: list[set[int]] = [set() for _ in range(num_states)]
    count = 0
    for lineno, line in lines:
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected '<src> <dst> <prob>', got {line!r}", lineno)
        src, dst = int(parts[0]) - base, int(parts[1]) - base
        prob = _parse_prob(parts[2], lineno)
        for name, idx in (("source", src), ("target", dst)):
            if not 0 <= idx < num_states:
                raise ParseError(f"{name} state {idx + base} outside [{base}, {num_states + base})", lineno)
        if dst in seen[src]:
            raise ParseError(f"duplicate transition {src + base} -> {dst + base}", lineno)
        if prob <= 0.0:
            raise ParseError(f"non-positive probability {parts[2]}", lineno)
        seen[src].add(dst)
        rows[src].append((dst, prob))
        count += 1
    if count != num_transitions:
        raise ParseError(f"header declared {num_transitions} transitions, file has {count}")
    model = Dtmc(num_states, rows, initial=0)
    violations = [v for v in validate_dtmc(model) if "sums to" in v]
    if violations:
        raise ParseError("; ".join(violations))
    return model


def write_tra(model: Dtmc, mrmc: bool = False) -> str:
    """Serialize with shortest round-trip decimal printing (bit-exact reload)."""
    base = 1 if mrmc else 0
    out = [f"STATES {model.num_states}", f"TRANSITIONS {model.num_transitions}"]
    for s, row in enumerate(model.rows):
        for t, p in row:
            out.append(f"{s + base} {t + base} {p!r}")
    return "\n".join(out) + "\n"


def parse_lab(text: str | IO[str], model: Dtmc, mrmc: bool = False) -> Dtmc:
    """Attach labels from an MRMC-style label file.

    Declaration section between ``#DECLARATION`` and ``#END`` lists the label
    names; body lines are ``<state> <label> [<label>...]``.
    """
    base = 1 if mrmc else 0
    stream = io.StringIO(text) if isinstance(text, str) else text
    declared: dict[str, set[int]] = {}
    in_decl = False
    decl_seen = False
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.upper() == "#DECLARATION":
            in_decl = True
            decl_seen = True
            continue
        if line.upper() == "#END":
            in_decl = False
            continue
        if line.startswith("#"):
            continue
        if in_decl:
            for name in line.split():
                declared.setdefault(name, set())
            continue
        parts = line.split()
        if len(parts) < 2:
            raise ParseError(f"expected '<state> <label>...', got {line!r}", lineno)
        state = int(parts[0]) - base
        if not 0 <= state < model.num_states:
            raise ParseError(
                f"state {state + base} outside [{base}, {model.num_states + base})", lineno
            )
        for name in parts[1:]:
            if name not in declared:
                raise ParseError(f"label {name!r} used but not declared", lineno)
            declared[name].add(state)
    if not decl_seen:
        raise ParseError("missing #DECLARATION section")
    return model.with_labels(declared)


def write_lab(model: Dtmc) -> str:
    names = sorted(model.labels)
    out = ["#DECLARATION", " ".join(names) if names else "", "#END"]
    by_state: dict[int, list[str]] = {}
    for name in names:
        for s in model.labels[name]:
            by_state.setdefault(s, []).append(name)
    for s in sorted(by_state):
        out.append(f"{s} {' '.join(sorted(by_state[s]))}")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class RandomModelSpec:
    num_states: int
    out_degree: int = 2
    scc_bias: float = 0.3
    target_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_states < 1 or self.out_degree < 1:
            raise ValueError("num_states and out_degree must be >= 1")
        if not (self.out_degree < self.num_states or self.num_states == 1):
            raise ValueError("out_degree must be < num_states")
        if not 0.0 <= self.scc_bias <= 1.0:
            raise ValueError("scc_bias outside [0, 1]")
        if not 0.0 < self.target_fraction <= 1.0:
            raise ValueError("target_fraction outside (0, 1]")


_CLUSTER = 16  # back-edges stay inside a cluster, bounding SCC sizes
_FORWARD_WINDOW = 24  # forward edges are mostly local so back-edges close cycles


def generate_random_dtmc(spec: RandomModelSpec) -> Dtmc:
    """Deterministic function of the seed.  Forward-layered skeleton with
    scc_bias-controlled back-edges confined to small clusters, so models are
    SCC-rich but never develop one giant component.  The tail of the state
    range holds absorbing states: first a block of non-target traps, then the
    "target" block, so reachability probabilities land strictly inside (0, 1)."""
    rng = random.Random(spec.seed)
    n = spec.num_states
    num_targets = min(n, max(1, math.ceil(spec.target_fraction * n)))
    num_traps = min(max(n - num_targets - 1, 0), num_targets)
    first_target = n - num_targets
    first_trap = first_target - num_traps
    rows: list[list[tuple[int, float]]] = []
    for s in range(n):
        if s >= first_trap:
            rows.append([(s, 1.0)])
            continue
        fanout = rng.randint(1, spec.out_degree)
        succs = {_forward_target(rng, s, n)}
        cluster_start = (s // _CLUSTER) * _CLUSTER
        for _ in range(fanout - 1):
            if s > cluster_start and rng.random() < spec.scc_bias:
                succs.add(rng.randrange(cluster_start, s))
            else:
                succs.add(_forward_target(rng, s, n))
        ordered = sorted(succs)
        weights = [0.1 + rng.random() for _ in ordered]
        total = sum(weights)
        rows.append([(t, w / total) for t, w in zip(ordered, weights)])
    labels: dict[str, range] = {"target": range(first_target, n)}
    if num_traps:
        labels["trap"] = range(first_trap, first_target)
    return Dtmc(n, rows, initial=0, labels=labels)


def _forward_target(rng: random.Random, s: int, n: int) -> int:
    if rng.random() < 0.8:
        return rng.randrange(s + 1, min(n, s + 1 + _FORWARD_WINDOW))
    return rng.randrange(s + 1, n)


def _covered_transitions(model: Dtmc, covered: set[int]) -> list[tuple[int, int, float]]:
    return [
        (s, t, p)
        for s in sorted(covered)
        for t, p in model.rows[s]
        if t in covered
    ]


def report_data(session, wall_time: float | None = None) -> dict:
    """Structured report for a refinement session (see session module)."""
    model: Dtmc = session.model
    doc: dict = {
        "schema": REPORT_SCHEMA,
        "property": str(session.prop),
        "model": {"states": model.num_states, "transitions": model.num_transitions},
        "method": session.method,
        "status": session.status.value,
        "probability": session.check_prob,
    }
    if wall_time is not None:
        doc["wall_time_seconds"] = round(wall_time, 6)
    covered: set[int] = set()
    sub_doc = {
        "probability": 0.0,
        "covered_states": 0,
        "covered_transitions": 0,
        "view_vertices": 0,
        "view_edges": 0,
        "iterations": len(session.trace),
        "trace": list(session.trace),
    }
    if session.subsystem is not None and session.subsystem.vertices:
        for v in session.subsystem.vertices:
            covered.update(session.view.covered(v))
        trans = _covered_transitions(model, covered)
        sub_doc.update(
            probability=session.subsystem.cached_prob or 0.0,
            covered_states=len(covered),
            covered_transitions=len(trans),
            view_vertices=len(session.subsystem.vertices),
            view_edges=len(session.subsystem.closure_edges()),
        )
        sub_doc["tra"] = subsystem_tra(model, covered)
    doc["subsystem"] = sub_doc
    return doc


def subsystem_tra(model: Dtmc, covered: Iterable[int]) -> str:
    """The covered concrete subgraph in `.tra` subset form (original indices)."""
    trans = _covered_transitions(model, set(covered))
    out = [f"STATES {model.num_states}", f"TRANSITIONS {len(trans)}"]
    out.extend(f"{s} {t} {p!r}" for s, t, p in trans)
    return "\n".join(out) + "\n"


def write_report(session, wall_time: float | None = None, as_json: bool = False) -> str:
    """Deterministic report; byte-identical across runs when wall_time is None."""
    doc = report_data(session, wall_time)
    if as_json:
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    lines = [
        "counterexample report",
        f"property: {doc['property']}",
        f"model: states={doc['model']['states']} transitions={doc['model']['transitions']}",
        f"probability: {doc['probability']:.6f}",
        f"status: {doc['status']}",
    ]
    if doc["status"] == "satisfied":
        lines.append("property holds, no counterexample")
    else:
        sub = doc["subsystem"]
        lines.append(f"method: {doc['method']}")
        lines.append(
            "subsystem: states={0} transitions={1} view_vertices={2} view_edges={3}".format(
                sub["covered_states"],
                sub["covered_transitions"],
                sub["view_vertices"],
                sub["view_edges"],
            )
        )
        lines.append(f"subsystem probability: {sub['probability']:.6f}")
        lines.append(f"iterations: {sub['iterations']}")
        if wall_time is not None:
            lines.append(f"wall time: {doc['wall_time_seconds']:.6f}s")
        if "tra" in sub:
            lines.append("subsystem transitions (.tra subset):")
            lines.append(sub["tra"].rstrip("\n"))
    return "\n".join(lines) + "\n"
