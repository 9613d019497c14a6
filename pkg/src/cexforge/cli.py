"""Command-line frontend.

Exit codes: 0 success/holds, 1 error, 2 property violated (check), 3 no
counterexample because the property holds, 4 search budget exhausted.
Machine-readable output goes to stdout as key=value lines; diagnostics go to
stderr (verbosity via the CEXFORGE_LOG environment variable).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from . import ingest
from .model import Comparison, Dtmc, ReachabilityProperty
from .reachability import check_property
from .scc import decompose_sccs
from .search import Budget
from .session import RefinementSession, SessionStatus

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2
EXIT_HOLDS = 3
EXIT_BUDGET = 4

log = logging.getLogger("cexforge")


def _load_model(args) -> Dtmc:
    with open(args.tra, encoding="utf-8") as fh:
        model = ingest.parse_tra(fh, mrmc=args.mrmc)
    if args.lab:
        with open(args.lab, encoding="utf-8") as fh:
            model = ingest.parse_lab(fh, model, mrmc=args.mrmc)
    return model


def _property(args) -> ReachabilityProperty:
    if args.le is not None:
        return ReachabilityProperty(Comparison.LESS_EQ, args.le, args.target)
    return ReachabilityProperty(Comparison.LESS, args.lt, args.target)


def cmd_check(args) -> int:
    model = _load_model(args)
    prop = _property(args)
    result = check_property(model, prop)
    verdict = "HOLDS" if result.holds else "VIOLATED"
    print(f"prob={result.prob:.6f} verdict={verdict}")
    return EXIT_OK if result.holds else EXIT_VIOLATED


def cmd_counterexample(args) -> int:
    model = _load_model(args)
    prop = _property(args)
    budget = Budget(max_steps=args.max_paths, max_seconds=args.max_seconds)
    started = time.monotonic()
    session = RefinementSession(model, prop, method=args.method, budget=budget)
    if session.status is SessionStatus.SATISFIED:
        print(f"prob={session.check_prob:.6f} verdict=HOLDS")
        log.info("no counterexample: property holds")
        return EXIT_HOLDS
    session.run_search()
    if session.status is SessionStatus.CRITICAL and args.refine != "none":
        session.auto_refine("mass" if args.refine == "auto" else "expand-all")
    wall = time.monotonic() - started
    report = ingest.write_report(
        session, wall_time=None if args.fixed_timestamps else wall, as_json=args.json
    )
    if args.output:
        Path(args.output).write_text(report, encoding="utf-8")
    else:
        sys.stderr.write(report)
    data = ingest.report_data(session)
    sub = data["subsystem"]
    if args.subsystem_out and "tra" in sub:
        Path(args.subsystem_out).write_text(sub["tra"], encoding="utf-8")
    print(
        f"states={sub['covered_states']} transitions={sub['covered_transitions']} "
        f"prob={sub['probability']:.6f}"
    )
    return EXIT_OK if session.status is SessionStatus.CRITICAL else EXIT_BUDGET


def cmd_random(args) -> int:
    spec = ingest.RandomModelSpec(
        num_states=args.states,
        out_degree=args.out_degree,
        scc_bias=args.scc_bias,
        target_fraction=args.target_fraction,
        seed=args.seed,
    )
    model = ingest.generate_random_dtmc(spec)
    prefix = Path(args.output)
    prefix.with_suffix(".tra").write_text(ingest.write_tra(model), encoding="utf-8")
    prefix.with_suffix(".lab").write_text(ingest.write_lab(model), encoding="utf-8")
    nontrivial = sum(1 for c in decompose_sccs(model) if c.nontrivial)
    print(
        f"states={model.num_states} transitions={model.num_transitions} "
        f"nontrivial_sccs={nontrivial}"
    )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, _, port = args.bind.rpartition(":")
    app = create_app(model_dir=args.model_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return EXIT_OK


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tra", required=True, help="transition file (.tra)")
    p.add_argument("--lab", help="label file (.lab)")
    p.add_argument("--mrmc", action="store_true", help="strict-MRMC 1-based .tra dialect")


def _add_property_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--target", required=True, help="target label of the reachability property")
    bound = p.add_mutually_exclusive_group(required=True)
    bound.add_argument("--le", type=float, metavar="LAMBDA", help="non-strict bound P<=LAMBDA")
    bound.add_argument("--lt", type=float, metavar="LAMBDA", help="strict bound P<LAMBDA")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cexforge",
        description="critical-subsystem counterexamples for DTMC reachability properties",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="model-check a reachability property")
    _add_model_flags(p)
    _add_property_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("counterexample", help="compute a critical subsystem")
    _add_model_flags(p)
    _add_property_flags(p)
    p.add_argument("--method", choices=["global", "local"], default="global")
    p.add_argument("--refine", choices=["none", "auto", "full"], default="none")
    p.add_argument("--max-paths", type=int, default=100_000)
    p.add_argument("--max-seconds", type=float, default=None)
    p.add_argument("--json", action="store_true", help="structured report instead of text")
    p.add_argument("--fixed-timestamps", action="store_true", help="omit wall time (reproducible reports)")
    p.add_argument("-o", "--output", help="report file (default: stderr)")
    p.add_argument("--subsystem-out", help="write the subsystem .tra subset here")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("random", help="generate a random benchmark model")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--out-degree", type=int, default=2)
    p.add_argument("--scc-bias", type=float, default=0.3)
    p.add_argument("--target-fraction", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="output prefix (.tra/.lab appended)")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("serve", help="run the local session API")
    p.add_argument("--bind", default="127.0.0.1:8350")
    p.add_argument("--model-dir", default=None)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=os.environ.get("CEXFORGE_LOG", "WARNING").upper()
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, RuntimeError) as exc:
        log.error("%s", exc)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
