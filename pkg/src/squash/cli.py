"""Command-line front end: state I/O, example catalog, bound computation, and
verification suites.

Exit codes: 0 success, 1 failed verification, 2 parse error, 3 invariant
violation, 4 unknown catalog name.  Stdout is machine-parseable JSON; logging
goes to stderr and is controlled by SQUASH_LOG={quiet,info,trace}.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import catalog
from .classical import intrinsic_information, load_joint
from .core import load_state, save_state, state_to_json
from .errors import SquashError
from .extensions import default_split
from .optimizer import OptimizerConfig, bounds_report, trace_to_csv
from .propcheck import SUITE_NAMES, run_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_UNKNOWN_NAME = 4

_LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "trace": logging.DEBUG}


def _setup_logging() -> None:
    level = _LOG_LEVELS.get(os.environ.get("SQUASH_LOG", "quiet"), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(name)s: %(message)s")


def _parse_split(split: str | None, layout) -> tuple:
    if split is None:
        return default_split(layout)
    parts = split.split(":")
    if len(parts) != 2:
        raise ValueError("--split must look like 'A:B' or 'A,A2:B,B2'")
    a = tuple(x for x in parts[0].split(",") if x)
    b = tuple(x for x in parts[1].split(",") if x)
    return a, b


def _cmd_compute(args: argparse.Namespace) -> int:
    rho = load_state(args.state)
    a, b = _parse_split(args.split, rho.layout)
    cfg = OptimizerConfig(
        d_env=args.d_env,
        restarts=args.restarts,
        max_iters=args.max_iters,
        seed=args.seed,
    )
    report = bounds_report(rho, cfg, ensemble_size=args.ensemble_size, a_labels=a, b_labels=b)
    payload = report.to_dict()
    payload["a_labels"] = list(a)
    payload["b_labels"] = list(b)
    text = json.dumps(payload, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.trace_out:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            fh.write(trace_to_csv(report.trace))
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    manifest, results = run_suite(args.suite, seed=args.seed, n=args.n)
    print(json.dumps({"manifest": manifest}, sort_keys=True))
    n_failed = 0
    for res in results:
        print(res.to_json())
        if not res.passed:
            n_failed += 1
    print(json.dumps({"summary": {"checks": len(results), "failed": n_failed}}, sort_keys=True))
    return EXIT_OK if n_failed == 0 else EXIT_CHECK_FAILED


def _cmd_intrinsic(args: argparse.Namespace) -> int:
    joint = load_joint(args.joint)
    cfg = OptimizerConfig(restarts=args.restarts, max_iters=args.max_iters, seed=args.seed)
    res = intrinsic_information(joint, cfg)
    print(
        json.dumps(
            {
                "value": res.value,
                "channel": [[float(x) for x in row] for row in res.channel.matrix],
                "reason": res.reason,
            },
            sort_keys=True,
        )
    )
    return EXIT_OK


def _cmd_examples(args: argparse.Namespace) -> int:
    if args.action == "list":
        for name in sorted(catalog.CATALOG):
            entry = catalog.CATALOG[name]
            print(
                json.dumps(
                    {
                        "name": entry.name,
                        "description": entry.description,
                        "params": {k: v for k, v in entry.params.items()},
                        "known_values": {
                            key: {"value": val, "provenance": prov}
                            for key, (val, prov) in entry.known_values.items()
                        },
                    },
                    sort_keys=True,
                )
            )
        return EXIT_OK
    if args.name not in catalog.CATALOG:
        print(f"unknown example {args.name!r}", file=sys.stderr)
        return EXIT_UNKNOWN_NAME
    params = {}
    if args.p is not None:
        params["p"] = args.p
    if args.seed is not None:
        params["seed"] = args.seed
    if args.dims is not None:
        params["dims"] = args.dims
    if args.rank is not None:
        params["rank"] = args.rank
    rho = catalog.build_example(args.name, **params)
    if args.path == "-":
        print(state_to_json(rho))
    else:
        save_state(rho, args.path)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = argparse.ArgumentParser(
        prog="squash",
        description="Certified numerical bounds on squashed entanglement (all "
        "optimizer outputs are upper bounds; the true infimum may be lower).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser("compute", help="bound chain for a state file")
    p_compute.add_argument("state", help="path to the JSON state file")
    p_compute.add_argument("--d-env", type=int, default=None, dest="d_env")
    p_compute.add_argument("--restarts", type=int, default=4)
    p_compute.add_argument("--max-iters", type=int, default=100, dest="max_iters")
    p_compute.add_argument("--seed", type=int, default=0)
    p_compute.add_argument("--ensemble-size", type=int, default=None, dest="ensemble_size")
    p_compute.add_argument("--split", default=None, help="bipartition, e.g. 'A:B' or 'A,A2:B,B2'")
    p_compute.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    p_compute.add_argument("--trace-out", default=None, dest="trace_out", help="write the iteration CSV here")
    p_compute.set_defaults(func=_cmd_compute)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("--suite", choices=SUITE_NAMES + ("all",), default="all")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--n", type=int, default=None)
    p_verify.set_defaults(func=_cmd_verify)

    p_intr = sub.add_parser("intrinsic", help="intrinsic information of a classical joint")
    p_intr.add_argument("joint", help="path to the JSON joint file")
    p_intr.add_argument("--restarts", type=int, default=4)
    p_intr.add_argument("--max-iters", type=int, default=200, dest="max_iters")
    p_intr.add_argument("--seed", type=int, default=0)
    p_intr.set_defaults(func=_cmd_intrinsic)

    p_ex = sub.add_parser("examples", help="list or emit catalog states")
    ex_sub = p_ex.add_subparsers(dest="action", required=True)
    ex_list = ex_sub.add_parser("list", help="list catalog entries with known values")
    ex_list.set_defaults(func=_cmd_examples, action="list")
    ex_emit = ex_sub.add_parser("emit", help="write a catalog state to a file")
    ex_emit.add_argument("name")
    ex_emit.add_argument("path", help="output path, or - for stdout")
    ex_emit.add_argument("--p", type=float, default=None)
    ex_emit.add_argument("--seed", type=int, default=None)
    ex_emit.add_argument("--dims", default=None)
    ex_emit.add_argument("--rank", type=int, default=None)
    ex_emit.set_defaults(func=_cmd_examples, action="emit")

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (json.JSONDecodeError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SquashError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
