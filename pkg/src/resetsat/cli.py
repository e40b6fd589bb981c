"""Command-line front end.

    resetsat solve FILE [options]       exit 10 SAT, 20 UNSAT, 0 UNKNOWN, 1 error
    resetsat batch DIR --out CSV [options] [--policy P ...]
    resetsat cactus CSV [CSV ...] --out CSV
    resetsat summary CSV [CSV ...] --timeout SEC
    resetsat generate FAMILY DIR --count N
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from typing import Optional, Sequence

from . import bench
from .engine import Solver, SolverConfig
from .formula import Status, evaluate
from .generators import FAMILIES, generate_family

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_UNKNOWN = 0
EXIT_ERROR = 1


class UsageError(Exception):
    pass


def parse_policy(desc: str) -> dict:
    """``baseline``, ``fixed=<p>``, ``thompson``, ``thompson-decay`` or
    ``swucb`` -> SolverConfig keyword arguments."""
    desc = desc.strip()
    if desc.startswith("fixed"):
        _, sep, raw = desc.partition("=")
        if not sep:
            raise UsageError("fixed policy needs a probability, e.g. fixed=0.2")
        try:
            p = float(raw)
        except ValueError:
            raise UsageError(f"bad reset probability {raw!r}") from None
        if not 0.0 <= p <= 1.0:
            raise UsageError(f"reset probability {p} out of range [0, 1]")
        return {"policy": "fixed", "reset_probability": p}
    if desc in ("baseline", "thompson", "thompson-decay", "swucb"):
        return {"policy": desc}
    raise UsageError(f"unknown policy {desc!r}")


def _partial_k(raw: str) -> Optional[int]:
    if raw.lower() in ("all", "full"):
        return None
    k = int(raw)
    if k < 0:
        raise argparse.ArgumentTypeError("partial-k must be >= 0")
    return k


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--decay", type=float, default=0.8, help="Thompson shape-parameter decay")
    p.add_argument("--ema-decay", type=float, default=0.8, help="decay of the rw_glr moving average")
    p.add_argument("--window", type=int, default=30, help="SW-UCB window size")
    p.add_argument("--explore", type=float, default=0.2, help="SW-UCB exploration constant")
    p.add_argument("--partial-k", type=_partial_k, default=None,
                   help="keep the top k variables on reset (default: full reset)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timeout", type=float, default=5000.0, help="wall-clock seconds")
    p.add_argument("--max-conflicts", type=int, default=None, help="conflict budget")
    p.add_argument("--luby-unit", type=int, default=256, help="conflicts per Luby unit")
    p.add_argument("--flip-success", action="store_true",
                   help="count a window as success when the EMA exceeds its rw_glr")


def config_from_args(args, policy: str) -> SolverConfig:
    kw = parse_policy(policy)
    try:
        return SolverConfig(decay=args.decay, ema_decay=args.ema_decay, window=args.window,
                            explore=args.explore, partial_k=args.partial_k, seed=args.seed,
                            time_limit=args.timeout, max_conflicts=args.max_conflicts,
                            luby_unit=args.luby_unit, flip_success=args.flip_success, **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="resetsat", description=__doc__.splitlines()[0] if __doc__ else None)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one DIMACS file")
    p.add_argument("path")
    p.add_argument("--policy", default="baseline")
    _add_solver_flags(p)
    p.add_argument("--stats", help="write run statistics as JSON")
    p.add_argument("--trace", help="write the per-window reward trace as CSV")

    p = sub.add_parser("batch", help="run every .cnf in a directory under each policy")
    p.add_argument("directory")
    p.add_argument("--out", required=True)
    p.add_argument("--policy", action="append", dest="policies",
                   help="repeatable; default: baseline")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--resume", action="store_true")
    _add_solver_flags(p)

    p = sub.add_parser("cactus", help="cactus-plot data from batch CSVs")
    p.add_argument("csvs", nargs="+")
    p.add_argument("--out", help="output CSV (default: stdout)")

    p = sub.add_parser("summary", help="solved counts and PAR-2 per policy")
    p.add_argument("csvs", nargs="+")
    p.add_argument("--timeout", type=float, required=True)
    p.add_argument("--max-conflicts", type=int, default=None)

    p = sub.add_parser("generate", help="write a benchmark family as DIMACS files")
    p.add_argument("family", choices=sorted(FAMILIES))
    p.add_argument("directory")
    p.add_argument("--count", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _model_lines(model: dict[int, bool], width: int = 78) -> list[str]:
    lines, cur = [], "v"
    for tok in [str(v if model[v] else -v) for v in sorted(model)] + ["0"]:
        if len(cur) + 1 + len(tok) > width:
            lines.append(cur)
            cur = "v"
        cur += " " + tok
    lines.append(cur)
    return lines


def cmd_solve(args) -> int:
    config = config_from_args(args, args.policy)
    try:
        formula = bench.read_formula(args.path)
    except (OSError, ValueError) as exc:
        raise UsageError(f"{args.path}: {exc}") from None
    solver = Solver(formula, config)
    out = solver.solve()
    st = out.stats
    print(f"c policy {config.descriptor} seed {config.seed}")
    print(f"c conflicts {st.conflicts} decisions {st.decisions} restarts {st.restarts} "
          f"resets {st.resets} time {st.elapsed:.3f}")
    if out.status is Status.SAT:
        if not evaluate(formula, out.model):
            raise AssertionError("model check failed")
        print("s SATISFIABLE")
        print("\n".join(_model_lines(out.model)))
        code = EXIT_SAT
    elif out.status is Status.UNSAT:
        print("s UNSATISFIABLE")
        code = EXIT_UNSAT
    else:
        print("s UNKNOWN")
        code = EXIT_UNKNOWN

    if args.stats:
        record = bench.BatchRecord(args.path, config.descriptor, config.seed, out.status.value,
                                   round(st.elapsed, 3), st.conflicts, st.decisions,
                                   st.restarts, st.resets)
        payload = asdict(record)
        payload.update(propagations=st.propagations, learned=st.learned, deleted=st.deleted,
                       rw_glr=solver.tracker.summary())
        with open(args.stats, "w") as fh:
            json.dump(payload, fh, indent=2)
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(solver.tracker.trace_csv())
    return code


def cmd_batch(args) -> int:
    configs = [config_from_args(args, p) for p in (args.policies or ["baseline"])]
    try:
        instances = bench.list_instances(args.directory)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    recs = bench.run_batch(instances, configs, args.out, jobs=args.jobs, resume=args.resume)
    print(f"c {len(recs)} runs written to {args.out}", file=sys.stderr)
    return 0


def cmd_cactus(args) -> int:
    records = []
    for path in args.csvs:
        records.extend(bench.read_batch_csv(path))
    rows = bench.cactus(records)
    if args.out:
        bench.write_cactus(rows, args.out)
    else:
        print(",".join(bench.CACTUS_COLUMNS))
        for policy, rank, t in rows:
            print(f"{policy},{rank},{t:.3f}")
    return 0


def cmd_summary(args) -> int:
    records = []
    for path in args.csvs:
        records.extend(bench.read_batch_csv(path))
    print("policy,runs,solved,par2_seconds,par2_conflicts")
    for s in bench.summarize(records, args.timeout, args.max_conflicts).values():
        pc = "" if s.par2_conflicts is None else f"{s.par2_conflicts:.1f}"
        print(f"{s.policy},{s.runs},{s.solved},{s.par2_seconds:.3f},{pc}")
    return 0


def cmd_generate(args) -> int:
    formulas = generate_family(args.family, args.count, seed=args.seed)
    paths = bench.write_family(formulas, args.directory, args.family)
    print(f"c wrote {len(paths)} instances to {args.directory}", file=sys.stderr)
    return 0


COMMANDS = {"solve": cmd_solve, "batch": cmd_batch, "cactus": cmd_cactus,
            "summary": cmd_summary, "generate": cmd_generate}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the contract is 1
        return EXIT_ERROR if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="c %(levelname)s %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, bench.MalformedCSVError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
