"""Batch runs over instance directories and cactus-plot data.

Batch CSV columns (one row per instance x policy, in that nesting order):

    instance, policy, seed, verdict, seconds, conflicts, decisions, restarts, resets

``verdict`` is SAT, UNSAT, INDET or ERROR.  ``seconds`` has millisecond
resolution; every other numeric column is an integer.  ERROR rows carry
zeros in the numeric columns.
"""
from __future__ import annotations

import csv
import gzip
import logging
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

from .engine import Solver, SolverConfig
from .formula import Formula, parse_dimacs

log = logging.getLogger(__name__)

BATCH_COLUMNS = ["instance", "policy", "seed", "verdict", "seconds",
                 "conflicts", "decisions", "restarts", "resets"]
CACTUS_COLUMNS = ["policy", "rank", "seconds"]
SOLVED = ("SAT", "UNSAT")


@dataclass
class BatchRecord:
    instance: str
    policy: str
    seed: int
    verdict: str
    seconds: float
    conflicts: int = 0
    decisions: int = 0
    restarts: int = 0
    resets: int = 0

    def row(self) -> list:
        return [self.instance, self.policy, self.seed, self.verdict, f"{self.seconds:.3f}",
                self.conflicts, self.decisions, self.restarts, self.resets]

    @classmethod
    def from_row(cls, row: dict) -> "BatchRecord":
        try:
            return cls(row["instance"], row["policy"], int(row["seed"]), row["verdict"],
                       float(row["seconds"]), int(row["conflicts"]), int(row["decisions"]),
                       int(row["restarts"]), int(row["resets"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed batch row {row!r}: {exc}") from None

    @property
    def solved(self) -> bool:
        return self.verdict in SOLVED


class MalformedCSVError(ValueError):
    pass


def read_formula(path) -> Formula:
    """Read a DIMACS file, transparently gunzipping ``*.gz``."""
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as fh:
            return parse_dimacs(fh.read())
    return parse_dimacs(path.read_bytes())


def list_instances(directory) -> list[Path]:
    d = Path(directory)
    if not d.is_dir():
        raise NotADirectoryError(f"{directory} is not a directory")
    return sorted(p for p in d.iterdir()
                  if p.is_file() and (p.name.endswith(".cnf") or p.name.endswith(".cnf.gz")))


def run_instance(formula: Formula, config: SolverConfig, name: str = "") -> BatchRecord:
    solver = Solver(formula, config)
    out = solver.solve()
    st = out.stats
    return BatchRecord(name, config.descriptor, config.seed, out.status.value,
                       round(st.elapsed, 3), st.conflicts, st.decisions, st.restarts, st.resets)


def _run_job(job: tuple[str, SolverConfig]) -> BatchRecord:
    path, config = job
    try:
        formula = read_formula(path)
    except (OSError, ValueError) as exc:
        log.error("cannot read %s: %s", path, exc)
        return BatchRecord(path, config.descriptor, config.seed, "ERROR", 0.0)
    return run_instance(formula, config, path)


def _completed_rows(out_path: Path) -> list[dict]:
    """Rows already in ``out_path``; a torn final line is cut off."""
    if not out_path.exists():
        return []
    text = out_path.read_text()
    if text and not text.endswith("\n"):
        text = text[: text.rfind("\n") + 1]
        out_path.write_text(text)
    rows = list(csv.DictReader(text.splitlines()))
    return [r for r in rows if None not in r.values() and len(r) == len(BATCH_COLUMNS)]


def run_batch(instances: Sequence, configs: Sequence[SolverConfig], out_path,
              jobs: int = 1, resume: bool = False) -> list[BatchRecord]:
    """Run every instance under every config and append rows to
    ``out_path`` as they complete, in deterministic order.

    With ``resume`` existing (instance, policy) rows are kept and skipped.
    Returns the records computed by this call.
    """
    out_path = Path(out_path)
    done: set[tuple[str, str]] = set()
    if resume:
        done = {(r["instance"], r["policy"]) for r in _completed_rows(out_path)}
    todo = [(str(inst), cfg) for inst in instances for cfg in configs
            if (str(inst), cfg.descriptor) not in done]

    fresh = not (resume and out_path.exists() and out_path.stat().st_size > 0)
    results = []
    with open(out_path, "w" if fresh else "a", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if fresh:
            writer.writerow(BATCH_COLUMNS)
            fh.flush()
        for rec in _execute(todo, jobs):
            writer.writerow(rec.row())
            fh.flush()
            results.append(rec)
    return results


def _execute(todo: list, jobs: int) -> Iterator[BatchRecord]:
    if jobs <= 1 or len(todo) <= 1:
        for job in todo:
            yield _run_job(job)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map yields in submission order, which keeps the CSV deterministic
        yield from pool.map(_run_job, todo)


def read_batch_csv(path) -> list[BatchRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or list(reader.fieldnames) != BATCH_COLUMNS:
            raise MalformedCSVError(f"{path}: expected columns {BATCH_COLUMNS}, got {reader.fieldnames}")
        try:
            return [BatchRecord.from_row(r) for r in reader]
        except ValueError as exc:
            raise MalformedCSVError(f"{path}: {exc}") from None


def cactus(records: Iterable[BatchRecord]) -> list[tuple[str, int, float]]:
    """(policy, rank, seconds) with each policy's solved times ascending."""
    times: dict[str, list[float]] = defaultdict(list)
    for r in records:
        if r.solved:
            times[r.policy].append(r.seconds)
    out = []
    for policy in sorted(times):
        for rank, t in enumerate(sorted(times[policy]), start=1):
            out.append((policy, rank, t))
    return out


def write_cactus(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CACTUS_COLUMNS)
        for policy, rank, t in rows:
            w.writerow([policy, rank, f"{t:.3f}"])


def par2(costs: Sequence[float], solved: Sequence[bool], limit: float) -> float:
    """Penalized average: unsolved runs count as ``2 * limit``."""
    if not costs:
        return 0.0
    total = sum(c if ok else 2.0 * limit for c, ok in zip(costs, solved))
    return total / len(costs)


@dataclass
class PolicySummary:
    policy: str
    runs: int
    solved: int
    par2_seconds: float
    par2_conflicts: Optional[float] = None


def summarize(records: Iterable[BatchRecord], timeout: float,
              conflict_budget: Optional[int] = None) -> dict[str, PolicySummary]:
    by_policy: dict[str, list[BatchRecord]] = defaultdict(list)
    for r in records:
        by_policy[r.policy].append(r)
    out = {}
    for policy, recs in sorted(by_policy.items()):
        solved = [r.solved for r in recs]
        pc = None
        if conflict_budget is not None:
            pc = par2([r.conflicts for r in recs], solved, conflict_budget)
        out[policy] = PolicySummary(policy, len(recs), sum(solved),
                                    par2([r.seconds for r in recs], solved, timeout), pc)
    return out


def write_family(formulas: Iterable[Formula], directory, prefix: str) -> list[Path]:
    from .formula import to_dimacs

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, f in enumerate(formulas):
        p = d / f"{prefix}-{i:03d}.cnf"
        p.write_text(to_dimacs(f))
        paths.append(p)
    return paths
