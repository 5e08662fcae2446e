"""Benchmark runner: run problems under limits, collect one record each, write CSV."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .families import ProblemInstance, family_instances, parse_range
from .formula import parse_problem_text
from .tableau import LimitExceeded, StrategyConfig, prove

CSV_COLUMNS = (
    "id", "family", "n", "verdict", "expected", "nodes", "branches", "pb",
    "rule_applications", "elapsed_ms", "peak_stack", "limit_hit",
)

BENCH_TIME_LIMIT = 60.0
BENCH_NODE_LIMIT = 10**6


@dataclass(frozen=True)
class BenchRecord:
    id: str
    family: str
    n: int
    verdict: str | None
    expected: str | None
    nodes: int
    branches: int
    pb: int
    rule_applications: int
    elapsed_ms: float
    peak_stack: int
    limit_hit: str | None = None

    @property
    def timed_out(self) -> bool:
        return self.limit_hit == "time"

    @property
    def mismatch(self) -> bool:
        if self.verdict is None or self.expected is None:
            return False
        return (self.verdict == "Closed") != (self.expected == "Valid")

    def row(self, timing: bool = True) -> list:
        return [
            self.id, self.family, self.n, self.verdict or "", self.expected or "",
            self.nodes, self.branches, self.pb, self.rule_applications,
            f"{self.elapsed_ms:.3f}" if timing else "", self.peak_stack, self.limit_hit or "",
        ]


def bench_config(cfg: StrategyConfig | None = None) -> StrategyConfig:
    """Fill in the bench defaults (60 s, 10**6 nodes) where ``cfg`` leaves them open."""
    cfg = cfg or StrategyConfig(node_limit=BENCH_NODE_LIMIT)
    if cfg.time_limit is None:
        cfg = replace(cfg, time_limit=BENCH_TIME_LIMIT)
    return cfg


def run_one(problem: ProblemInstance, cfg: StrategyConfig) -> BenchRecord:
    try:
        result = prove(problem.sequent, cfg)
    except LimitExceeded as e:
        st = e.stats
        return BenchRecord(problem.id, problem.family, problem.index, None, problem.expected,
                           st.formula_nodes, st.branches, st.pb_applications,
                           st.total_rule_applications, st.elapsed_ms, st.peak_open_stack, e.kind)
    st = result.stats
    return BenchRecord(problem.id, problem.family, problem.index, result.verdict.value,
                       problem.expected, st.formula_nodes, st.branches, st.pb_applications,
                       st.total_rule_applications, st.elapsed_ms, st.peak_open_stack)


def _run_packed(args):
    return run_one(*args)


def run_bench(problems, cfg: StrategyConfig | None = None, jobs: int = 1) -> list[BenchRecord]:
    """Run every problem; records come back sorted by id whatever ``jobs`` is."""
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    cfg = bench_config(cfg)
    problems = list(problems)
    if jobs == 1 or len(problems) <= 1:
        records = [run_one(p, cfg) for p in problems]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_packed, [(p, cfg) for p in problems]))
    return sorted(records, key=lambda r: r.id)


def write_csv(records, out, timing: bool = True) -> None:
    w = csv.writer(out, lineterminator="\r\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row(timing))


def records_to_csv(records, timing: bool = True) -> str:
    buf = io.StringIO()
    write_csv(records, buf, timing)
    return buf.getvalue()


def problems_from_file(path: Path) -> list[ProblemInstance]:
    lines = parse_problem_text(path.read_text(encoding="utf-8"), str(path))
    out = []
    for pl in lines:
        meta = pl.meta
        family = meta.get("family", path.stem)
        n = int(meta.get("n", pl.lineno))
        pid = meta.get("id")
        inst = ProblemInstance(family, n, pl.sequent, pl.expected)
        if pid and pid != inst.id:
            inst = _Named(family, n, pl.sequent, pl.expected, pid)
        out.append(inst)
    return out


@dataclass(frozen=True)
class _Named(ProblemInstance):
    name: str = ""

    @property
    def id(self) -> str:
        return self.name


def resolve_sources(specs) -> list[ProblemInstance]:
    """Turn ``phi5:1..10``, ``medical``, directories and files into problems."""
    problems = []
    for spec in specs:
        path = Path(spec)
        if path.is_dir():
            for f in sorted(p for p in path.iterdir() if p.is_file()):
                problems.extend(problems_from_file(f))
        elif path.is_file():
            problems.extend(problems_from_file(path))
        else:
            family, _, rng = spec.partition(":")
            if family not in ("phi5", "phi6", "medical"):
                raise ValueError(f"unknown problem source {spec!r}")
            problems.extend(family_instances(family, parse_range(rng) if rng else []))
    return problems
