"""Command-line front end: prove, check, gen, bench, parse."""

from __future__ import annotations

import argparse
import os
import random
import sys
from pathlib import Path

from . import __version__
from .bench import BENCH_NODE_LIMIT, bench_config, resolve_sources, run_bench, write_csv
from .export import proof_to_dot, proof_to_json, proof_to_text
from .families import ProblemInstance, family_instances, parse_range, random_formula, random_sequent
from .formula import (
    TURNSTILES,
    FormulaSyntaxError,
    UniverseLimitExceeded,
    parse_formula,
    parse_problem_text,
    parse_sequent,
    print_formula,
    print_sequent,
)
from .oracle import DEFAULT_UNIVERSE_CAP, oracle_verdict
from .tableau import LimitExceeded, Signature, StrategyConfig, extract_countermodel, prove

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _use_color(stream) -> bool:
    if os.environ.get("C1KE_COLOR", "auto").lower() == "never":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _paint(word: str, good: bool, stream=None) -> str:
    if not _use_color(stream or sys.stdout):
        return word
    return f"\x1b[{32 if good else 31}m{word}\x1b[0m"


def _err(msg: str) -> None:
    print(f"c1ke: {msg}", file=sys.stderr)


def _read_source(src: str) -> tuple[str, str]:
    if src == "-":
        return sys.stdin.read(), "<stdin>"
    path = Path(src)
    if not path.is_file():
        raise UsageError(f"no such file: {src}")
    return path.read_text(encoding="utf-8"), src


def _load_problems(args) -> list[ProblemInstance]:
    if getattr(args, "sequent", None):
        return [ProblemInstance("cli", 1, parse_sequent(args.sequent), None)]
    if args.file is None:
        raise UsageError("give a problem file, '-' for stdin, or -e SEQUENT")
    text, name = _read_source(args.file)
    stem = Path(name).stem if name != "<stdin>" else "stdin"
    out = []
    for pl in parse_problem_text(text, name):
        n = int(pl.meta.get("n", pl.lineno))
        out.append(ProblemInstance(pl.meta.get("family", stem), n, pl.sequent, pl.expected))
    if not out:
        raise UsageError(f"{name}: no sequents found")
    return out


def _config(args, bench: bool = False) -> StrategyConfig:
    node_limit = args.node_limit or (BENCH_NODE_LIMIT if bench else 10**6)
    return StrategyConfig(
        signature_mode=Signature(args.mode),
        use_derived_rules=not args.no_derived,
        node_limit=node_limit,
        time_limit=args.time_limit,
    )


def _mismatch(verdict_valid: bool, expected: str | None) -> bool:
    return expected is not None and verdict_valid != (expected == "Valid")


def _dot_path(base: str, k: int, total: int) -> Path:
    p = Path(base)
    return p if total == 1 else p.with_name(f"{p.stem}-{k}{p.suffix}")


# --- subcommands ---------------------------------------------------------------

def cmd_prove(args) -> int:
    problems = _load_problems(args)
    cfg = _config(args)
    code = EXIT_OK
    docs = []
    for k, prob in enumerate(problems, 1):
        if len(problems) > 1 and not args.json:
            print(f"== {k}: {print_sequent(prob.sequent)}")
        try:
            result = prove(prob.sequent, cfg)
        except LimitExceeded as e:
            _err(f"problem {k}: {e}")
            st = e.stats
            if not args.json:
                print("LIMIT")
                print(f"nodes={st.formula_nodes} branches={st.branches} pb={st.pb_applications}")
            code = max(code, EXIT_LIMIT) if code != EXIT_MISMATCH else code
            continue
        if _mismatch(result.closed, prob.expected):
            _err(f"problem {k}: expected {prob.expected}, prover says {result.verdict.value}")
            code = EXIT_MISMATCH
        if args.dot:
            _dot_path(args.dot, k, len(problems)).write_text(proof_to_dot(result), encoding="utf-8")
        if args.json:
            docs.append(proof_to_json(result, timing=args.timing))
            continue
        word = "CLOSED" if result.closed else "OPEN"
        print(_paint(word, result.closed))
        st = result.stats
        line = f"nodes={st.formula_nodes} branches={st.branches} pb={st.pb_applications}"
        if args.timing:
            line += f" elapsed_ms={st.elapsed_ms:.3f}"
        print(line)
        if args.verbose:
            sys.stdout.write(proof_to_text(result))
            if not result.closed:
                print("# countermodel read off the open branch")
                for ln in extract_countermodel(result.open_branch).lines():
                    print(ln)
    if args.json:
        if len(docs) == 1:
            print(docs[0])
        else:
            print("[\n" + ",\n".join(docs) + "\n]")
    return code


def cmd_check(args) -> int:
    problems = _load_problems(args)
    code = EXIT_OK
    for k, prob in enumerate(problems, 1):
        if len(problems) > 1:
            print(f"== {k}: {print_sequent(prob.sequent)}")
        try:
            verdict = oracle_verdict(prob.sequent, args.cap)
        except UniverseLimitExceeded as e:
            _err(f"problem {k}: {e}")
            print("LIMIT")
            code = code if code == EXIT_MISMATCH else EXIT_LIMIT
            continue
        print(_paint(verdict.label.upper(), verdict.valid))
        if not verdict.valid:
            print(f"# admissible-assignment certificate over {verdict.universe_size} formulas")
            for ln in verdict.certificate.lines():
                print(ln)
        if _mismatch(verdict.valid, prob.expected):
            _err(f"problem {k}: expected {prob.expected}, oracle says {verdict.label}")
            code = EXIT_MISMATCH
    return code


def cmd_gen(args) -> int:
    if args.family == "random":
        rng = random.Random(args.seed)
        atoms = tuple(args.atoms.split(","))
        if args.formulas:
            lines = [print_formula(random_formula(rng, atoms, args.depth)) for _ in range(args.count)]
        else:
            lines = [print_sequent(random_sequent(rng, atoms, args.depth)) for _ in range(args.count)]
        _emit(lines, args.out, "random")
        return EXIT_OK
    ns = parse_range(args.n) if args.n else ([] if args.family == "medical" else [1])
    instances = family_instances(args.family, ns)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for inst in instances:
            (out / f"{inst.id}.p").write_text(inst.to_line() + "\n", encoding="utf-8")
    else:
        for inst in instances:
            print(inst.to_line())
    return EXIT_OK


def _emit(lines, out, stem):
    if not out:
        for ln in lines:
            print(ln)
        return
    path = Path(out)
    if path.is_dir() or out.endswith("/"):
        path.mkdir(parents=True, exist_ok=True)
        path = path / f"{stem}.p"
    path.write_text("".join(ln + "\n" for ln in lines), encoding="utf-8")


def cmd_bench(args) -> int:
    try:
        problems = resolve_sources(args.sources)
    except ValueError as e:
        raise UsageError(str(e)) from None
    cfg = bench_config(_config(args, bench=True))
    records = run_bench(problems, cfg, args.jobs)
    if args.csv == "-":
        write_csv(records, sys.stdout, timing=not args.no_timing)
    else:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            write_csv(records, fh, timing=not args.no_timing)
    mismatches = [r for r in records if r.mismatch]
    limited = [r for r in records if r.limit_hit]
    for r in mismatches:
        _err(f"{r.id}: expected {r.expected}, prover says {r.verdict}")
    for r in limited:
        _err(f"{r.id}: {r.limit_hit} limit hit")
    print(f"{len(records)} problems, {len(mismatches)} mismatches, {len(limited)} limit hits",
          file=sys.stderr)
    if mismatches:
        return EXIT_MISMATCH
    return EXIT_LIMIT if limited else EXIT_OK


def cmd_parse(args) -> int:
    text, name = _read_source(args.file)
    count = bad = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.partition("#")[0].strip()
        if not body:
            continue
        try:
            if any(ts in body for ts in TURNSTILES):
                s = parse_sequent(body)
                again = parse_sequent(print_sequent(s))
                same = again.conclusion is s.conclusion and len(again.premises) == len(s.premises) \
                    and all(a is b for a, b in zip(again.premises, s.premises))
            else:
                f = parse_formula(body)
                same = parse_formula(print_formula(f)) is f
        except FormulaSyntaxError as e:
            _err(f"{name}:{lineno}: {e}")
            return EXIT_USAGE
        count += 1
        if not same:
            bad += 1
            _err(f"{name}:{lineno}: round trip changed the formula")
    print(f"ok {count - bad}/{count}")
    return EXIT_MISMATCH if bad else EXIT_OK


# --- argument parsing ----------------------------------------------------------

def _add_strategy_opts(p):
    p.add_argument("--mode", choices=[s.value for s in Signature], default="sigma",
                   help="expand @ eagerly (sigma) or keep it as a primitive (sigma-circ)")
    p.add_argument("--no-derived", action="store_true", help="disable the derived two-premiss rules")
    p.add_argument("--node-limit", type=int, default=None, metavar="N")
    p.add_argument("--time-limit", type=float, default=None, metavar="S")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="c1ke", description="KE tableau prover for the logic C1")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="run the tableau prover")
    p.add_argument("file", nargs="?", help="problem file, or '-' for stdin")
    p.add_argument("-e", "--sequent", help="prove a single sequent given inline")
    _add_strategy_opts(p)
    p.add_argument("--json", action="store_true", help="print the proof as JSON")
    p.add_argument("--dot", metavar="OUT", help="write the proof tree as Graphviz DOT")
    p.add_argument("--timing", action="store_true", help="report elapsed time")
    p.add_argument("-v", "--verbose", action="store_true", help="print the proof tree")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("check", help="decide validity with the finite bivaluation oracle")
    p.add_argument("file", nargs="?")
    p.add_argument("-e", "--sequent")
    p.add_argument("--cap", type=int, default=DEFAULT_UNIVERSE_CAP, help="universe size cap")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="generate benchmark problems")
    p.add_argument("family", choices=["phi5", "phi6", "medical", "random"])
    p.add_argument("--n", help="index or range, e.g. 3 or 1..10")
    p.add_argument("--out", help="output directory (one file per problem)")
    p.add_argument("--count", type=int, default=100, help="random: how many")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--atoms", default="P,Q,R")
    p.add_argument("--formulas", action="store_true", help="random: bare formulas instead of sequents")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run problems under limits and write a CSV")
    p.add_argument("sources", nargs="+", help="directories, problem files or specs like phi5:1..10")
    p.add_argument("--csv", default="-", help="output CSV path ('-' for stdout)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="leave elapsed_ms empty")
    _add_strategy_opts(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("parse", help="check that every line parses and reprints identically")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    if getattr(args, "jobs", 1) < 1:
        _err("--jobs must be >= 1")
        return EXIT_USAGE
    try:
        return args.func(args)
    except FormulaSyntaxError as e:
        where = f"{e.filename}:{e.lineno}: " if getattr(e, "filename", None) else ""
        _err(f"{where}syntax error {e.msg}")
        return EXIT_USAGE
    except (UsageError, ValueError) as e:
        _err(str(e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
