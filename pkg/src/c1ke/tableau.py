"""Branches, depth-first KE proof search, and countermodel read-off."""

from __future__ import annotations

import enum
import heapq
import time
from collections import Counter
from dataclasses import dataclass, field

from .formula import Cons, Formula, Sequent, cons_closure, cons_shape
from .rules import (
    DERIVED_TWO_PREMISS,
    F,
    RuleApplication,
    RuleId,
    SignedFormula,
    T,
    apply_one_premiss,
    two_premiss_table,
)


class Signature(enum.Enum):
    SIGMA = "sigma"
    SIGMA_CIRC = "sigma-circ"


class Verdict(enum.Enum):
    CLOSED = "Closed"
    OPEN = "Open"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class StrategyConfig:
    signature_mode: Signature = Signature.SIGMA
    use_derived_rules: bool = True
    pb_selection: str = "smallest"
    witness_pb: bool = True
    node_limit: int = 10**6
    time_limit: float | None = None

    def __post_init__(self):
        if self.node_limit <= 0:
            raise ValueError("node_limit must be positive")
        if self.pb_selection not in PB_POLICIES:
            raise ValueError(f"unknown pb_selection {self.pb_selection!r}")

    def as_dict(self) -> dict:
        return {
            "signature_mode": self.signature_mode.value,
            "use_derived_rules": self.use_derived_rules,
            "pb_selection": self.pb_selection,
            "witness_pb": self.witness_pb,
            "node_limit": self.node_limit,
            "time_limit": self.time_limit,
        }


PB_POLICIES = ("smallest", "first")


@dataclass
class ProofStats:
    formula_nodes: int = 0
    branches: int = 1
    pb_applications: int = 0
    rule_applications: Counter = field(default_factory=Counter)
    elapsed: float = 0.0
    peak_open_stack: int = 0

    @property
    def elapsed_ms(self) -> float:
        return self.elapsed * 1000.0

    @property
    def total_rule_applications(self) -> int:
        return sum(self.rule_applications.values())

    def rule_counts(self) -> dict[str, int]:
        return {r.value: self.rule_applications.get(r, 0) for r in RuleId if r is not RuleId.PB}


class LimitExceeded(Exception):
    kind = "limit"

    def __init__(self, message: str, stats: ProofStats):
        super().__init__(message)
        self.stats = stats


class NodeLimitExceeded(LimitExceeded):
    kind = "node"


class TimeLimitExceeded(LimitExceeded):
    kind = "time"


class NotSaturated(Exception):
    pass


# --- proof tree ----------------------------------------------------------------

@dataclass
class FormulaNode:
    id: int
    sf: SignedFormula
    rule: RuleId | None = None          # None for premises
    premiss_refs: tuple[int, ...] = ()


@dataclass
class Closure:
    refs: tuple[int, int]                # (T X, F X) node ids


@dataclass
class Split:
    pb_formula: Formula
    candidate_ref: int | None            # main premiss motivating the split
    left: Segment
    right: Segment


OPEN_END = "open"
UNEXPLORED = "unexplored"


@dataclass
class Segment:
    """A maximal run of formula nodes between two branching points."""
    nodes: list[FormulaNode] = field(default_factory=list)
    end: Closure | Split | str | None = None


# --- branches ------------------------------------------------------------------

class Branch:
    """Ordered signed formulas of one tableau branch plus bookkeeping.

    ``analysed`` holds the positions already used as main premiss of a
    two-premiss rule.  One-premiss rules are tracked separately by
    ``one_ptr``: an F-negation that is also an F-consistency formula must
    stay available to the two-premiss rules after F~ has fired on it.
    """

    def __init__(self, use_derived: bool = True):
        self.use_derived = use_derived
        self.entries: list[SignedFormula] = []
        self.node_ids: list[int] = []
        self.index: dict[tuple, int] = {}
        self.analysed: set[int] = set()
        self.one_ptr = 0
        self.closure: tuple[int, int] | None = None
        self.saturated = False
        self._tables: list[tuple] = []
        self._waiting: dict[tuple, list[int]] = {}
        self._ready: list[int] = []

    @classmethod
    def from_entries(cls, entries, use_derived: bool = True) -> Branch:
        b = cls(use_derived)
        for sf in entries:
            b.add(sf)
        return b

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, sf: SignedFormula):
        return sf.key in self.index

    @property
    def closed(self) -> bool:
        return self.closure is not None

    def position(self, sf: SignedFormula) -> int | None:
        return self.index.get(sf.key)

    def decided(self, f: Formula) -> bool:
        c = f.canon
        return (T, c) in self.index or (F, c) in self.index

    def add(self, sf: SignedFormula, node_id: int | None = None) -> int | None:
        """Append ``sf`` unless present; returns its new position or None."""
        key = sf.key
        if key in self.index:
            return None
        pos = len(self.entries)
        self.entries.append(sf)
        self.node_ids.append(pos if node_id is None else node_id)
        self.index[key] = pos
        other = self.index.get((sf.sign.flip(), key[1]))
        if other is not None and self.closure is None:
            t, f = (pos, other) if sf.sign is T else (other, pos)
            self.closure = (t, f)
        table = tuple(row for row in two_premiss_table(sf)
                      if self.use_derived or row[0] not in DERIVED_TWO_PREMISS)
        self._tables.append(table)
        for _, minor, _ in table:
            if minor.key in self.index:
                heapq.heappush(self._ready, pos)
            else:
                self._waiting.setdefault(minor.key, []).append(pos)
        for main_pos in self._waiting.pop(key, ()):
            heapq.heappush(self._ready, main_pos)
        return pos

    def table(self, pos: int) -> tuple:
        return self._tables[pos]

    def next_two_premiss(self):
        """First fireable (main position, rule, minor position, conclusion)."""
        while self._ready:
            pos = self._ready[0]
            if pos in self.analysed:
                heapq.heappop(self._ready)
                continue
            for rule, minor, concl in self._tables[pos]:
                mpos = self.index.get(minor.key)
                if mpos is not None:
                    return pos, rule, mpos, concl
            heapq.heappop(self._ready)
        return None

    def copy(self) -> Branch:
        b = Branch.__new__(Branch)
        b.use_derived = self.use_derived
        b.entries = list(self.entries)
        b.node_ids = list(self.node_ids)
        b.index = dict(self.index)
        b.analysed = set(self.analysed)
        b.one_ptr = self.one_ptr
        b.closure = self.closure
        b.saturated = False
        b._tables = list(self._tables)
        b._waiting = {k: list(v) for k, v in self._waiting.items()}
        b._ready = list(self._ready)
        return b


# --- strategy ------------------------------------------------------------------

@dataclass
class ProofResult:
    verdict: Verdict
    sequent: Sequent
    config: StrategyConfig
    root: Segment
    open_branch: Branch | None
    stats: ProofStats
    applications: list[RuleApplication]
    nodes: dict[int, FormulaNode]

    @property
    def closed(self) -> bool:
        return self.verdict is Verdict.CLOSED


def _prepare(f: Formula, cfg: StrategyConfig) -> Formula:
    return f.canon if cfg.signature_mode is Signature.SIGMA else f


def initial_entries(s: Sequent, cfg: StrategyConfig | None = None) -> list[SignedFormula]:
    cfg = cfg or StrategyConfig()
    out = [SignedFormula(T, _prepare(p, cfg)) for p in s.premises]
    out.append(SignedFormula(F, _prepare(s.conclusion, cfg)))
    return out


def init_tableau(s: Sequent, cfg: StrategyConfig | None = None) -> Branch:
    cfg = cfg or StrategyConfig()
    return Branch.from_entries(initial_entries(s, cfg), cfg.use_derived_rules)


class _Search:
    def __init__(self, cfg: StrategyConfig):
        self.cfg = cfg
        self.stats = ProofStats()
        self.applications: list[RuleApplication] = []
        self.nodes: dict[int, FormulaNode] = {}
        self.started = time.perf_counter()
        self.deadline = None if cfg.time_limit is None else self.started + cfg.time_limit
        self._tick = 0

    def check_time(self):
        self._tick += 1
        if self.deadline is not None and self._tick % 64 == 0 and time.perf_counter() > self.deadline:
            self.stats.elapsed = time.perf_counter() - self.started
            raise TimeLimitExceeded(f"time limit of {self.cfg.time_limit}s exceeded", self.stats)

    def push(self, branch: Branch, seg: Segment, sf: SignedFormula,
             rule: RuleId | None, refs: tuple[int, ...]) -> int | None:
        if sf.key in branch.index:
            return None
        if self.stats.formula_nodes >= self.cfg.node_limit:
            self.stats.elapsed = time.perf_counter() - self.started
            raise NodeLimitExceeded(f"node limit of {self.cfg.node_limit} exceeded", self.stats)
        node = FormulaNode(self.stats.formula_nodes, sf, rule, refs)
        self.stats.formula_nodes += 1
        self.nodes[node.id] = node
        seg.nodes.append(node)
        return branch.add(sf, node.id)

    def fire(self, branch: Branch, seg: Segment, app: RuleApplication, refs: tuple[int, ...]) -> bool:
        added = False
        for c in app.conclusions:
            if self.push(branch, seg, c, app.rule, refs) is not None:
                added = True
            if branch.closed:
                break
        if added:
            self.applications.append(app)
            self.stats.rule_applications[app.rule] += 1
        return added

    def fire_two(self, branch: Branch, seg: Segment, pos: int, rule: RuleId, mpos: int, concl: SignedFormula):
        branch.analysed.add(pos)
        main, minor = branch.entries[pos], branch.entries[mpos]
        app = RuleApplication(rule, main, minor, (concl,))
        self.fire(branch, seg, app, (branch.node_ids[pos], branch.node_ids[mpos]))

    def saturate(self, branch: Branch, seg: Segment) -> None:
        while not branch.closed:
            self.check_time()
            if branch.one_ptr < len(branch.entries):
                pos = branch.one_ptr
                branch.one_ptr += 1
                app = apply_one_premiss(branch.entries[pos])
                if app is not None:
                    self.fire(branch, seg, app, (branch.node_ids[pos],))
                continue
            nxt = branch.next_two_premiss()
            if nxt is None:
                return
            self.fire_two(branch, seg, *nxt)


def saturate_linear(b: Branch, cfg: StrategyConfig | None = None):
    """Apply linear rules to ``b`` in place until saturation or closure.

    Returns ``(b, applications, closed)``.
    """
    search = _Search(cfg or StrategyConfig())
    search.stats.formula_nodes = max(b.node_ids, default=-1) + 1
    search.saturate(b, Segment())
    return b, search.applications, b.closed


def select_pb(b: Branch, cfg: StrategyConfig | None = None):
    """Pick ``(candidate position, rule, pb formula)`` for a restricted PB, or None.

    Candidates are unanalysed entries heading a two-premiss rule whose minor
    is undecided on the branch.
    """
    cfg = cfg or StrategyConfig()
    best = None
    for pos in range(len(b.entries)):
        if pos in b.analysed:
            continue
        for k, (rule, minor, _) in enumerate(b.table(pos)):
            if b.decided(minor.formula):
                continue
            if cfg.pb_selection == "first":
                return pos, rule, minor.formula
            key = (minor.formula.size, pos, k)
            if best is None or key < best[0]:
                best = (key, (pos, rule, minor.formula))
    return None if best is None else best[1]


def select_witness_pb(b: Branch, cfg: StrategyConfig | None = None) -> Formula | None:
    """Smallest undecided ``@(A o B)`` in the consistency closure of the branch.

    Needed after restricted PB is exhausted: an undecided ``@(A o B)`` whose
    parts are already fixed can still be forced false by the semantics,
    which a restricted-PB branch never notices.
    """
    cfg = cfg or StrategyConfig()
    pool = [g for g in cons_closure(sf.formula for sf in b.entries)
            if not b.decided(g) and (x := cons_shape(g)) is not None and x.is_binary]
    if not pool:
        return None
    g = min(pool, key=lambda h: (h.size, h.digest))
    return Cons(cons_shape(g)) if cfg.signature_mode is Signature.SIGMA_CIRC else g


def prove(s: Sequent, cfg: StrategyConfig | None = None) -> ProofResult:
    """Run the depth-first KE strategy on ``s``.

    Saturate the current branch with linear rules; on closure pop the next
    open branch off a LIFO stack; on linear saturation apply PB (left child
    ``T A`` continues, right child ``F A`` is stacked).  The tableau is open
    as soon as some branch is saturated with no PB left to apply.
    """
    cfg = cfg or StrategyConfig()
    search = _Search(cfg)
    root = Segment()
    branch = Branch(cfg.use_derived_rules)
    for sf in initial_entries(s, cfg):
        search.push(branch, root, sf, None, ())
    stack: list[tuple[Branch, Segment, tuple | None]] = []
    seg, pending = root, None
    open_branch = None

    while True:
        if pending is not None and not branch.closed:
            pos, rule = pending
            for r, minor, concl in branch.table(pos):
                mpos = branch.position(minor)
                if r is rule and mpos is not None and pos not in branch.analysed:
                    search.fire_two(branch, seg, pos, rule, mpos, concl)
                    break
        search.saturate(branch, seg)
        if branch.closed:
            t, f = branch.closure
            seg.end = Closure((branch.node_ids[t], branch.node_ids[f]))
            if not stack:
                break
            branch, seg, pending = stack.pop()
            continue

        pick = select_pb(branch, cfg)
        cand_ref = None
        if pick is not None:
            pos, rule, pb = pick
            cand_ref = branch.node_ids[pos]
            motive = (pos, rule)
        else:
            pb = select_witness_pb(branch, cfg) if cfg.witness_pb else None
            motive = None
        if pb is None:
            branch.saturated = True
            seg.end = OPEN_END
            open_branch = branch
            for _, s_seg, _ in stack:
                s_seg.end = UNEXPLORED
            break

        search.stats.pb_applications += 1
        search.stats.branches += 1
        left, right = Segment(), Segment()
        seg.end = Split(pb, cand_ref, left, right)
        rbranch = branch.copy()
        search.push(branch, left, SignedFormula(T, pb), RuleId.PB, ())
        search.push(rbranch, right, SignedFormula(F, pb), RuleId.PB, ())
        stack.append((rbranch, right, motive))
        search.stats.peak_open_stack = max(search.stats.peak_open_stack, len(stack))
        seg, pending = left, motive

    search.stats.elapsed = time.perf_counter() - search.started
    verdict = Verdict.OPEN if open_branch is not None else Verdict.CLOSED
    return ProofResult(verdict, s, cfg, root, open_branch, search.stats,
                       search.applications, search.nodes)


def extract_countermodel(b: Branch):
    """Read the valuation off an open, saturated, PB-exhausted branch."""
    from .oracle import ValuationAssignment

    if b.closed:
        raise NotSaturated("branch is closed")
    if not b.saturated:
        raise NotSaturated("branch has not been saturated and PB-exhausted by the prover")
    return ValuationAssignment.from_pairs(
        (sf.formula, 1 if sf.sign is T else 0) for sf in b.entries
    )


def iter_segments(seg: Segment):
    yield seg
    if isinstance(seg.end, Split):
        yield from iter_segments(seg.end.left)
        yield from iter_segments(seg.end.right)


def leaves(seg: Segment) -> list[Segment]:
    return [s for s in iter_segments(seg) if not isinstance(s.end, Split)]


def branch_formulas(result: ProofResult) -> list[list[SignedFormula]]:
    """Signed formulas along every root-to-leaf path of the proof tree."""
    out = []

    def walk(seg, acc):
        acc = acc + [n.sf for n in seg.nodes]
        if isinstance(seg.end, Split):
            walk(seg.end.left, acc)
            walk(seg.end.right, acc)
        else:
            out.append(acc)

    walk(result.root, [])
    return out


__all__ = [
    "Branch", "Closure", "FormulaNode", "LimitExceeded", "NodeLimitExceeded",
    "NotSaturated", "OPEN_END", "ProofResult", "ProofStats", "Segment", "Signature",
    "Split", "StrategyConfig", "TimeLimitExceeded", "UNEXPLORED", "Verdict",
    "branch_formulas", "extract_countermodel", "init_tableau", "initial_entries",
    "iter_segments", "leaves", "prove", "saturate_linear", "select_pb",
    "select_witness_pb",
]
