"""Bivaluation oracle: brute-force C1 semantics over a finite formula universe.

An assignment gives 0/1 to every formula of a finite domain.  It is
admissible when every semantic clause whose formulas all lie in the domain
holds:

* ``A & B``, ``A | B``, ``A -> B`` are classical;
* ``v(~A) = 0`` implies ``v(A) = 1``;
* ``v(~~A) = 1`` implies ``v(A) = 1``;
* ``v(@A) = 1`` implies ``v(A) = 0`` or ``v(~A) = 0``;
* ``v(@(A o B)) = 0`` implies ``v(@A) = 0`` or ``v(@B) = 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .formula import (
    AND,
    IMP,
    OR,
    Cons,
    Formula,
    Neg,
    Sequent,
    cons_closure_universe,
    cons_shape,
    digest_sorted,
    neg_view,
    print_formula,
)

DEFAULT_UNIVERSE_CAP = 24


@dataclass(frozen=True)
class ValuationAssignment:
    domain: tuple[Formula, ...]       # expanded formulas, digest-sorted
    values: dict                      # digest -> 0/1

    @classmethod
    def from_pairs(cls, pairs) -> ValuationAssignment:
        values, pool = {}, {}
        for f, bit in pairs:
            c = f.canon
            values[c.digest] = int(bit)
            pool[c.digest] = c
        return cls(tuple(pool[d] for d in sorted(values)), values)

    @classmethod
    def from_mapping(cls, mapping: dict) -> ValuationAssignment:
        return cls.from_pairs(mapping.items())

    def __contains__(self, f: Formula) -> bool:
        return f.canon.digest in self.values

    def __getitem__(self, f: Formula) -> int:
        return self.values[f.canon.digest]

    def get(self, f: Formula, default=None):
        return self.values.get(f.canon.digest, default)

    def restrict(self, formulas) -> ValuationAssignment:
        keep = {f.canon.digest for f in formulas}
        return ValuationAssignment(
            tuple(f for f in self.domain if f.digest in keep),
            {d: v for d, v in self.values.items() if d in keep},
        )

    def lines(self, style: str = "ascii") -> list[str]:
        return [f"{print_formula(f, style)} := {self.values[f.digest]}" for f in self.domain]


@dataclass(frozen=True)
class Clause:
    """One clause instance: ``check`` receives the values of ``formulas``."""
    name: str
    formulas: tuple[Formula, ...]
    check: object

    def describe(self) -> str:
        return f"{self.name} on {', '.join(print_formula(f) for f in self.formulas)}"


def _and(v, a, b):
    return v == (a & b)


def _or(v, a, b):
    return v == (a | b)


def _imp(v, a, b):
    return v == ((1 - a) | b)


def _neg(v, a):
    return v == 1 or a == 1


def _negneg(v, a):
    return v == 0 or a == 1


def _cons(v, a, na):
    return v == 0 or a == 0 or na == 0


def _cons_bin(v, ca, cb):
    return v == 1 or ca == 0 or cb == 0


_BIN = {AND: ("and", _and), OR: ("or", _or), IMP: ("imp", _imp)}


def clause_instances(domain) -> list[Clause]:
    """Every clause instance whose formulas all lie in ``domain``."""
    dom = {f.canon for f in domain}
    out = []
    for f in digest_sorted(dom):
        if f.kind in _BIN:
            name, fn = _BIN[f.kind]
            if f.left in dom and f.right in dom:
                out.append(Clause(name, (f, f.left, f.right), fn))
            continue
        x = neg_view(f)
        if x is None:
            continue
        if x in dom:
            out.append(Clause("neg", (f, x), _neg))
        y = neg_view(x)
        if y is not None and y.canon in dom:
            out.append(Clause("negneg", (f, y.canon), _negneg))
        a = cons_shape(f)
        if a is None:
            continue
        na = Neg(a).canon
        if a in dom and na in dom:
            out.append(Clause("cons", (f, a.canon, na), _cons))
        if a.is_binary:
            ca, cb = Cons(a.left).canon, Cons(a.right).canon
            if ca in dom and cb in dom:
                out.append(Clause("cons_" + _BIN[a.kind][0], (f, ca, cb), _cons_bin))
    return out


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    violation: str | None = None

    def __bool__(self):
        return self.ok


def admissible(a: ValuationAssignment) -> Admissibility:
    for clause in clause_instances(a.domain):
        if not clause.check(*(a[f] for f in clause.formulas)):
            return Admissibility(False, clause.describe())
    return Admissibility(True)


# --- validity -----------------------------------------------------------------

@dataclass(frozen=True)
class OracleVerdict:
    valid: bool
    certificate: ValuationAssignment | None = None
    universe_size: int = 0

    @property
    def label(self) -> str:
        return "Valid" if self.valid else "Invalid"

    def __str__(self):
        return self.label


def _constraints(s: Sequent):
    return [(p.canon, 1) for p in s.premises] + [(s.conclusion.canon, 0)]


def oracle_verdict(s: Sequent, cap: int | None = DEFAULT_UNIVERSE_CAP) -> OracleVerdict:
    """Search admissible assignments over the universe in lexicographic order.

    Formulas are ordered by digest, 0 before 1, first formula most
    significant.  Partial assignments are cut as soon as a clause whose
    formulas are all assigned fails, so the first countermodel found is the
    same one plain enumeration of all ``2**n`` assignments would report.
    """
    universe = digest_sorted(cons_closure_universe(s, cap))
    n = len(universe)
    pos = {f: i for i, f in enumerate(universe)}
    checks = [[] for _ in range(n)]
    for clause in clause_instances(universe):
        idx = tuple(pos[f] for f in clause.formulas)
        checks[max(idx)].append((clause.check, idx))
    forced = {}
    for f, bit in _constraints(s):
        if forced.get(pos[f], bit) != bit:
            return OracleVerdict(True, None, n)
        forced[pos[f]] = bit

    vals = [0] * n

    def search(i):
        if i == n:
            return True
        for bit in ((forced[i],) if i in forced else (0, 1)):
            vals[i] = bit
            if all(fn(*(vals[j] for j in idx)) for fn, idx in checks[i]) and search(i + 1):
                return True
        return False

    if search(0):
        cert = ValuationAssignment(tuple(universe), {f.digest: vals[i] for i, f in enumerate(universe)})
        return OracleVerdict(False, cert, n)
    return OracleVerdict(True, None, n)


def oracle_verdict_naive(s: Sequent, cap: int | None = 16) -> OracleVerdict:
    """Plain enumeration of every assignment; reference for small universes."""
    universe = digest_sorted(cons_closure_universe(s, cap))
    clauses = clause_instances(universe)
    want = _constraints(s)
    for bits in itertools.product((0, 1), repeat=len(universe)):
        a = ValuationAssignment(tuple(universe), {f.digest: b for f, b in zip(universe, bits)})
        if any(a[f] != bit for f, bit in want):
            continue
        if all(c.check(*(a[f] for f in c.formulas)) for c in clauses):
            return OracleVerdict(False, a, len(universe))
    return OracleVerdict(True, None, len(universe))


def classical_valid(s: Sequent) -> bool:
    """Truth-table validity treating every connective classically."""
    atoms = sorted({g.name for f in s.formulas for g in _walk(f.canon) if g.is_atom})

    def ev(f, env):
        k = f.kind
        if k == "atom":
            return env[f.name]
        if k == "neg":
            return 1 - ev(f.inner, env)
        a, b = ev(f.left, env), ev(f.right, env)
        return {AND: a & b, OR: a | b, IMP: (1 - a) | b}[k]

    for bits in itertools.product((0, 1), repeat=len(atoms)):
        env = dict(zip(atoms, bits))
        if all(ev(p.canon, env) for p in s.premises) and not ev(s.conclusion.canon, env):
            return False
    return True


def _walk(f):
    yield f
    for a in f.args:
        yield from _walk(a)


# --- agreement ------------------------------------------------------------------

@dataclass(frozen=True)
class AgreementReport:
    sequent: Sequent
    prover_verdict: str
    oracle: OracleVerdict
    countermodel: ValuationAssignment | None = None
    countermodel_admissible: Admissibility | None = None

    @property
    def agree(self) -> bool:
        return (self.prover_verdict == "Closed") == self.oracle.valid

    @property
    def ok(self) -> bool:
        return self.agree and (self.countermodel_admissible is None or bool(self.countermodel_admissible))


def cross_check(s: Sequent, cfg=None, cap: int | None = DEFAULT_UNIVERSE_CAP) -> AgreementReport:
    from .tableau import extract_countermodel, prove

    result = prove(s, cfg)
    oracle = oracle_verdict(s, cap)
    model = adm = None
    if not result.closed:
        model = extract_countermodel(result.open_branch)
        adm = admissible(model)
        if adm and (any(model.get(p) != 1 for p in s.premises) or model.get(s.conclusion) != 0):
            adm = Admissibility(False, "countermodel does not refute the sequent")
    return AgreementReport(s, result.verdict.value, oracle, model, adm)
