"""Benchmark problem families, the medical knowledge-base fixtures, and random sequents."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .formula import (
    And,
    Atom,
    Cons,
    Formula,
    Imp,
    Neg,
    Or,
    Sequent,
    big_and,
    big_or,
    format_problem_line,
    make,
)

VALID, INVALID = "Valid", "Invalid"


@dataclass(frozen=True)
class ProblemInstance:
    family: str
    index: int
    sequent: Sequent
    expected: str | None

    @property
    def id(self) -> str:
        return f"{self.family}-{self.index:03d}"

    def to_line(self) -> str:
        meta = {"id": self.id, "family": self.family, "n": self.index}
        if self.expected:
            meta["expected"] = self.expected.lower()
        return format_problem_line(self.sequent, **meta)


def _atoms(prefix, lo, hi):
    return {i: Atom(f"{prefix}{i}") for i in range(lo, hi + 1)}


def gen_phi5(n: int) -> ProblemInstance:
    """Phi5 instance n; closing it needs the T~~ rule."""
    if n < 1:
        raise ValueError("n must be >= 1")
    A, B = _atoms("A", 1, n + 1), _atoms("B", 1, n)
    last = A[n + 1]
    premises = (
        Cons(A[1]),
        big_and(A[i] for i in range(1, n + 1)),
        big_and(Imp(last, Imp(Or(A[i], B[i]), Cons(A[i + 1]))) for i in range(1, n + 1)),
        Imp(big_and(Cons(A[i]) for i in range(1, n + 1)), Neg(last)),
    )
    return ProblemInstance("phi5", n, Sequent(premises, Neg(Neg(Neg(last)))), VALID)


def gen_phi6(n: int) -> ProblemInstance:
    """Phi6 instance n; closing it needs an F@ rule.

    The goal's outer disjunction is folded into the right-nested chain
    ``@(A2 -> C1) | ... | @(An+1 -> Cn) | D``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    A, B, C = _atoms("A", 1, n + 1), _atoms("B", 1, n), _atoms("C", 1, n)
    D = Atom("D")
    rng = range(1, n + 1)
    premises = (
        big_and(B[i] for i in rng),
        big_and(Cons(C[i]) for i in rng),
        big_and(Imp(Or(A[i], B[i]), Cons(A[i + 1])) for i in rng),
        Imp(big_and(C[i] for i in rng), And(D, Neg(C[1]))),
    )
    goal = big_or([Cons(Imp(A[i + 1], C[i])) for i in rng] + [D])
    return ProblemInstance("phi6", n, Sequent(premises, goal), VALID)


def medical_rules() -> tuple[Formula, ...]:
    K, L, M, N, O = (Atom(x) for x in "KLMNO")
    return (Imp(K, Neg(L)), Imp(L, Neg(K)), Imp(K, M), Imp(N, K), Imp(O, L))


def medical_cases() -> list[ProblemInstance]:
    K, L, M, N, O = (Atom(x) for x in "KLMNO")
    rules = medical_rules()
    cases = [
        (rules + (N,), And(K, Neg(L)), VALID),
        (rules + (N, O), And(K, L), VALID),
        (rules + (N, O), Neg(M), INVALID),
        (rules + (N, O), And(K, Neg(Cons(K))), VALID),
    ]
    return [ProblemInstance("medical", i, Sequent(p, g), e) for i, (p, g, e) in enumerate(cases, 1)]


GENERATORS = {"phi5": gen_phi5, "phi6": gen_phi6}


def family_instances(family: str, ns) -> list[ProblemInstance]:
    if family == "medical":
        wanted = set(ns) if ns else None
        return [c for c in medical_cases() if wanted is None or c.index in wanted]
    return [GENERATORS[family](n) for n in ns]


def parse_range(text: str) -> list[int]:
    """``"3"`` -> [3], ``"1..10"`` -> [1, ..., 10], ``"1,4,7"`` -> [1, 4, 7]."""
    out = []
    for part in text.split(","):
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out or min(out) < 1:
        raise ValueError(f"bad index range {text!r}")
    return out


# --- random corpus -------------------------------------------------------------

_KINDS = ("neg", "cons", "and", "or", "imp")


def random_formula(rng: random.Random, atoms=("P", "Q", "R"), depth: int = 4,
                   leaf_prob: float = 0.3) -> Formula:
    if depth <= 0 or rng.random() < leaf_prob:
        return Atom(rng.choice(atoms))
    kind = rng.choice(_KINDS)
    if kind in ("neg", "cons"):
        return make(kind, random_formula(rng, atoms, depth - 1, leaf_prob))
    return make(kind, random_formula(rng, atoms, depth - 1, leaf_prob),
                random_formula(rng, atoms, depth - 1, leaf_prob))


def random_sequent(rng: random.Random, atoms=("P", "Q", "R"), depth: int = 4,
                   max_premises: int = 3) -> Sequent:
    k = rng.randint(0, max_premises)
    premises = tuple(random_formula(rng, atoms, depth) for _ in range(k))
    return Sequent(premises, random_formula(rng, atoms, depth))
