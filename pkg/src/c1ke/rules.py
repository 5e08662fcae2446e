"""The C1 KE rule catalog and premiss matching.

Linear rules (``A``, ``B`` arbitrary; ``@X`` also matches ``~(X & ~X)``)::

    F A->B  / T A, F B            T A&B  / T A, T B          F A|B / F A, F B
    F ~A    / T A                 T ~~A  / T A
    T A->B, T A / T B      (t_imp_1)      T A->B, F B / F A      (t_imp_2)
    F A&B,  T A / F B      (f_and_1)      F A&B,  T B / F A      (f_and_2)
    T A|B,  F A / T B      (t_or_1)       T A|B,  F B / T A      (t_or_2)
    T @A,   T ~A / F A     (t_neg_cons)
    F @(A o B), T @A / F @B  (f_cons_o_1) F @(A o B), T @B / F @A  (f_cons_o_2)

for o in {&, |, ->}.  The ``_2`` variants are derivable from the ``_1``
variants with PB.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .formula import AND, IMP, NEG, OR, Cons, Formula, Neg, cons_shape, neg_view, print_formula


class Sign(enum.Enum):
    T = "T"
    F = "F"

    def flip(self) -> Sign:
        return Sign.F if self is Sign.T else Sign.T

    def __str__(self):
        return self.value


T, F = Sign.T, Sign.F


@dataclass(frozen=True, eq=False)
class SignedFormula:
    sign: Sign
    formula: Formula

    @property
    def key(self) -> tuple[Sign, Formula]:
        return (self.sign, self.formula.canon)

    def __eq__(self, other):
        if not isinstance(other, SignedFormula):
            return NotImplemented
        return self.sign is other.sign and self.formula == other.formula

    def __hash__(self):
        return hash((self.sign, self.formula))

    def __str__(self):
        return f"{self.sign} {print_formula(self.formula)}"

    def __repr__(self):
        return f"<{self}>"


def conjugate(sf: SignedFormula) -> SignedFormula:
    return SignedFormula(sf.sign.flip(), sf.formula)


class RuleId(enum.Enum):
    F_IMP = "f_imp"
    T_AND = "t_and"
    F_OR = "f_or"
    F_NEG = "f_neg"
    T_NEG_NEG = "t_neg_neg"
    T_IMP_1 = "t_imp_1"
    F_AND_1 = "f_and_1"
    T_OR_1 = "t_or_1"
    T_NEG_CONS = "t_neg_cons"
    F_CONS_AND_1 = "f_cons_and_1"
    F_CONS_OR_1 = "f_cons_or_1"
    F_CONS_IMP_1 = "f_cons_imp_1"
    T_IMP_2 = "t_imp_2"
    F_AND_2 = "f_and_2"
    T_OR_2 = "t_or_2"
    F_CONS_AND_2 = "f_cons_and_2"
    F_CONS_OR_2 = "f_cons_or_2"
    F_CONS_IMP_2 = "f_cons_imp_2"
    PB = "pb"

    def __str__(self):
        return self.value


ONE_PREMISS = frozenset({RuleId.F_IMP, RuleId.T_AND, RuleId.F_OR, RuleId.F_NEG, RuleId.T_NEG_NEG})
ESSENTIAL_TWO_PREMISS = frozenset({
    RuleId.T_IMP_1, RuleId.F_AND_1, RuleId.T_OR_1, RuleId.T_NEG_CONS,
    RuleId.F_CONS_AND_1, RuleId.F_CONS_OR_1, RuleId.F_CONS_IMP_1,
})
DERIVED_TWO_PREMISS = frozenset({
    RuleId.T_IMP_2, RuleId.F_AND_2, RuleId.T_OR_2,
    RuleId.F_CONS_AND_2, RuleId.F_CONS_OR_2, RuleId.F_CONS_IMP_2,
})
BRANCHING = frozenset({RuleId.PB})
TWO_PREMISS = ESSENTIAL_TWO_PREMISS | DERIVED_TWO_PREMISS
F_CONS_RULES = frozenset(r for r in TWO_PREMISS if r.value.startswith("f_cons"))


def catalog_counts() -> tuple[int, int, int, int]:
    return len(ONE_PREMISS), len(ESSENTIAL_TWO_PREMISS), len(DERIVED_TWO_PREMISS), len(BRANCHING)


def check_catalog():
    counts = catalog_counts()
    assert counts == (5, 7, 6, 1), counts
    groups = (ONE_PREMISS, ESSENTIAL_TWO_PREMISS, DERIVED_TWO_PREMISS, BRANCHING)
    assert sum(map(len, groups)) == len(RuleId)
    assert frozenset().union(*groups) == frozenset(RuleId)


check_catalog()


@dataclass(frozen=True)
class RuleApplication:
    rule: RuleId
    main: SignedFormula
    minor: SignedFormula | None
    conclusions: tuple[SignedFormula, ...]

    def __str__(self):
        prem = str(self.main) if self.minor is None else f"{self.main}, {self.minor}"
        return f"{self.rule}: {prem} / {', '.join(map(str, self.conclusions))}"


def apply_one_premiss(sf: SignedFormula) -> RuleApplication | None:
    f = sf.formula
    if sf.sign is F:
        if f.kind == IMP:
            return RuleApplication(RuleId.F_IMP, sf, None, (SignedFormula(T, f.left), SignedFormula(F, f.right)))
        if f.kind == OR:
            return RuleApplication(RuleId.F_OR, sf, None, (SignedFormula(F, f.left), SignedFormula(F, f.right)))
        x = neg_view(f)
        if x is not None:
            return RuleApplication(RuleId.F_NEG, sf, None, (SignedFormula(T, x),))
        return None
    if f.kind == AND:
        return RuleApplication(RuleId.T_AND, sf, None, (SignedFormula(T, f.left), SignedFormula(T, f.right)))
    x = neg_view(f)
    if x is not None:
        y = neg_view(x)
        if y is not None:
            return RuleApplication(RuleId.T_NEG_NEG, sf, None, (SignedFormula(T, y),))
    return None


_F_CONS = {
    AND: (RuleId.F_CONS_AND_1, RuleId.F_CONS_AND_2),
    OR: (RuleId.F_CONS_OR_1, RuleId.F_CONS_OR_2),
    IMP: (RuleId.F_CONS_IMP_1, RuleId.F_CONS_IMP_2),
}


def two_premiss_table(main: SignedFormula) -> tuple[tuple[RuleId, SignedFormula, SignedFormula], ...]:
    """All ``(rule, required minor, conclusion)`` triples with ``main`` as main premiss.

    Essential variants come before their derived twins.
    """
    f = main.formula
    if main.sign is T:
        if f.kind == IMP:
            a, b = f.args
            return ((RuleId.T_IMP_1, SignedFormula(T, a), SignedFormula(T, b)),
                    (RuleId.T_IMP_2, SignedFormula(F, b), SignedFormula(F, a)))
        if f.kind == OR:
            a, b = f.args
            return ((RuleId.T_OR_1, SignedFormula(F, a), SignedFormula(T, b)),
                    (RuleId.T_OR_2, SignedFormula(F, b), SignedFormula(T, a)))
        x = cons_shape(f)
        if x is not None:
            return ((RuleId.T_NEG_CONS, SignedFormula(T, Neg(x)), SignedFormula(F, x)),)
        return ()
    if f.kind == AND:
        a, b = f.args
        return ((RuleId.F_AND_1, SignedFormula(T, a), SignedFormula(F, b)),
                (RuleId.F_AND_2, SignedFormula(T, b), SignedFormula(F, a)))
    x = cons_shape(f)
    if x is not None and x.is_binary:
        r1, r2 = _F_CONS[x.kind]
        # keep the representation of the main premiss: sugar in, sugar out
        if f.kind == NEG and f is f.canon:
            ca, cb = Cons(x.left).canon, Cons(x.right).canon
        else:
            ca, cb = Cons(x.left), Cons(x.right)
        return ((r1, SignedFormula(T, ca), SignedFormula(F, cb)),
                (r2, SignedFormula(T, cb), SignedFormula(F, ca)))
    return ()


def apply_two_premiss(main: SignedFormula, minor: SignedFormula,
                      use_derived: bool = True) -> RuleApplication | None:
    for rule, needed, concl in two_premiss_table(main):
        if not use_derived and rule in DERIVED_TWO_PREMISS:
            continue
        if needed == minor:
            return RuleApplication(rule, main, needed, (concl,))
    return None


def minor_targets(main: SignedFormula, use_derived: bool = True) -> list[tuple[RuleId, SignedFormula, Formula]]:
    return [
        (rule, needed, needed.formula)
        for rule, needed, _ in two_premiss_table(main)
        if use_derived or rule not in DERIVED_TWO_PREMISS
    ]
