"""Formulas over {~, &, |, ->, @}, hash-consed, plus sequents and problem files.

Every formula is interned: building the same constructor over the same
children twice returns the same object, so ``f is g`` is structural identity
of the representation.  ``==`` and ``hash`` are logical: they compare the
consistency-expanded normal form (``@A`` is ``~(A & ~A)``), so ``Cons(P) ==
Neg(And(P, Neg(P)))`` while ``Cons(P) is not Neg(And(P, Neg(P)))``.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field

ATOM, NEG, CONS, AND, OR, IMP = "atom", "neg", "cons", "and", "or", "imp"
BINARY = (AND, OR, IMP)
UNARY = (NEG, CONS)


class Formula:
    __slots__ = ("kind", "name", "args", "canon", "digest", "size", "_hash", "__weakref__")

    def __init__(self):
        raise TypeError("use Atom/Neg/And/Or/Imp/Cons to build formulas")

    @property
    def inner(self) -> Formula:
        return self.args[0]

    @property
    def left(self) -> Formula:
        return self.args[0]

    @property
    def right(self) -> Formula:
        return self.args[1]

    @property
    def is_atom(self) -> bool:
        return self.kind == ATOM

    @property
    def is_binary(self) -> bool:
        return self.kind in BINARY

    def __eq__(self, other):
        if not isinstance(other, Formula):
            return NotImplemented
        return self.canon is other.canon

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.canon.digest < other.canon.digest

    def __repr__(self):
        return f"<{print_formula(self)}>"

    def __str__(self):
        return print_formula(self)

    def __reduce__(self):
        return (parse_formula, (print_formula(self),))


class _Interner:
    """Append-only table of formula nodes; reads are lock-free."""

    def __init__(self):
        self._table: dict[tuple, Formula] = {}
        self._lock = threading.RLock()

    def __len__(self):
        return len(self._table)

    def get(self, kind: str, name: str | None, args: tuple[Formula, ...]) -> Formula:
        key = (kind, name, tuple(id(a) for a in args))
        node = self._table.get(key)
        if node is not None:
            return node
        with self._lock:
            node = self._table.get(key)
            if node is None:
                node = _build(kind, name, args)
                self._table[key] = node
        return node


_interner = _Interner()


def _build(kind, name, args) -> Formula:
    node = object.__new__(Formula)
    node.kind = kind
    node.name = name
    node.args = args
    if kind == CONS:
        x = args[0].canon
        canon = _interner.get(NEG, None, (_interner.get(AND, None, (x, _interner.get(NEG, None, (x,)))),))
    elif all(a.canon is a for a in args):
        canon = node
    else:
        canon = _interner.get(kind, name, tuple(a.canon for a in args))
    node.canon = canon
    if canon is node:
        h = hashlib.blake2b(digest_size=12)
        h.update(kind.encode())
        if name is not None:
            h.update(b":" + name.encode())
        for a in args:
            h.update(b"," + a.digest.encode())
        node.digest = h.hexdigest()
        node.size = 1 + sum(a.size for a in args)
    else:
        node.digest = canon.digest
        node.size = canon.size
    node._hash = int(node.digest[:15], 16)
    return node


def interned_count() -> int:
    return len(_interner)


def Atom(name: str) -> Formula:
    if not _is_identifier(name):
        raise ValueError(f"invalid atom name {name!r}")
    return _interner.get(ATOM, name, ())


def Neg(inner: Formula) -> Formula:
    return _interner.get(NEG, None, (inner,))


def Cons(inner: Formula) -> Formula:
    return _interner.get(CONS, None, (inner,))


def And(left: Formula, right: Formula) -> Formula:
    return _interner.get(AND, None, (left, right))


def Or(left: Formula, right: Formula) -> Formula:
    return _interner.get(OR, None, (left, right))


def Imp(left: Formula, right: Formula) -> Formula:
    return _interner.get(IMP, None, (left, right))


_CONSTRUCTORS = {NEG: Neg, CONS: Cons, AND: And, OR: Or, IMP: Imp}


def make(kind: str, *args: Formula) -> Formula:
    return _CONSTRUCTORS[kind](*args)


def big_and(items) -> Formula:
    """Right-nested conjunction ``a1 & (a2 & (... & an))``."""
    return _right_nest(And, list(items))


def big_or(items) -> Formula:
    return _right_nest(Or, list(items))


def _right_nest(op, items):
    if not items:
        raise ValueError("empty iterated connective")
    acc = items[-1]
    for item in reversed(items[:-1]):
        acc = op(item, acc)
    return acc


# --- consistency machinery -------------------------------------------------

def expand_cons(f: Formula) -> Formula:
    """Rewrite every ``@A`` as ``~(A & ~A)``, innermost first."""
    return f.canon


def contains_cons(f: Formula) -> bool:
    return f.canon is not f


def neg_view(f: Formula) -> Formula | None:
    """The negated formula if ``f`` is a negation (``@A`` counts as ``~(A & ~A)``)."""
    if f.kind == NEG:
        return f.args[0]
    if f.kind == CONS:
        x = f.args[0]
        return And(x, Neg(x))
    return None


def cons_shape(f: Formula) -> Formula | None:
    """Return ``A`` when ``f`` is ``@A`` or has the shape ``~(A & ~A)``."""
    if f.kind == CONS:
        return f.args[0]
    if f.kind != NEG:
        return None
    conj = f.args[0]
    if conj.kind != AND:
        return None
    negated = neg_view(conj.args[1])
    if negated is not None and negated == conj.args[0]:
        return conj.args[0]
    return None


def size(f: Formula, count_cons: bool = False) -> int:
    """Number of connective and atom occurrences in the expanded formula.

    With ``count_cons`` the representation is measured as written, counting
    ``@`` as one unary connective (reporting only).
    """
    if not count_cons:
        return f.size
    return 1 + sum(size(a, True) for a in f.args)


def subformulas(f: Formula) -> set[Formula]:
    out: dict[Formula, None] = {}
    stack = [f.canon]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out[g] = None
        stack.extend(g.args)
    return set(out)


class UniverseLimitExceeded(Exception):
    def __init__(self, size: int, cap: int):
        super().__init__(f"formula universe exceeds cap ({size} > {cap})")
        self.size = size
        self.cap = cap


def cons_closure(formulas, cap: int | None = None) -> frozenset[Formula]:
    """Subterm closure that also adds ``@A`` and ``@B`` for every ``@(A o B)``."""
    seen: set[Formula] = set()
    stack = [f.canon for f in formulas]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        if cap is not None and len(seen) > cap:
            raise UniverseLimitExceeded(len(seen), cap)
        stack.extend(g.args)
        x = cons_shape(g)
        if x is not None and x.is_binary:
            stack.append(Cons(x.left).canon)
            stack.append(Cons(x.right).canon)
    return frozenset(seen)


def cons_closure_universe(s: Sequent, cap: int | None = None) -> frozenset[Formula]:
    return cons_closure(s.formulas, cap)


def digest_sorted(formulas) -> list[Formula]:
    return sorted((f.canon for f in formulas), key=lambda g: g.digest)


# --- parsing -----------------------------------------------------------------

class FormulaSyntaxError(SyntaxError):
    """Parse failure carrying the UTF-8 byte offset and the expected tokens."""

    def __init__(self, text: str, pos: int, expected):
        self.text_input = text
        self.char_offset = pos
        self.byte_offset = len(text[:pos].encode("utf-8"))
        self.expected = frozenset(expected)
        found = text[pos:pos + 8] or "end of input"
        super().__init__(
            f"at byte {self.byte_offset}: expected one of "
            f"{', '.join(sorted(self.expected))}; found {found!r}"
        )


_SYMBOLS = {
    "~": "neg", "!": "neg", "¬": "neg",
    "@": "cons", "∘": "cons", "°": "cons",
    "&": "and", "∧": "and",
    "|": "or", "∨": "or",
    "->": "imp", "→": "imp",
    "(": "(", ")": ")",
}

_ATOM_EXPECT = {"atom", "~", "!", "@", "("}


def _is_identifier(s: str) -> bool:
    return bool(s) and s[0].isascii() and s[0].isalpha() and all(
        c.isascii() and (c.isalnum() or c == "_") for c in s
    )


def _tokenize(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if text.startswith("->", i):
            toks.append(("imp", "->", i))
            i += 2
            continue
        if c in _SYMBOLS:
            toks.append((_SYMBOLS[c], c, i))
            i += 1
            continue
        if c.isascii() and c.isalpha():
            j = i + 1
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("atom", text[i:j], i))
            i = j
            continue
        raise FormulaSyntaxError(text, i, _ATOM_EXPECT | {"&", "|", "->", ")"})
    toks.append(("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        raise FormulaSyntaxError(self.text, self.toks[self.i][2], expected)

    def imp(self):
        left = self.disj()
        if self.peek() == "imp":
            self.take()
            return Imp(left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        if self.peek() == "or":
            self.take()
            return Or(left, self.disj())
        return left

    def conj(self):
        left = self.unary()
        if self.peek() == "and":
            self.take()
            return And(left, self.conj())
        return left

    def unary(self):
        kind = self.peek()
        if kind == "neg":
            self.take()
            return Neg(self.unary())
        if kind == "cons":
            self.take()
            return Cons(self.unary())
        if kind == "atom":
            return Atom(self.take()[1])
        if kind == "(":
            self.take()
            f = self.imp()
            if self.peek() != ")":
                self.fail({")", "&", "|", "->"})
            self.take()
            return f
        self.fail(_ATOM_EXPECT)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.imp()
    if p.peek() != "eof":
        p.fail({"&", "|", "->", "end of input"})
    return f


# --- printing ----------------------------------------------------------------

_STYLES = {
    "ascii": {NEG: "~", CONS: "@", AND: " & ", OR: " | ", IMP: " -> "},
    "unicode": {NEG: "¬", CONS: "∘", AND: " ∧ ", OR: " ∨ ", IMP: " → "},
    "latex": {NEG: "\\neg ", CONS: "\\circ ", AND: " \\wedge ", OR: " \\vee ", IMP: " \\to "},
}
_PREC = {IMP: 1, OR: 2, AND: 3}


def print_formula(f: Formula, style: str = "ascii") -> str:
    sym = _STYLES[style]
    parts: list[str] = []

    def emit(g, parens):
        if parens:
            parts.append("(")
        if g.kind == ATOM:
            parts.append(g.name)
        elif g.kind in UNARY:
            parts.append(sym[g.kind])
            emit(g.args[0], g.args[0].is_binary)
        else:
            p = _PREC[g.kind]
            l, r = g.args
            emit(l, l.is_binary and _PREC[l.kind] <= p)
            parts.append(sym[g.kind])
            emit(r, r.is_binary and _PREC[r.kind] < p)
        if parens:
            parts.append(")")

    emit(f, False)
    return "".join(parts)


# --- sequents and problem files ---------------------------------------------

TURNSTILES = ("|-", "⊢")


@dataclass(frozen=True)
class Sequent:
    premises: tuple[Formula, ...]
    conclusion: Formula

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))

    @property
    def formulas(self) -> tuple[Formula, ...]:
        return self.premises + (self.conclusion,)

    def __str__(self):
        return print_sequent(self)


def parse_sequent(text: str) -> Sequent:
    for ts in TURNSTILES:
        cut = text.find(ts)
        if cut >= 0:
            break
    else:
        raise FormulaSyntaxError(text, len(text), {"|-"})
    lhs, rhs = text[:cut], text[cut + len(ts):]
    premises = []
    if lhs.strip():
        offset = 0
        for chunk in lhs.split(","):
            try:
                premises.append(parse_formula(chunk))
            except FormulaSyntaxError as e:
                raise FormulaSyntaxError(text, offset + e.char_offset, e.expected) from None
            offset += len(chunk) + 1
    try:
        conclusion = parse_formula(rhs)
    except FormulaSyntaxError as e:
        raise FormulaSyntaxError(text, cut + len(ts) + e.char_offset, e.expected) from None
    return Sequent(tuple(premises), conclusion)


def print_sequent(s: Sequent, style: str = "ascii") -> str:
    ts = "⊢" if style == "unicode" else "|-"
    lhs = ", ".join(print_formula(p, style) for p in s.premises)
    rhs = print_formula(s.conclusion, style)
    return f"{lhs} {ts} {rhs}" if lhs else f"{ts} {rhs}"


@dataclass
class ProblemLine:
    lineno: int
    sequent: Sequent
    meta: dict = field(default_factory=dict)

    @property
    def expected(self) -> str | None:
        value = self.meta.get("expected")
        return value.capitalize() if value else None


def parse_problem_text(text: str, source: str = "<input>") -> list[ProblemLine]:
    """Parse the problem-file format: one sequent per line, ``#`` comments.

    A trailing comment may carry ``key=value`` annotations, e.g.
    ``P |- P  # id=refl expected=valid``.
    """
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body, _, comment = raw.partition("#")
        if not body.strip():
            continue
        try:
            seq = parse_sequent(body)
        except FormulaSyntaxError as e:
            e.filename = source
            e.lineno = lineno
            raise
        meta = dict(tok.split("=", 1) for tok in comment.split() if "=" in tok)
        out.append(ProblemLine(lineno, seq, meta))
    return out


def format_problem_line(s: Sequent, **meta) -> str:
    line = print_sequent(s)
    if meta:
        line += "  # " + " ".join(f"{k}={v}" for k, v in meta.items())
    return line
