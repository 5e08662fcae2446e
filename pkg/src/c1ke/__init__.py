"""KE tableau prover for the paraconsistent logic C1."""

from .formula import (
    And,
    Atom,
    Cons,
    Formula,
    FormulaSyntaxError,
    Imp,
    Neg,
    Or,
    Sequent,
    parse_formula,
    parse_sequent,
    print_formula,
    print_sequent,
)
from .oracle import admissible, cross_check, oracle_verdict
from .rules import RuleId, Sign, SignedFormula
from .tableau import Signature, StrategyConfig, Verdict, extract_countermodel, prove

__version__ = "0.1.0"

__all__ = [
    "And", "Atom", "Cons", "Formula", "FormulaSyntaxError", "Imp", "Neg", "Or",
    "RuleId", "Sequent", "Sign", "SignedFormula", "Signature", "StrategyConfig",
    "Verdict", "admissible", "cross_check", "extract_countermodel", "oracle_verdict",
    "parse_formula", "parse_sequent", "print_formula", "print_sequent", "prove",
]
