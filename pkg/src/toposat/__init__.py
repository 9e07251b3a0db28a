"""Satisfiability of topological contact and connectedness formulas
over finite quasi-saw models."""

from .formula import Formula, Term, parse, parse_term, print_formula, print_term
from .frames import Model, QuasiOrderFrame, QuasiSawFrame, load_model, model_to_json
from .semantics import holds
from .solver import SolveResult, check_certificate, sat_bounded, sat_forks, solve

__version__ = "0.1.0"

__all__ = [
    "Formula", "Term", "parse", "parse_term", "print_formula", "print_term",
    "Model", "QuasiOrderFrame", "QuasiSawFrame", "load_model", "model_to_json",
    "holds", "SolveResult", "check_certificate", "sat_bounded", "sat_forks",
    "solve", "__version__",
]
