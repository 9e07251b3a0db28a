"""Satisfiability-preserving rewrites and cross-language translations.

Covers: the binary-relation atoms to contact rewrite, the embedding of
regular-closed terms into raw set terms via cl(int(.)), positive-count
elimination, both contact-elimination lemmas with relativization, and
the future-past temporal translation with its fence-cell semantics.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from . import formula as F
from .formula import (And, Compl, Conn, ConnLe, Contact, Closure, Eq, Formula,
                      FormulaError, Implies, Inter, Interior, Not, One, Or,
                      Prod, Rcc8, SetCompl, Sum, Term, Union, Var, Zero,
                      ZERO, ONE, conj)
from .frames import Model, fence_cells
from .semantics import empty_space_eval


class TransformError(Exception):
    """Rewrite precondition violated."""


# ---------------------------------------------------------------------------
# Fresh variables

class FreshVars:
    """Per-pipeline counter for _aux<N> variable names."""

    def __init__(self, formula: Optional[Formula] = None):
        self.n = 0
        if formula is not None:
            for v in F.variables(formula):
                if v.startswith("_aux"):
                    raise TransformError(f"reserved variable name {v!r} in input")

    def next(self) -> Var:
        self.n += 1
        return Var(f"_aux{self.n}")


# ---------------------------------------------------------------------------
# Generic formula surgery

def _map_atoms(f: Formula, fn) -> Formula:
    if isinstance(f, F.ATOM_CLASSES):
        return fn(f)
    if isinstance(f, Not):
        return Not(_map_atoms(f.arg, fn))
    if isinstance(f, And):
        return And(_map_atoms(f.left, fn), _map_atoms(f.right, fn))
    if isinstance(f, Or):
        return Or(_map_atoms(f.left, fn), _map_atoms(f.right, fn))
    if isinstance(f, Implies):
        return Implies(_map_atoms(f.left, fn), _map_atoms(f.right, fn))
    raise TransformError(f"not a formula: {f!r}")


def replace_occurrence(f: Formula, pred, index, builder) -> Formula:
    """Replace the index-th (preorder) node matching pred(node, polarity)
    by builder(node). Raises if no such occurrence exists."""
    counter = [0]
    done = [False]

    def go(g, polarity):
        if pred(g, polarity):
            if counter[0] == index:
                done[0] = True
                return builder(g)
            counter[0] += 1
        if isinstance(g, F.ATOM_CLASSES):
            return g
        if isinstance(g, Not):
            return Not(go(g.arg, -polarity))
        if isinstance(g, And):
            return And(go(g.left, polarity), go(g.right, polarity))
        if isinstance(g, Or):
            return Or(go(g.left, polarity), go(g.right, polarity))
        if isinstance(g, Implies):
            return Implies(go(g.left, -polarity), go(g.right, polarity))
        raise TransformError(f"not a formula: {g!r}")

    out = go(f, 1)
    if not done[0]:
        raise TransformError("no matching occurrence at that index")
    return out


def nnf(f: Formula) -> Formula:
    """Negation normal form: negation only on atoms, no implications."""

    def go(g, positive):
        if isinstance(g, F.ATOM_CLASSES):
            return g if positive else Not(g)
        if isinstance(g, Not):
            return go(g.arg, not positive)
        if isinstance(g, And):
            cls = And if positive else Or
            return cls(go(g.left, positive), go(g.right, positive))
        if isinstance(g, Or):
            cls = Or if positive else And
            return cls(go(g.left, positive), go(g.right, positive))
        if isinstance(g, Implies):
            if positive:
                return Or(go(g.left, False), go(g.right, True))
            return And(go(g.left, True), go(g.right, False))
        raise TransformError(f"not a formula: {g!r}")

    return go(f, True)


# ---------------------------------------------------------------------------
# Relation atoms to contact

def _leq(t1, t2):
    return Eq(Prod(t1, Compl(t2)), ZERO)


def _nleq(t1, t2):
    return Not(_leq(t1, t2))


def rcc8_to_c(f: Formula) -> Formula:
    """Expand every binary-relation atom into contact/equality form."""

    def expand(a):
        if not isinstance(a, Rcc8):
            return a
        t1, t2 = a.left, a.right
        rel = a.rel
        if rel == "TPPi":
            rel, t1, t2 = "TPP", t2, t1
        elif rel == "NTPPi":
            rel, t1, t2 = "NTPP", t2, t1
        if rel == "DC":
            return Not(Contact((t1, t2)))
        if rel == "EQ":
            return Eq(t1, t2)
        if rel == "EC":
            return And(Eq(Prod(t1, t2), ZERO), Contact((t1, t2)))
        if rel == "PO":
            return conj([Not(Eq(Prod(t1, t2), ZERO)), _nleq(t1, t2), _nleq(t2, t1)])
        if rel == "TPP":
            return conj([_leq(t1, t2), Contact((t1, Compl(t2))), _nleq(t2, t1)])
        if rel == "NTPP":
            return And(Not(Contact((t1, Compl(t2)))), _nleq(t2, t1))
        raise TransformError(f"unknown relation {rel!r}")

    return _map_atoms(f, expand)


# ---------------------------------------------------------------------------
# Dagger: regular-closed terms as raw set terms

def dagger_term(t: Term) -> Term:
    if isinstance(t, Var):
        return Closure(Interior(t))
    if isinstance(t, (Zero, One)):
        return t
    if isinstance(t, Compl):
        return Closure(SetCompl(dagger_term(t.arg)))
    if isinstance(t, Prod):
        return Closure(Interior(Inter(dagger_term(t.left), dagger_term(t.right))))
    if isinstance(t, Sum):
        return Union(dagger_term(t.left), dagger_term(t.right))
    raise TransformError(f"not a regular-closed term: {t!r}")


def dagger(f: Formula) -> Formula:
    """Rewrite an RC-family formula for interpretation over arbitrary
    point sets: variables become cl(int(r)), contact becomes non-empty
    intersection."""
    if F.formula_family(f) == "set":
        raise TransformError("input already uses set operators")
    f = rcc8_to_c(f)

    def expand(a):
        if isinstance(a, Eq):
            return Eq(dagger_term(a.left), dagger_term(a.right))
        if isinstance(a, Contact):
            t = dagger_term(a.terms[0])
            for u in a.terms[1:]:
                t = Inter(t, dagger_term(u))
            return Not(Eq(t, ZERO))
        if isinstance(a, Conn):
            return Conn(dagger_term(a.term))
        if isinstance(a, ConnLe):
            return ConnLe(a.k, dagger_term(a.term))
        raise TransformError(f"cannot rewrite atom {a!r}")

    return _map_atoms(f, expand)


# ---------------------------------------------------------------------------
# Positive occurrences of component-count predicates

def eliminate_count_pos(f: Formula, index: int = 0,
                        fresh: Optional[FreshVars] = None) -> Formula:
    """Replace one positively occurring at-most-k (or at-least-k, i.e.
    negated at-most) component atom by its union-of-connected-pieces
    expansion. Set-operator formulas only: the expansion needs frames
    whose region family is closed under taking components, which the
    power-set classes guarantee."""
    if F.formula_family(f) == "rc":
        raise TransformError("count elimination applies to set-operator formulas")
    fresh = fresh or FreshVars(f)

    def pred(g, polarity):
        if isinstance(g, Not) and isinstance(g.arg, ConnLe):
            return polarity > 0
        if isinstance(g, ConnLe):
            return polarity > 0
        return False

    def builder(g):
        if isinstance(g, ConnLe):
            tau, k = g.term, g.k
            parts = [fresh.next() for _ in range(k)]
            union = parts[0]
            for r in parts[1:]:
                union = Union(union, r)
            return conj([Eq(tau, union)] + [Conn(r) for r in parts])
        # not(at most k) = at least k+1 components
        tau, k = g.arg.term, g.arg.k
        parts = [fresh.next() for _ in range(k + 1)]
        union = parts[0]
        for r in parts[1:]:
            union = Union(union, r)
        out = [Eq(tau, union)]
        out += [Not(Eq(r, ZERO)) for r in parts]
        out += [Eq(Inter(tau, Inter(Closure(parts[i]), Closure(parts[j]))), ZERO)
                for i in range(len(parts)) for j in range(i + 1, len(parts))]
        return conj(out)

    return replace_occurrence(f, pred, index, builder)


# ---------------------------------------------------------------------------
# Relativization and contact elimination

def relativize(f: Formula, s: str) -> Formula:
    """Replace every maximal term tau by s*tau."""
    sv = Var(s)

    def expand(a):
        if isinstance(a, Eq):
            return Eq(Prod(sv, a.left), Prod(sv, a.right))
        if isinstance(a, Contact):
            return Contact(tuple(Prod(sv, t) for t in a.terms))
        if isinstance(a, Rcc8):
            return Rcc8(a.rel, Prod(sv, a.left), Prod(sv, a.right))
        if isinstance(a, Conn):
            return Conn(Prod(sv, a.term))
        if isinstance(a, ConnLe):
            return ConnLe(a.k, Prod(sv, a.term))
        raise TransformError(f"not an atom: {a!r}")

    return _map_atoms(f, expand)


def _epsilon(f: Formula) -> Formula:
    """`0 = 1` when f is satisfied over the empty space, an absorbing
    falsehood otherwise."""
    if empty_space_eval(f):
        return Eq(ZERO, ONE)
    return Not(Eq(ZERO, ZERO))


def eliminate_contact_pos(f: Formula, index: int = 0,
                          fresh: Optional[FreshVars] = None) -> Formula:
    """Remove one positive binary contact atom, trading it for a fresh
    marker t (contact holds iff t is empty) guarded by connected
    witnesses t1 <= tau1, t2 <= tau2 with connected sum."""
    fresh = fresh or FreshVars(f)
    t, t1, t2 = fresh.next(), fresh.next(), fresh.next()
    target = [None]

    def pred(g, polarity):
        return isinstance(g, Contact) and len(g.terms) == 2 and polarity > 0

    def builder(g):
        target[0] = g
        return Eq(t, ZERO)

    replaced = replace_occurrence(f, pred, index, builder)
    tau1, tau2 = target[0].terms
    guard = Implies(
        Eq(t, ZERO),
        conj([Conn(Sum(t1, t2)),
              Not(Eq(t1, ZERO)), _leq(t1, tau1), Conn(t1),
              Not(Eq(t2, ZERO)), _leq(t2, tau2), Conn(t2)]))
    return Or(_epsilon(f), And(replaced, guard))


def eliminate_contact_neg(f: Formula, index: int = 0, connected: bool = False,
                          fresh: Optional[FreshVars] = None) -> Formula:
    """Remove one positive occurrence of a negated binary contact atom,
    relativizing the formula to a fresh subspace variable s."""
    fresh = fresh or FreshVars(f)
    s, t, t1, t2 = fresh.next(), fresh.next(), fresh.next(), fresh.next()
    target = [None]

    def pred(g, polarity):
        return (isinstance(g, Not) and isinstance(g.arg, Contact)
                and len(g.arg.terms) == 2 and polarity > 0)

    def builder(g):
        target[0] = g.arg
        return Eq(t, ZERO)

    replaced = replace_occurrence(f, pred, index, builder)
    tau1, tau2 = target[0].terms
    body = conj([
        Not(Eq(s, ZERO)),
        relativize(replaced, s.name),
        Implies(Eq(Prod(t, s), ZERO),
                conj([Not(Conn(Sum(t1, t2))),
                      Conn(t1), _leq(Prod(tau1, s), t1),
                      Conn(t2), _leq(Prod(tau2, s), t2)])),
    ])
    out = Or(_epsilon(f), body)
    if connected:
        out = And(out, Conn(s))
    return out


def _has_binary_contact(f: Formula) -> bool:
    return any(isinstance(a, Contact) and len(a.terms) == 2 for a in F.atoms(f))


def eliminate_contacts(f: Formula, connected: bool = False) -> Formula:
    """Remove every binary contact atom by repeated application of the
    two elimination steps; the result is contact-free."""
    for a in F.atoms(f):
        if isinstance(a, Contact) and len(a.terms) != 2:
            raise TransformError("contact elimination handles binary contact only")
    fresh = FreshVars(f)
    f = nnf(f)
    while _has_binary_contact(f):
        try:
            f = eliminate_contact_neg(f, 0, connected, fresh)
        except TransformError:
            f = eliminate_contact_pos(f, 0, fresh)
        f = nnf(f)
    return f


# ---------------------------------------------------------------------------
# Equality normalization

def eq_normalize(f: Formula) -> Formula:
    """Rewrite equalities into tau = 0 form via symmetric difference."""

    set_family = F.formula_family(f) == "set"

    def expand(a):
        if not isinstance(a, Eq):
            return a
        if isinstance(a.right, Zero):
            return a
        if isinstance(a.left, Zero):
            return Eq(a.right, ZERO)
        if (set_family or F.term_family(a.left) == "set"
                or F.term_family(a.right) == "set"):
            diff = Union(Inter(a.left, SetCompl(a.right)),
                         Inter(a.right, SetCompl(a.left)))
        else:
            diff = Sum(Prod(a.left, Compl(a.right)),
                       Prod(a.right, Compl(a.left)))
        return Eq(diff, ZERO)

    return _map_atoms(f, expand)


# ---------------------------------------------------------------------------
# Future-past temporal translation

@dataclass(frozen=True)
class FPVar:
    name: str


@dataclass(frozen=True)
class FPTop:
    pass


@dataclass(frozen=True)
class FPBot:
    pass


@dataclass(frozen=True)
class FPNot:
    arg: object


@dataclass(frozen=True)
class FPAnd:
    left: object
    right: object


@dataclass(frozen=True)
class FPOr:
    left: object
    right: object


@dataclass(frozen=True)
class FPImp:
    left: object
    right: object


@dataclass(frozen=True)
class DiamondF:
    arg: object


@dataclass(frozen=True)
class DiamondP:
    arg: object


def _fp_iff(a, b):
    return FPAnd(FPImp(a, b), FPImp(b, a))


def _fp_term(t: Term):
    if isinstance(t, Var):
        return FPVar(t.name)
    if isinstance(t, Zero):
        return FPBot()
    if isinstance(t, One):
        return FPTop()
    if isinstance(t, Compl):
        return FPNot(_fp_term(t.arg))
    if isinstance(t, Prod):
        return FPAnd(_fp_term(t.left), _fp_term(t.right))
    if isinstance(t, Sum):
        return FPOr(_fp_term(t.left), _fp_term(t.right))
    raise TransformError(f"not a regular-closed term: {t!r}")


def fp_translate(f: Formula):
    """Boolean-with-connectedness formula into a future-past formula
    whose satisfiability over the real line matches."""
    tag = F.classify(f)
    if tag not in ("B", "Bc"):
        raise TransformError(f"translation takes B/Bc input, got {tag}")

    def go(g):
        if isinstance(g, Eq):
            return FPNot(DiamondF(DiamondP(FPNot(_fp_iff(_fp_term(g.left),
                                                         _fp_term(g.right))))))
        if isinstance(g, Conn):
            p = _fp_term(g.term)
            return FPNot(DiamondF(DiamondP(
                FPAnd(p, DiamondF(FPAnd(FPNot(p), DiamondF(p)))))))
        if isinstance(g, Not):
            return FPNot(go(g.arg))
        if isinstance(g, And):
            return FPAnd(go(g.left), go(g.right))
        if isinstance(g, Or):
            return FPOr(go(g.left), go(g.right))
        if isinstance(g, Implies):
            return FPImp(go(g.left), go(g.right))
        raise TransformError(f"cannot translate {g!r}")

    return go(f)


def fp_print(g) -> str:
    if isinstance(g, FPVar):
        return g.name
    if isinstance(g, FPTop):
        return "true"
    if isinstance(g, FPBot):
        return "false"
    if isinstance(g, FPNot):
        return f"!{fp_print_atomish(g.arg)}"
    if isinstance(g, FPAnd):
        return f"({fp_print(g.left)} & {fp_print(g.right)})"
    if isinstance(g, FPOr):
        return f"({fp_print(g.left)} | {fp_print(g.right)})"
    if isinstance(g, FPImp):
        return f"({fp_print(g.left)} -> {fp_print(g.right)})"
    if isinstance(g, DiamondF):
        return f"F({fp_print(g.arg)})"
    if isinstance(g, DiamondP):
        return f"P({fp_print(g.arg)})"
    raise TransformError(f"not a temporal formula: {g!r}")


def fp_print_atomish(g):
    s = fp_print(g)
    if isinstance(g, (FPVar, FPTop, FPBot, DiamondF, DiamondP, FPNot)):
        return s
    return s


def fp_modelcheck(model: Model, g, cell_index: int) -> bool:
    """Truth of a future-past formula at one cell of a linear fence.

    A diamond looking forward is witnessed by any later cell, or by the
    cell itself when it is an interval cell (an interval contains points
    strictly after any of its own points); symmetrically for the past.

    Letters are read half-open: a point cell carries a letter exactly
    when the interval to its right does. This keeps the pointwise
    Boolean connectives aligned with the region operations, which
    disagree at shared endpoints under the literal membership reading."""
    cells = fence_cells(model.frame)
    if not 0 <= cell_index < len(cells):
        raise TransformError("cell index out of range")

    def truth(h, i):
        point, kind = cells[i]
        if isinstance(h, FPVar):
            if h.name not in model.valuation:
                raise TransformError(f"unbound letter {h.name!r}")
            carrier = cells[i + 1][0] if kind == "point" else point
            return carrier in model.valuation[h.name]
        if isinstance(h, FPTop):
            return True
        if isinstance(h, FPBot):
            return False
        if isinstance(h, FPNot):
            return not truth(h.arg, i)
        if isinstance(h, FPAnd):
            return truth(h.left, i) and truth(h.right, i)
        if isinstance(h, FPOr):
            return truth(h.left, i) or truth(h.right, i)
        if isinstance(h, FPImp):
            return (not truth(h.left, i)) or truth(h.right, i)
        if isinstance(h, DiamondF):
            if kind == "interval" and truth(h.arg, i):
                return True
            return any(truth(h.arg, j) for j in range(i + 1, len(cells)))
        if isinstance(h, DiamondP):
            if kind == "interval" and truth(h.arg, i):
                return True
            return any(truth(h.arg, j) for j in range(i))
        raise TransformError(f"not a temporal formula: {h!r}")

    return truth(g, cell_index)
