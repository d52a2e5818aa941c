"""Satisfiability decisions, implication checks, and model enumeration.

The decision procedure is a deterministic DPLL: unit propagation plus
branching on the lowest-id unassigned variable, trying False first.
Assumptions are applied as pre-assigned units, so formulas stay immutable.
Every operation is a pure function of its inputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from .errors import CapExceeded
from .formula import Clause, CnfFormula

DEFAULT_ENUMERATION_CAP = 16

_NO_OCC: tuple = ()


def resolve_cap(cap: int | None) -> int:
    return DEFAULT_ENUMERATION_CAP if cap is None else int(cap)


@dataclass(frozen=True)
class SatOutcome:
    satisfiable: bool
    model: dict[int, bool] | None = None


class _Compiled:
    """Per-formula solver tables, built once and cached on the formula."""

    __slots__ = ("ints", "occ", "order", "has_empty")

    def __init__(self, formula: CnfFormula):
        self.ints = [tuple((v if p else -v) for v, p in c.literals)
                     for c in formula.clauses]
        self.has_empty = any(not lits for lits in self.ints)
        occ: dict[int, list[tuple[int, bool]]] = {}
        for ci, lits in enumerate(self.ints):
            for lit in lits:
                v = lit if lit > 0 else -lit
                occ.setdefault(v, []).append((ci, lit > 0))
        self.occ = occ
        self.order = tuple(sorted(occ))


def _compiled(formula: CnfFormula) -> _Compiled:
    comp = formula._compiled
    if comp is None:
        comp = _Compiled(formula)
        formula._compiled = comp
    return comp


def is_satisfiable(formula: CnfFormula,
                   assumptions: Mapping[int, bool] | None = None) -> SatOutcome:
    """SAT verdict for the formula under the assumed unit assignments.

    A satisfiable outcome carries a model that extends the assumptions and is
    full over the formula's variable table (unconstrained variables default
    to False).
    """
    comp = _compiled(formula)
    if comp.has_empty:
        return SatOutcome(False)
    ints = comp.ints
    occ = comp.occ
    m = len(ints)
    vals: dict[int, bool] = {}
    counts = [len(lits) for lits in ints]
    satisfied = bytearray(m)
    nsat = 0
    trail: list[tuple[int, list[int], list[int]]] = []

    def assign(var: int, val: bool) -> bool:
        nonlocal nsat
        stack = [(var, val)]
        while stack:
            v, b = stack.pop()
            cur = vals.get(v)
            if cur is not None:
                if cur != b:
                    return False
                continue
            vals[v] = b
            sat_here: list[int] = []
            dec_here: list[int] = []
            trail.append((v, sat_here, dec_here))
            for ci, pos in occ.get(v, _NO_OCC):
                if satisfied[ci]:
                    continue
                if pos == b:
                    satisfied[ci] = 1
                    nsat += 1
                    sat_here.append(ci)
                else:
                    k = counts[ci] - 1
                    counts[ci] = k
                    dec_here.append(ci)
                    if k == 0:
                        return False
                    if k == 1:
                        for lit in ints[ci]:
                            u = lit if lit > 0 else -lit
                            if u not in vals:
                                stack.append((u, lit > 0))
                                break
        return True

    def undo_to(mark: int) -> None:
        nonlocal nsat
        while len(trail) > mark:
            v, sat_here, dec_here = trail.pop()
            del vals[v]
            for ci in sat_here:
                satisfied[ci] = 0
            nsat -= len(sat_here)
            for ci in dec_here:
                counts[ci] += 1

    if assumptions:
        for v in sorted(assumptions):
            if not assign(v, bool(assumptions[v])):
                return SatOutcome(False)

    order = comp.order

    def search(pos: int) -> bool:
        if nsat == m:
            return True
        n = len(order)
        while pos < n and order[pos] in vals:
            pos += 1
        if pos == n:
            # every variable with occurrences assigned, no conflict seen
            return True
        v = order[pos]
        for val in (False, True):
            mark = len(trail)
            if assign(v, val) and search(pos + 1):
                return True
            undo_to(mark)
        return False

    if not search(0):
        return SatOutcome(False)
    universe = set(formula.vars)
    if assumptions:
        universe.update(assumptions)
    model = {v: vals.get(v, False) for v in sorted(universe)}
    return SatOutcome(True, model)


def implies_clause(formula: CnfFormula, clause: Clause) -> bool:
    """True iff formula AND NOT(clause) is unsatisfiable."""
    assumptions = {v: not p for v, p in clause.literals}
    return not is_satisfiable(formula, assumptions).satisfiable


def implies_formula(antecedent: CnfFormula, consequent: CnfFormula) -> bool:
    """True iff the antecedent implies every clause of the consequent."""
    return all(implies_clause(antecedent, c) for c in consequent.clauses)


def enumerate_sat(formula: CnfFormula,
                  variables,
                  cap: int | None = None) -> list[dict[int, bool]]:
    """All full assignments to `variables` under which the formula is
    satisfiable, in ascending assignment order (lowest id most significant)."""
    vs = sorted(set(variables))
    limit = resolve_cap(cap)
    if len(vs) > limit:
        raise CapExceeded(f"{len(vs)} enumeration variables exceed cap {limit}")
    found = []
    for bits in itertools.product((False, True), repeat=len(vs)):
        a = dict(zip(vs, bits))
        if is_satisfiable(formula, a).satisfiable:
            found.append(a)
    return found
