"""Quantifier elimination and partial quantifier elimination at desk scale.

Both eliminations work by enumerating the free-variable space and testing
cofactor satisfiability, emitting one maxterm per excluded point, so results
are canonical: maxterm CNF, clauses in ascending assignment order.  Clause
splitting transforms are provided in the literal-list form and in the
all-assignments form used to show that any implied property is reachable
this way.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import CapExceeded, PropforgeError
from .formula import (Clause, CnfFormula, Literal, TautologyError, evaluate,
                      maxterm)
from .satcore import implies_clause, implies_formula, is_satisfiable, resolve_cap

SPLIT_BLOWUP_CAP = 4


class FreeVarViolation(PropforgeError):
    """A candidate solution mentions variables outside the free set."""


class SharedVariable(PropforgeError):
    """Splitting variables must be distinct and absent from the clause."""


class NotImplied(PropforgeError):
    """The supplied target property is not implied by the formula."""


@dataclass(frozen=True)
class QuantProblem:
    """Eliminate the `quantified` variables from `formula` by existential
    projection onto the remaining (free) variables."""

    formula: CnfFormula
    quantified: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "quantified", frozenset(self.quantified))
        if not self.quantified <= self.formula.vars:
            raise ValueError("quantified variables must belong to the formula")

    @property
    def free(self) -> tuple[int, ...]:
        return tuple(sorted(self.formula.vars - self.quantified))


@dataclass(frozen=True)
class PqeProblem:
    """Take the clauses indexed by `take` out of the quantifier scope.

    A solution is a formula Q over the free variables such that
    exists(W, formula) == Q and exists(W, rest).
    """

    formula: CnfFormula
    take: frozenset[int]
    quantified: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "take", frozenset(self.take))
        object.__setattr__(self, "quantified", frozenset(self.quantified))
        if not self.take:
            raise ValueError("the extracted clause set must be non-empty")
        n = len(self.formula.clauses)
        if any(not 0 <= i < n for i in self.take):
            raise ValueError("clause index out of range")
        if not self.quantified <= self.formula.vars:
            raise ValueError("quantified variables must belong to the formula")

    @property
    def free(self) -> tuple[int, ...]:
        return tuple(sorted(self.formula.vars - self.quantified))

    def taken_formula(self) -> CnfFormula:
        return self.formula.subset(self.take)

    def rest_formula(self) -> CnfFormula:
        rest = set(range(len(self.formula.clauses))) - self.take
        return self.formula.subset(rest)


def _assignments(variables: Sequence[int]):
    for bits in itertools.product((False, True), repeat=len(variables)):
        yield dict(zip(variables, bits))


def _free_names(formula: CnfFormula, free: Sequence[int]) -> dict[int, str]:
    keep = set(free)
    return {v: n for v, n in formula.names.items() if v in keep}


def quant_eliminate(problem: QuantProblem, cap: int | None = None) -> CnfFormula:
    """Quantifier-free equivalent of exists(quantified, formula) over the free
    variables: one maxterm per free point with an unsatisfiable cofactor."""
    free = problem.free
    limit = resolve_cap(cap)
    if len(free) > limit:
        raise CapExceeded(f"{len(free)} free variables exceed cap {limit}")
    clauses = [maxterm(a) for a in _assignments(free)
               if not is_satisfiable(problem.formula, a).satisfiable]
    return CnfFormula(clauses, vars=free, names=_free_names(problem.formula, free))


def partial_qe(problem: PqeProblem, cap: int | None = None) -> CnfFormula:
    """The weakest solution to the extraction problem.

    A free point contributes a maxterm iff the whole formula is unsatisfiable
    there while the non-extracted clauses alone are satisfiable.
    """
    free = problem.free
    limit = resolve_cap(cap)
    if len(free) > limit:
        raise CapExceeded(f"{len(free)} free variables exceed cap {limit}")
    rest = problem.rest_formula()
    clauses = []
    for a in _assignments(free):
        if is_satisfiable(problem.formula, a).satisfiable:
            continue
        if is_satisfiable(rest, a).satisfiable:
            clauses.append(maxterm(a))
    return CnfFormula(clauses, vars=free, names=_free_names(problem.formula, free))


def is_pqe_solution(problem: PqeProblem, candidate: CnfFormula,
                    cap: int | None = None) -> bool:
    """Definition-level check that `candidate` solves the extraction problem:
    at every free point, the whole formula is satisfiable exactly when the
    candidate holds and the non-extracted clauses are satisfiable."""
    free = problem.free
    free_set = set(free)
    for c in candidate.clauses:
        if not c.vars <= free_set:
            raise FreeVarViolation("candidate ranges outside the free variables")
    limit = resolve_cap(cap)
    if len(free) > limit:
        raise CapExceeded(f"{len(free)} free variables exceed cap {limit}")
    rest = problem.rest_formula()
    for a in _assignments(free):
        lhs = is_satisfiable(problem.formula, a).satisfiable
        rhs = (evaluate(candidate, a) is True
               and is_satisfiable(rest, a).satisfiable)
        if lhs != rhs:
            return False
    return True


def clean_solution(solution: CnfFormula, context: CnfFormula) -> CnfFormula:
    """Drop every solution clause that `context` implies on its own.

    Removing such clauses preserves solution-hood: conjoined with the
    projection of the context they contribute nothing.
    """
    kept = [c for c in solution.clauses if not implies_clause(context, c)]
    return CnfFormula(kept, vars=solution.vars, names=solution.names)


def split_clause(clause: Clause,
                 literals: Iterable[Literal | tuple[int, bool]]) -> tuple[Clause, ...]:
    """Replace a clause by the equivalent widened set: the clause joined with
    each chosen literal, plus the clause joined with all their negations."""
    lits = tuple(Literal(v, bool(p)) for v, p in literals)
    split_vars = [lit.var for lit in lits]
    if len(set(split_vars)) != len(split_vars):
        raise SharedVariable("splitting variables must be distinct")
    overlap = set(split_vars) & clause.vars
    if overlap:
        raise SharedVariable(
            f"splitting variables {sorted(overlap)} already occur in the clause")
    parts = [clause.extended(lit) for lit in lits]
    parts.append(clause.extended(*(lit.negated() for lit in lits)))
    return tuple(parts)


def split_on_all_assignments(formula: CnfFormula,
                             variables: Iterable[int],
                             target: CnfFormula) -> PqeProblem:
    """Widen every clause with the maxterm of every assignment to `variables`
    (dropping tautologous copies) and partition the result by the implied
    `target` property.

    The returned problem extracts the copies whose assignment falsifies the
    target; the target itself is then a solution of that problem.
    """
    vs = sorted(set(variables))
    if len(vs) > SPLIT_BLOWUP_CAP:
        raise CapExceeded(
            f"splitting on {len(vs)} variables exceeds the blow-up guard "
            f"({SPLIT_BLOWUP_CAP})")
    if not implies_formula(formula, target):
        raise NotImplied("the target property is not implied by the formula")
    clauses: list[Clause] = []
    take: set[int] = set()
    for clause in formula.clauses:
        for a in _assignments(vs):
            try:
                widened = clause.extended(*maxterm(a).literals)
            except TautologyError:
                continue
            if evaluate(target, a) is False:
                take.add(len(clauses))
            clauses.append(widened)
    if not take:
        raise ValueError("the target excludes no assignment; nothing to extract")
    table = set(formula.vars) | set(vs)
    names = dict(formula.names)
    for v, n in target.names.items():
        names.setdefault(v, n)
    widened_formula = CnfFormula(clauses, vars=table, names=names)
    return PqeProblem(widened_formula, frozenset(take), frozenset(table - set(vs)))
