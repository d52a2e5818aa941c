"""Propositional core: literals, clauses, CNF formulas, assignments.

All values are immutable after construction and safe to share between
threads.  Clause order inside a formula is stable, so clause indices can be
used as handles by the quantification modules.  Assignments are plain dicts
mapping variable ids to booleans.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Mapping, NamedTuple

from .errors import PropforgeError


class TautologyError(PropforgeError):
    """A clause would contain both literals of one variable."""


class NotResolvable(PropforgeError):
    """The two clauses do not clash on exactly the requested variable."""


class PartialAssignment(PropforgeError):
    """A full assignment was required but the domain does not match."""


class DimacsError(PropforgeError):
    """Malformed DIMACS input."""


class Literal(NamedTuple):
    """A variable or its negation."""

    var: int
    positive: bool = True

    def negated(self) -> "Literal":
        return Literal(self.var, not self.positive)

    def __invert__(self) -> "Literal":
        return self.negated()

    @property
    def order_key(self) -> tuple[int, bool]:
        # canonical order: by variable id, positive literal first
        return (self.var, not self.positive)


class Clause:
    """A disjunction of literals with at most one literal per variable.

    Duplicate literals merge silently; opposite literals of one variable are
    rejected with :class:`TautologyError`.  The empty clause is allowed and
    denotes falsity.  Literals are stored in canonical order.
    """

    __slots__ = ("literals",)

    def __init__(self, literals: Iterable[Literal | tuple[int, bool]] = ()):
        polarity: dict[int, bool] = {}
        for var, positive in literals:
            if var <= 0:
                raise ValueError(f"variable ids must be positive, got {var}")
            positive = bool(positive)
            old = polarity.get(var)
            if old is not None and old != positive:
                raise TautologyError(f"opposite literals of variable {var}")
            polarity[var] = positive
        self.literals = tuple(
            sorted((Literal(v, p) for v, p in polarity.items()),
                   key=lambda lit: lit.order_key))

    @property
    def vars(self) -> frozenset[int]:
        return frozenset(lit.var for lit in self.literals)

    def literal_of(self, var: int) -> Literal | None:
        for lit in self.literals:
            if lit.var == var:
                return lit
        return None

    def extended(self, *extra: Literal) -> "Clause":
        """A new clause with the given literals added (may raise TautologyError)."""
        return Clause(self.literals + tuple(extra))

    @property
    def order_key(self) -> tuple[tuple[int, bool], ...]:
        return tuple(lit.order_key for lit in self.literals)

    def __iter__(self):
        return iter(self.literals)

    def __len__(self) -> int:
        return len(self.literals)

    def __contains__(self, lit: Literal) -> bool:
        return lit in self.literals

    def __eq__(self, other) -> bool:
        if not isinstance(other, Clause):
            return NotImplemented
        return self.literals == other.literals

    def __hash__(self) -> int:
        return hash(self.literals)

    def __repr__(self) -> str:
        body = " ".join(("" if p else "-") + str(v) for v, p in self.literals)
        return f"Clause({body})"


class CnfFormula:
    """An ordered conjunction of clauses plus a variable table.

    The table may declare variables that occur in no clause (circuit nets,
    DIMACS headers).  Names, when present, are unique per formula.
    """

    __slots__ = ("clauses", "_vars", "_names", "_by_name", "_compiled")

    def __init__(self,
                 clauses: Iterable[Clause] = (),
                 vars: Iterable[int] = (),
                 names: Mapping[int, str] | None = None):
        self.clauses = tuple(clauses)
        table = set(vars)
        for c in self.clauses:
            table.update(c.vars)
        name_map = dict(names or {})
        table.update(name_map)
        if any(v <= 0 for v in table):
            raise ValueError("variable ids must be positive")
        if len(set(name_map.values())) != len(name_map):
            raise ValueError("variable names must be unique")
        self._vars = frozenset(table)
        self._names = name_map
        self._by_name = {n: v for v, n in name_map.items()}
        self._compiled = None

    @property
    def vars(self) -> frozenset[int]:
        return self._vars

    @property
    def names(self) -> dict[int, str]:
        return self._names

    def name_of(self, var: int) -> str | None:
        return self._names.get(var)

    def var_named(self, name: str) -> int | None:
        return self._by_name.get(name)

    @property
    def var_order(self) -> tuple[int, ...]:
        return tuple(sorted(self._vars))

    def with_clauses(self, extra: Iterable[Clause]) -> "CnfFormula":
        return CnfFormula(self.clauses + tuple(extra), self._vars, self._names)

    def without_clause(self, index: int) -> "CnfFormula":
        kept = list(self.clauses)
        del kept[index]
        return CnfFormula(kept, self._vars, self._names)

    def subset(self, indices: Iterable[int]) -> "CnfFormula":
        picked = [self.clauses[i] for i in sorted(set(indices))]
        return CnfFormula(picked, self._vars, self._names)

    def __len__(self) -> int:
        return len(self.clauses)

    def __eq__(self, other) -> bool:
        # formulas compare equal iff their sorted clause sequences are equal
        if not isinstance(other, CnfFormula):
            return NotImplemented
        mine = sorted(c.order_key for c in self.clauses)
        theirs = sorted(c.order_key for c in other.clauses)
        return mine == theirs

    __hash__ = None

    def __repr__(self) -> str:
        return f"CnfFormula({len(self.clauses)} clauses, {len(self._vars)} vars)"


def evaluate(formula: CnfFormula, assignment: Mapping[int, bool]) -> bool | None:
    """Three-valued evaluation: True, False, or None for undetermined.

    False as soon as some clause has every literal assigned and falsified;
    True iff every clause has a satisfied literal; None otherwise.
    """
    any_unknown = False
    for clause in formula.clauses:
        sat = False
        unknown = False
        for var, positive in clause.literals:
            val = assignment.get(var)
            if val is None:
                unknown = True
            elif val == positive:
                sat = True
                break
        if sat:
            continue
        if unknown:
            any_unknown = True
        else:
            return False
    return None if any_unknown else True


def resolve(first: Clause, second: Clause, var: int) -> Clause:
    """Resolvent of two clauses clashing on exactly `var`."""
    clashes = [v for v in sorted(first.vars & second.vars)
               if first.literal_of(v).positive != second.literal_of(v).positive]
    if clashes != [var]:
        where = clashes if clashes else "no variables"
        raise NotResolvable(f"clauses clash on {where}, not exactly on variable {var}")
    return Clause([lit for lit in (*first, *second) if lit.var != var])


def maxterm(assignment: Mapping[int, bool],
            variables: Iterable[int] | None = None) -> Clause:
    """The longest clause falsified by `assignment` and by no other full
    assignment to its domain.

    When `variables` is given the assignment must be full over exactly that
    set, otherwise :class:`PartialAssignment` is raised.
    """
    if variables is not None:
        wanted = set(variables)
        if wanted != set(assignment):
            raise PartialAssignment(
                "assignment domain does not equal the requested variable set")
    return Clause(Literal(v, not bool(assignment[v])) for v in assignment)


def count_literals(formula: CnfFormula) -> int:
    """Total number of literal occurrences (sum of clause sizes)."""
    return sum(len(c) for c in formula.clauses)


def maxterm_cnf(variables: Iterable[int],
                predicate: Callable[[dict[int, bool]], bool],
                names: Mapping[int, str] | None = None) -> CnfFormula:
    """Canonical CNF whose models over `variables` are exactly the assignments
    where `predicate` holds.  One maxterm per falsifying assignment, in
    ascending assignment order (lowest-id variable most significant)."""
    vs = sorted(set(variables))
    clauses = []
    for bits in itertools.product((False, True), repeat=len(vs)):
        a = dict(zip(vs, bits))
        if not predicate(a):
            clauses.append(maxterm(a))
    return CnfFormula(clauses, vars=vs, names=names)


def map_vars(formula: CnfFormula,
             mapping: Mapping[int, int],
             names: Mapping[int, str] | None = None) -> CnfFormula:
    """Rename variables through `mapping` (identity for ids not mapped)."""
    clauses = [Clause((mapping.get(v, v), p) for v, p in c.literals)
               for c in formula.clauses]
    table = {mapping.get(v, v) for v in formula.vars}
    return CnfFormula(clauses, vars=table, names=names or {})


def conjoin(*formulas: CnfFormula) -> CnfFormula:
    """Concatenate clause lists and merge variable tables.

    Name tables must agree where they overlap.
    """
    clauses: list[Clause] = []
    table: set[int] = set()
    names: dict[int, str] = {}
    for f in formulas:
        clauses.extend(f.clauses)
        table.update(f.vars)
        for v, n in f.names.items():
            if names.get(v, n) != n:
                raise ValueError(f"conflicting names for variable {v}")
            names[v] = n
    return CnfFormula(clauses, vars=table, names=names)


def write_dimacs(formula: CnfFormula) -> str:
    """DIMACS text; named variables are recorded as `c var <id> <name>` lines."""
    lines = [f"c var {v} {formula.names[v]}" for v in sorted(formula.names)]
    top = max(formula.vars, default=0)
    lines.append(f"p cnf {top} {len(formula.clauses)}")
    for clause in formula.clauses:
        toks = [str(v if p else -v) for v, p in clause.literals]
        toks.append("0")
        lines.append(" ".join(toks))
    return "\n".join(lines) + "\n"


def read_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS text, honouring `c var <id> <name>` symbol comments."""
    names: dict[int, str] = {}
    declared: tuple[int, int] | None = None
    body: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line[0] == "c":
            parts = line.split()
            if len(parts) >= 4 and parts[1] == "var":
                try:
                    v = int(parts[2])
                except ValueError:
                    raise DimacsError(f"line {lineno}: bad variable id in symbol comment")
                if v in names or parts[3] in names.values():
                    raise DimacsError(f"line {lineno}: duplicate symbol declaration")
                names[v] = parts[3]
            continue
        if line[0] == "p":
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: bad problem line")
            try:
                declared = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"line {lineno}: bad problem line")
            continue
        if declared is None:
            raise DimacsError(f"line {lineno}: clause before the problem line")
        try:
            body.extend(int(t) for t in line.split())
        except ValueError:
            raise DimacsError(f"line {lineno}: non-integer literal")
    if declared is None:
        raise DimacsError("missing problem line")
    nvars, nclauses = declared
    clauses: list[Clause] = []
    current: list[Literal] = []
    for tok in body:
        if tok == 0:
            try:
                clauses.append(Clause(current))
            except TautologyError as exc:
                raise DimacsError(f"clause {len(clauses) + 1}: {exc}")
            current = []
        else:
            v = abs(tok)
            if v > nvars:
                raise DimacsError(f"literal {tok} exceeds declared variable count {nvars}")
            current.append(Literal(v, tok > 0))
    if current:
        raise DimacsError("trailing literals without a terminating 0")
    if len(clauses) != nclauses:
        raise DimacsError(f"expected {nclauses} clauses, found {len(clauses)}")
    for v in names:
        if v > nvars:
            raise DimacsError(f"symbol comment names undeclared variable {v}")
    return CnfFormula(clauses, vars=range(1, nvars + 1), names=names)
