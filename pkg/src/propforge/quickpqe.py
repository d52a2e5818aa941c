"""Fast single-clause extraction driven by two circuit simulations.

For a chosen gate clause and a test vector, the clause is widened with the
maxterm of the test (splitting it on the circuit inputs).  Two simulations
then decide whether the widened clause is redundant under quantification of
the internal variables or yields a property that pins down the circuit's
response to that single test.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from .circuit import Circuit, PartialInput, simulate, simulate_forced, tseitin
from .errors import CapExceeded, PropforgeError
from .formula import Clause, CnfFormula, Literal, evaluate, maxterm
from .quant import PqeProblem
from .satcore import resolve_cap


class ClauseNotGateClause(PropforgeError):
    """The chosen clause is not one of a gate's defining clauses."""


class ClauseTouchesInputs(PropforgeError):
    """The chosen clause constrains a circuit input, so the input split is
    undefined for it."""


@dataclass(frozen=True)
class SingleTestReport:
    """The three defining conditions of a single-test property."""

    holds_off_test: bool          # true at every point whose input differs from the test
    accepts_test_output: bool     # true at (test, produced output)
    excludes_other_output: bool   # false at (test, z) for some other output z

    @property
    def is_single_test(self) -> bool:
        return (self.holds_off_test and self.accepts_test_output
                and self.excludes_other_output)


@dataclass(frozen=True)
class QuickPqeOutcome:
    redundant: bool
    solution: CnfFormula                 # empty when redundant
    problem: PqeProblem                  # the split problem that was solved
    first_outputs: dict[str, bool]
    second_outputs: dict[str, bool] | None
    gate_evals: int


def _split_problem(formula: CnfFormula, clause_index: int,
                   test_by_var: dict[int, bool],
                   internal_vars: frozenset[int]) -> PqeProblem:
    clause = formula.clauses[clause_index]
    rest = [c for i, c in enumerate(formula.clauses) if i != clause_index]
    members = [clause.extended(Literal(v, test_by_var[v]))
               for v in sorted(test_by_var)]
    widened = clause.extended(*maxterm(test_by_var).literals)
    clauses = rest + members + [widened]
    split = CnfFormula(clauses, vars=formula.vars, names=formula.names)
    return PqeProblem(split, frozenset({len(clauses) - 1}), internal_vars)


def quick_pqe(circuit: Circuit, clause_index: int, test: Mapping[str, bool],
              encoding: tuple[CnfFormula, "VarMap"] | None = None) -> QuickPqeOutcome:
    """Extract the test-widened copy of a gate clause using two simulations.

    Run 1 applies the test.  If the clause is satisfied by one of the gate's
    input values the widened clause is redundant.  Otherwise run 2 forces the
    gate output against the clause's output literal; identical outputs again
    mean redundancy, and differing outputs yield one clause per changed
    output: the test maxterm joined with the output literal from run 1.
    """
    formula, vm = encoding if encoding is not None else tseitin(circuit)
    if not 0 <= clause_index < len(formula.clauses):
        raise ClauseNotGateClause(f"clause index {clause_index} out of range")
    gate_index = vm.clause_gate[clause_index]
    gate = circuit.gates[gate_index]
    clause = formula.clauses[clause_index]
    out_var = vm.var_of_net[gate.output]
    in_vars = {vm.var_of_net[s] for s in gate.inputs}
    if out_var not in clause.vars or not (clause.vars - {out_var}) <= in_vars:
        raise ClauseNotGateClause(
            "clause must contain the gate output and only gate input variables")
    if clause.vars & set(vm.input_vars):
        raise ClauseTouchesInputs(
            "clause constrains a circuit input; choose a clause over internal nets")
    if set(test) != set(circuit.inputs):
        raise PartialInput("test must assign exactly the circuit inputs")
    test_by_var = {vm.var_of_net[n]: bool(test[n]) for n in circuit.inputs}
    internal = frozenset(formula.vars
                         - set(vm.input_vars) - set(vm.output_vars))
    problem = _split_problem(formula, clause_index, test_by_var, internal)
    free_vars = tuple(sorted(set(vm.input_vars) | set(vm.output_vars)))
    free_names = {v: vm.net_of_var[v] for v in free_vars}

    run1 = simulate(circuit, test)
    evals = run1.gate_evals
    for lit in clause.literals:
        if lit.var == out_var:
            continue
        if run1.values[vm.net_of_var[lit.var]] == lit.positive:
            empty = CnfFormula((), vars=free_vars, names=free_names)
            return QuickPqeOutcome(True, empty, problem, run1.outputs, None, evals)

    out_lit = clause.literal_of(out_var)
    run2 = simulate_forced(circuit, test, gate_index, not out_lit.positive)
    evals += run2.gate_evals
    if run2.outputs == run1.outputs:
        empty = CnfFormula((), vars=free_vars, names=free_names)
        return QuickPqeOutcome(True, empty, problem, run1.outputs, run2.outputs, evals)

    base = maxterm(test_by_var)
    clauses = []
    for z in circuit.outputs:
        first = run1.values[z]
        if first != run2.values[z]:
            clauses.append(base.extended(Literal(vm.var_of_net[z], first)))
    solution = CnfFormula(clauses, vars=free_vars, names=free_names)
    return QuickPqeOutcome(False, solution, problem, run1.outputs, run2.outputs, evals)


def check_single_test(candidate: CnfFormula, circuit: Circuit,
                      test: Mapping[str, bool],
                      encoding: tuple[CnfFormula, "VarMap"] | None = None,
                      cap: int | None = None) -> SingleTestReport:
    """Evaluate the three single-test conditions of `candidate` against the
    circuit's response to `test`, by enumeration over inputs and outputs."""
    _, vm = encoding if encoding is not None else tseitin(circuit)
    if set(test) != set(circuit.inputs):
        raise PartialInput("test must assign exactly the circuit inputs")
    xvars = tuple(sorted(vm.input_vars))
    zvars = tuple(sorted(vm.output_vars))
    limit = resolve_cap(cap)
    if len(xvars) + len(zvars) > limit:
        raise CapExceeded(
            f"{len(xvars) + len(zvars)} input/output variables exceed cap {limit}")
    test_point = {vm.var_of_net[n]: bool(test[n]) for n in circuit.inputs}
    produced = simulate(circuit, test).values
    produced_point = {vm.var_of_net[z]: produced[z] for z in circuit.outputs}

    holds_off_test = True
    for xbits in itertools.product((False, True), repeat=len(xvars)):
        xa = dict(zip(xvars, xbits))
        if xa == test_point:
            continue
        for zbits in itertools.product((False, True), repeat=len(zvars)):
            xa_za = {**xa, **dict(zip(zvars, zbits))}
            if evaluate(candidate, xa_za) is False:
                holds_off_test = False
                break
        if not holds_off_test:
            break

    accepts = evaluate(candidate, {**test_point, **produced_point}) is True

    excludes = False
    for zbits in itertools.product((False, True), repeat=len(zvars)):
        za = dict(zip(zvars, zbits))
        if za == produced_point:
            continue
        if evaluate(candidate, {**test_point, **za}) is False:
            excludes = True
            break

    return SingleTestReport(holds_off_test, accepts, excludes)
