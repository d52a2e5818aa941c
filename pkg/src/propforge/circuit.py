"""Gate-level combinational circuits.

Netlist parsing and printing, plain and forced-gate simulation, clause-level
CNF encoding with a net/variable correspondence, and circuit generators used
by the test corpus (random circuits and the sorter family).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, NamedTuple

from .errors import PropforgeError
from .formula import Clause, CnfFormula, Literal, TautologyError


class NetlistError(PropforgeError):
    """Netlist structure error; carries the offending line when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class ParseError(NetlistError):
    pass


class MultipleDrivers(NetlistError):
    pass


class UndrivenNet(NetlistError):
    pass


class CombinationalCycle(NetlistError):
    pass


class PartialInput(PropforgeError):
    """Simulation input must assign every circuit input and nothing else."""


class BadGateIndex(PropforgeError):
    pass


class SizeCap(PropforgeError):
    pass


class GateKind(Enum):
    AND = "AND"
    OR = "OR"
    NAND = "NAND"
    NOR = "NOR"
    XOR = "XOR"
    XNOR = "XNOR"
    NOT = "NOT"
    BUF = "BUF"
    CONST0 = "CONST0"
    CONST1 = "CONST1"


ARITY = {
    GateKind.AND: 2, GateKind.OR: 2, GateKind.NAND: 2, GateKind.NOR: 2,
    GateKind.XOR: 2, GateKind.XNOR: 2, GateKind.NOT: 1, GateKind.BUF: 1,
    GateKind.CONST0: 0, GateKind.CONST1: 0,
}

_GATE_EVAL = {
    GateKind.AND: lambda a, b: a and b,
    GateKind.OR: lambda a, b: a or b,
    GateKind.NAND: lambda a, b: not (a and b),
    GateKind.NOR: lambda a, b: not (a or b),
    GateKind.XOR: lambda a, b: a != b,
    GateKind.XNOR: lambda a, b: a == b,
    GateKind.NOT: lambda a: not a,
    GateKind.BUF: lambda a: a,
    GateKind.CONST0: lambda: False,
    GateKind.CONST1: lambda: True,
}

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class Gate(NamedTuple):
    output: str
    kind: GateKind
    inputs: tuple[str, ...]
    line: int = 0


class Circuit:
    """A combinational netlist, immutable after construction.

    Gates are kept in a topological order (stable with respect to the order
    they were supplied in); inputs, internal nets and outputs are pairwise
    disjoint and every net has exactly one driver.
    """

    __slots__ = ("inputs", "outputs", "gates")

    def __init__(self, inputs: Iterable[str], outputs: Iterable[str],
                 gates: Iterable[Gate]):
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.gates = self._ordered(tuple(gates))
        self._validate()

    def _ordered(self, gates: tuple[Gate, ...]) -> tuple[Gate, ...]:
        input_set = set(self.inputs)
        if len(input_set) != len(self.inputs):
            dup = next(n for i, n in enumerate(self.inputs) if n in self.inputs[:i])
            raise MultipleDrivers(f"net {dup} driven more than once")
        driven = set(input_set)
        for g in gates:
            if g.output in driven:
                raise MultipleDrivers(f"net {g.output} driven more than once", g.line)
            driven.add(g.output)
        for g in gates:
            for src in g.inputs:
                if src not in driven:
                    raise UndrivenNet(f"net {src} is never driven", g.line)
        ordered: list[Gate] = []
        available = set(input_set)
        pending = list(gates)
        while pending:
            rest: list[Gate] = []
            progressed = False
            for g in pending:
                if all(s in available for s in g.inputs):
                    ordered.append(g)
                    available.add(g.output)
                    progressed = True
                else:
                    rest.append(g)
            if not progressed:
                bad = min(rest, key=lambda g: (g.line, g.output))
                raise CombinationalCycle(f"combinational cycle through net {bad.output}",
                                         bad.line)
            pending = rest
        return tuple(ordered)

    def _validate(self) -> None:
        input_set = set(self.inputs)
        driven = input_set | {g.output for g in self.gates}
        for g in self.gates:
            if len(g.inputs) != ARITY[g.kind]:
                raise ParseError(f"{g.kind.value} takes {ARITY[g.kind]} inputs", g.line)
        seen_out: set[str] = set()
        for z in self.outputs:
            if z in seen_out:
                raise ParseError(f"output {z} declared twice")
            seen_out.add(z)
            if z in input_set:
                raise ParseError(f"input {z} cannot also be an output")
            if z not in driven:
                raise UndrivenNet(f"output {z} is never driven")

    @property
    def internal_nets(self) -> tuple[str, ...]:
        z = set(self.outputs)
        return tuple(g.output for g in self.gates if g.output not in z)

    @property
    def nets(self) -> tuple[str, ...]:
        return self.inputs + tuple(g.output for g in self.gates)

    def __repr__(self) -> str:
        return (f"Circuit({len(self.inputs)} inputs, {len(self.gates)} gates, "
                f"{len(self.outputs)} outputs)")


@dataclass(frozen=True)
class SimResult:
    """A full, gate-consistent valuation of every net plus the output slice."""

    values: dict[str, bool]
    outputs: dict[str, bool]
    gate_evals: int


def _check_input(circuit: Circuit, assignment: Mapping[str, bool]) -> None:
    if set(assignment) != set(circuit.inputs):
        raise PartialInput("input assignment must cover exactly the circuit inputs")


def simulate(circuit: Circuit, inputs: Mapping[str, bool]) -> SimResult:
    """Evaluate every gate in topological order under the given input."""
    _check_input(circuit, inputs)
    values = {n: bool(inputs[n]) for n in circuit.inputs}
    for g in circuit.gates:
        values[g.output] = _GATE_EVAL[g.kind](*(values[s] for s in g.inputs))
    outputs = {z: values[z] for z in circuit.outputs}
    return SimResult(values, outputs, len(circuit.gates))


def simulate_forced(circuit: Circuit, inputs: Mapping[str, bool],
                    gate_index: int, value: bool) -> SimResult:
    """Like :func:`simulate` but gate `gate_index` outputs `value` regardless
    of its inputs; everything downstream sees the forced value."""
    if not 0 <= gate_index < len(circuit.gates):
        raise BadGateIndex(f"gate index {gate_index} out of range")
    _check_input(circuit, inputs)
    values = {n: bool(inputs[n]) for n in circuit.inputs}
    for gi, g in enumerate(circuit.gates):
        if gi == gate_index:
            values[g.output] = bool(value)
        else:
            values[g.output] = _GATE_EVAL[g.kind](*(values[s] for s in g.inputs))
    outputs = {z: values[z] for z in circuit.outputs}
    return SimResult(values, outputs, len(circuit.gates))


def _gate_cnf(kind: GateKind, ins: tuple[int, ...], out: int) -> list[Clause]:
    """Defining clauses of one gate: each clause is falsified exactly by the
    inconsistent input/output combinations it covers."""
    a = ins[0] if ins else 0
    b = ins[1] if len(ins) > 1 else 0
    if kind is GateKind.AND:
        rows = [[(i, True), (out, False)] for i in ins]
        rows.append([(i, False) for i in ins] + [(out, True)])
    elif kind is GateKind.OR:
        rows = [[(i, False), (out, True)] for i in ins]
        rows.append([(i, True) for i in ins] + [(out, False)])
    elif kind is GateKind.NAND:
        rows = [[(i, True), (out, True)] for i in ins]
        rows.append([(i, False) for i in ins] + [(out, False)])
    elif kind is GateKind.NOR:
        rows = [[(i, False), (out, False)] for i in ins]
        rows.append([(i, True) for i in ins] + [(out, True)])
    elif kind is GateKind.XOR:
        rows = [[(a, True), (b, True), (out, False)],
                [(a, True), (b, False), (out, True)],
                [(a, False), (b, True), (out, True)],
                [(a, False), (b, False), (out, False)]]
    elif kind is GateKind.XNOR:
        rows = [[(a, True), (b, True), (out, True)],
                [(a, True), (b, False), (out, False)],
                [(a, False), (b, True), (out, False)],
                [(a, False), (b, False), (out, True)]]
    elif kind is GateKind.NOT:
        rows = [[(a, True), (out, True)], [(a, False), (out, False)]]
    elif kind is GateKind.BUF:
        rows = [[(a, True), (out, False)], [(a, False), (out, True)]]
    elif kind is GateKind.CONST0:
        rows = [[(out, False)]]
    else:
        rows = [[(out, True)]]
    clauses = []
    for row in rows:
        try:
            clauses.append(Clause(Literal(v, p) for v, p in row))
        except TautologyError:
            # repeated input nets can make a row internally impossible
            continue
    return clauses


@dataclass(frozen=True)
class VarMap:
    """Bijection between circuit nets and CNF variables, plus the grouping of
    clause indices by the gate that produced them."""

    var_of_net: dict[str, int]
    net_of_var: dict[int, str]
    gate_clauses: tuple[tuple[int, ...], ...]
    clause_gate: tuple[int, ...]
    input_vars: tuple[int, ...]
    output_vars: tuple[int, ...]


def tseitin(circuit: Circuit) -> tuple[CnfFormula, VarMap]:
    """Clause-level encoding of the circuit, one clause block per gate.

    Every consistent valuation of the nets corresponds to a model of the
    returned formula and vice versa.  Variable ids are assigned to inputs
    first (declaration order), then to gate outputs in gate order.
    """
    var_of: dict[str, int] = {}
    for net in circuit.inputs:
        var_of[net] = len(var_of) + 1
    for g in circuit.gates:
        var_of[g.output] = len(var_of) + 1
    clauses: list[Clause] = []
    gate_clauses: list[tuple[int, ...]] = []
    clause_gate: list[int] = []
    for gi, g in enumerate(circuit.gates):
        block = _gate_cnf(g.kind, tuple(var_of[s] for s in g.inputs), var_of[g.output])
        gate_clauses.append(tuple(range(len(clauses), len(clauses) + len(block))))
        clause_gate.extend([gi] * len(block))
        clauses.extend(block)
    names = {v: n for n, v in var_of.items()}
    formula = CnfFormula(clauses, vars=var_of.values(), names=names)
    vm = VarMap(
        var_of_net=dict(var_of),
        net_of_var=names,
        gate_clauses=tuple(gate_clauses),
        clause_gate=tuple(clause_gate),
        input_vars=tuple(var_of[n] for n in circuit.inputs),
        output_vars=tuple(var_of[n] for n in circuit.outputs),
    )
    return formula, vm


def _tokenize(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _valid_name(tok: str) -> bool:
    return bool(_NAME_RE.match(tok))


def parse_netlist(text: str) -> Circuit:
    """Parse the line-oriented combinational netlist format.

    Directives: `INPUT <net>`, `OUTPUT <net>`, `GATE <net> = <KIND> <in...>`,
    with `#` starting a comment.  Names are case-sensitive identifiers.
    """
    inputs: list[str] = []
    outputs: list[str] = []
    gates: list[Gate] = []
    driver_line: dict[str, int] = {}
    output_line: dict[str, int] = {}
    for lineno, toks in _tokenize(text):
        head = toks[0]
        if head == "INPUT":
            if len(toks) != 2 or not _valid_name(toks[1]):
                raise ParseError("expected INPUT <net>", lineno)
            if toks[1] in driver_line:
                raise MultipleDrivers(f"net {toks[1]} driven more than once", lineno)
            driver_line[toks[1]] = lineno
            inputs.append(toks[1])
        elif head == "OUTPUT":
            if len(toks) != 2 or not _valid_name(toks[1]):
                raise ParseError("expected OUTPUT <net>", lineno)
            if toks[1] in output_line:
                raise ParseError(f"output {toks[1]} declared twice", lineno)
            output_line[toks[1]] = lineno
            outputs.append(toks[1])
        elif head == "GATE":
            gates.append(_parse_gate(toks, lineno, driver_line))
        elif head == "LATCH":
            raise ParseError("LATCH is not allowed in a combinational netlist", lineno)
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)
    for z, lineno in output_line.items():
        if z not in driver_line:
            raise UndrivenNet(f"output {z} is never driven", lineno)
        if z in inputs:
            raise ParseError(f"input {z} cannot also be an output", lineno)
    return Circuit(inputs, outputs, gates)


def _parse_gate(toks: list[str], lineno: int,
                driver_line: dict[str, int]) -> Gate:
    if len(toks) < 4 or toks[2] != "=":
        raise ParseError("expected GATE <net> = <KIND> <inputs...>", lineno)
    out = toks[1]
    if not _valid_name(out):
        raise ParseError(f"bad net name {out!r}", lineno)
    try:
        kind = GateKind(toks[3])
    except ValueError:
        raise ParseError(f"unknown gate kind {toks[3]!r}", lineno)
    srcs = tuple(toks[4:])
    if len(srcs) != ARITY[kind]:
        raise ParseError(f"{kind.value} takes {ARITY[kind]} inputs, got {len(srcs)}",
                         lineno)
    for s in srcs:
        if not _valid_name(s):
            raise ParseError(f"bad net name {s!r}", lineno)
    if out in driver_line:
        raise MultipleDrivers(f"net {out} driven more than once", lineno)
    driver_line[out] = lineno
    return Gate(out, kind, srcs, lineno)


def format_netlist(circuit: Circuit) -> str:
    """Printable netlist text; parsing it back yields an identical circuit."""
    lines = [f"INPUT {n}" for n in circuit.inputs]
    for g in circuit.gates:
        srcs = (" " + " ".join(g.inputs)) if g.inputs else ""
        lines.append(f"GATE {g.output} = {g.kind.value}{srcs}")
    lines.extend(f"OUTPUT {z}" for z in circuit.outputs)
    return "\n".join(lines) + "\n"


def build_sorter(bits: int, count: int, buggy: bool = False) -> Circuit:
    """An odd-even transposition sorting network over `count` numbers of
    `bits` bits each; outputs the input numbers in ascending order.

    The buggy variant pins every bit of the first (smallest) output number to
    constant 0, which still keeps the outputs sorted.
    """
    if bits < 1 or count < 2 or bits * count > 12:
        raise SizeCap("sorter is limited to bits >= 1, count >= 2, bits*count <= 12")

    def bit_names(prefix: str, i: int) -> list[str]:
        if bits == 1:
            return [f"{prefix}{i}"]
        return [f"{prefix}{i}_{bits - 1 - p}" for p in range(bits)]  # MSB first

    gates: list[Gate] = []

    def new_gate(name: str, kind: GateKind, *srcs: str) -> str:
        gates.append(Gate(name, kind, tuple(srcs)))
        return name

    def compare_swap(a: list[str], b: list[str], tag: str) -> tuple[list[str], list[str]]:
        # swap condition: the first number is strictly greater (MSB-first scan)
        gt = None
        eq = None
        for p in range(bits):
            nb = new_gate(f"{tag}_nb{p}", GateKind.NOT, b[p])
            d = new_gate(f"{tag}_d{p}", GateKind.AND, a[p], nb)
            if gt is None:
                gt = d
            else:
                e = new_gate(f"{tag}_e{p}", GateKind.AND, eq, d)
                gt = new_gate(f"{tag}_gt{p}", GateKind.OR, gt, e)
            if p < bits - 1:
                x = new_gate(f"{tag}_x{p}", GateKind.XNOR, a[p], b[p])
                eq = x if eq is None else new_gate(f"{tag}_eq{p}", GateKind.AND, eq, x)
        keep = new_gate(f"{tag}_keep", GateKind.NOT, gt)
        lo: list[str] = []
        hi: list[str] = []
        for p in range(bits):
            sb = new_gate(f"{tag}_lo_s{p}", GateKind.AND, gt, b[p])
            ka = new_gate(f"{tag}_lo_k{p}", GateKind.AND, keep, a[p])
            lo.append(new_gate(f"{tag}_lo{p}", GateKind.OR, sb, ka))
            sa = new_gate(f"{tag}_hi_s{p}", GateKind.AND, gt, a[p])
            kb = new_gate(f"{tag}_hi_k{p}", GateKind.AND, keep, b[p])
            hi.append(new_gate(f"{tag}_hi{p}", GateKind.OR, sa, kb))
        return lo, hi

    numbers = [bit_names("x", i) for i in range(1, count + 1)]
    inputs = [n for num in numbers for n in num]
    current = list(numbers)
    for rnd in range(count):
        for i in range(rnd % 2, count - 1, 2):
            lo, hi = compare_swap(current[i], current[i + 1], f"cs{rnd}_{i}")
            current[i], current[i + 1] = lo, hi

    outputs: list[str] = []
    for i in range(1, count + 1):
        znames = bit_names("z", i)
        for p, z in enumerate(znames):
            if buggy and i == 1:
                new_gate(z, GateKind.CONST0)
            else:
                new_gate(z, GateKind.BUF, current[i - 1][p])
            outputs.append(z)
    return Circuit(inputs, outputs, gates)


_TWO_INPUT = (GateKind.AND, GateKind.OR, GateKind.NAND, GateKind.NOR,
              GateKind.XOR, GateKind.XNOR)
_ONE_INPUT = (GateKind.NOT, GateKind.BUF)


def random_circuit(rng, n_inputs: int, n_gates: int, n_outputs: int) -> Circuit:
    """A random acyclic circuit; outputs are the last `n_outputs` gate nets.

    Deterministic for a given `random.Random` state.
    """
    if n_outputs > n_gates:
        raise ValueError("need at least as many gates as outputs")
    inputs = [f"x{i}" for i in range(1, n_inputs + 1)]
    nets = list(inputs)
    gates: list[Gate] = []

    def pick() -> str:
        # draw twice and keep the deeper net to encourage multi-level logic
        i = max(rng.randrange(len(nets)), rng.randrange(len(nets)))
        return nets[i]

    for gi in range(1, n_gates + 1):
        out = f"g{gi}"
        r = rng.random()
        if not nets or r >= 0.95:
            kind = GateKind.CONST0 if rng.random() < 0.5 else GateKind.CONST1
            srcs = ()
        elif r < 0.72:
            kind = _TWO_INPUT[rng.randrange(len(_TWO_INPUT))]
            srcs = (pick(), pick())
        else:
            kind = _ONE_INPUT[rng.randrange(2)]
            srcs = (pick(),)
        gates.append(Gate(out, kind, srcs))
        nets.append(out)
    outputs = [f"g{gi}" for gi in range(n_gates - n_outputs + 1, n_gates + 1)]
    return Circuit(inputs, outputs, gates)
