"""Combinational gate-level netlists in ISCAS .bench format.

Grammar (one statement per line, ``#`` starts a comment, blank lines ignored)::

    INPUT(a)
    OUTPUT(y)
    y = AND(a, b)

Gate kinds: AND, OR, NAND, NOR, XOR, XNOR (2+ inputs, XOR/XNOR n-ary parity),
NOT, BUF (1 input), plus the extension token CAMO(a, b) for a camouflaged
2-input instance whose function is supplied externally at evaluation time.
Net names are case-sensitive ``[A-Za-z0-9_]+``; CRLF input is tolerated.
"""

import re
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import (
    BenchParseError,
    CycleError,
    NetlistError,
    UnprogrammedGateError,
    UsageError,
)
from .gates import TruthTable2

GATE_KINDS = frozenset(
    {"AND", "OR", "NAND", "NOR", "XOR", "XNOR", "NOT", "BUF", "CAMO"}
)
UNARY_KINDS = frozenset({"NOT", "BUF"})

_NAME_RE = re.compile(r"^[A-Za-z0-9_]+$")
_IO_RE = re.compile(r"^\s*(INPUT|OUTPUT)\s*\(\s*([A-Za-z0-9_]+)\s*\)\s*$")
_GATE_RE = re.compile(
    r"^\s*([A-Za-z0-9_]+)\s*=\s*([A-Za-z0-9_]+)\s*\(\s*([^()]*?)\s*\)\s*$"
)


def _check_arity(kind: str, n: int) -> str | None:
    if kind in UNARY_KINDS:
        if n != 1:
            return f"{kind} takes exactly 1 input, got {n}"
    elif kind == "CAMO":
        if n != 2:
            return f"CAMO takes exactly 2 inputs, got {n}"
    elif n < 2:
        return f"{kind} takes at least 2 inputs, got {n}"
    return None


@dataclass(frozen=True)
class Gate:
    """One gate: the net it drives, its kind, and its ordered fan-in nets."""

    name: str
    kind: str
    fanin: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "fanin", tuple(self.fanin))
        if not _NAME_RE.match(self.name):
            raise NetlistError(f"invalid net name {self.name!r}")
        if self.kind not in GATE_KINDS:
            raise NetlistError(f"unknown gate kind {self.kind!r}")
        problem = _check_arity(self.kind, len(self.fanin))
        if problem:
            raise NetlistError(f"gate {self.name!r}: {problem}")
        for f in self.fanin:
            if not _NAME_RE.match(f):
                raise NetlistError(f"gate {self.name!r}: invalid net name {f!r}")


class Netlist:
    """An immutable combinational netlist with single-driver nets.

    Construction validates the structural invariants (every net has exactly
    one driver, every fan-in is defined, the gate graph is acyclic) and
    caches a topological gate order for evaluation.
    """

    def __init__(self, inputs, outputs, gates):
        self.inputs: tuple[str, ...] = tuple(inputs)
        self.outputs: tuple[str, ...] = tuple(outputs)
        self.gates: tuple[Gate, ...] = tuple(gates)
        self._validate()

    def _validate(self):
        drivers: set[str] = set()
        for name in self.inputs:
            if not _NAME_RE.match(name):
                raise NetlistError(f"invalid net name {name!r}")
            if name in drivers:
                raise NetlistError(f"net {name!r} has multiple drivers")
            drivers.add(name)
        self.gate_map: dict[str, Gate] = {}
        for g in self.gates:
            if g.name in drivers:
                raise NetlistError(f"net {g.name!r} has multiple drivers")
            drivers.add(g.name)
            self.gate_map[g.name] = g
        for g in self.gates:
            for f in g.fanin:
                if f not in drivers:
                    raise NetlistError(f"undefined net {f!r} in gate {g.name!r}")
        seen_out: set[str] = set()
        for o in self.outputs:
            if o not in drivers:
                raise NetlistError(f"undefined net {o!r} in outputs")
            if o in seen_out:
                raise NetlistError(f"output {o!r} listed twice")
            seen_out.add(o)
        self.topo_gates: tuple[Gate, ...] = self._topo_sort()

    def _topo_sort(self) -> tuple[Gate, ...]:
        # Kahn's algorithm over gate-to-gate dependencies; leftovers form a cycle.
        indeg = {g.name: 0 for g in self.gates}
        users: dict[str, list[str]] = {g.name: [] for g in self.gates}
        for g in self.gates:
            for f in g.fanin:
                if f in self.gate_map:
                    indeg[g.name] += 1
                    users[f].append(g.name)
        ready = [g.name for g in self.gates if indeg[g.name] == 0]
        order: list[Gate] = []
        while ready:
            name = ready.pop()
            order.append(self.gate_map[name])
            for u in users[name]:
                indeg[u] -= 1
                if indeg[u] == 0:
                    ready.append(u)
        if len(order) != len(self.gates):
            stuck = [g.name for g in self.gates if indeg[g.name] > 0]
            raise CycleError(stuck)
        return tuple(order)

    @property
    def camo_gates(self) -> tuple[str, ...]:
        """Names of camouflaged instances, in file order."""
        return tuple(g.name for g in self.gates if g.kind == "CAMO")

    def __eq__(self, other):
        if not isinstance(other, Netlist):
            return NotImplemented
        return (
            self.inputs == other.inputs
            and self.outputs == other.outputs
            and self.gates == other.gates
        )

    def __repr__(self):
        return (
            f"Netlist({len(self.inputs)} inputs, {len(self.outputs)} outputs, "
            f"{len(self.gates)} gates)"
        )


def parse_bench(text: str) -> Netlist:
    """Parse .bench source into a Netlist, or raise a located BenchParseError."""
    inputs: list[str] = []
    outputs: list[str] = []
    gates: list[Gate] = []
    driver_lines: dict[str, int] = {}
    output_lines: dict[str, int] = {}
    gate_lines: dict[str, int] = {}
    fanin_sites: list[tuple[str, str, int, int]] = []  # gate, net, line, col

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip("\r")
        if not line.strip():
            continue
        io_m = _IO_RE.match(line)
        if io_m:
            keyword, name = io_m.group(1), io_m.group(2)
            if keyword == "INPUT":
                if name in driver_lines:
                    raise BenchParseError(
                        f"net {name!r} already driven at line {driver_lines[name]}",
                        lineno,
                        io_m.start(2) + 1,
                    )
                driver_lines[name] = lineno
                inputs.append(name)
            else:
                if name in output_lines:
                    raise BenchParseError(
                        f"output {name!r} already listed at line {output_lines[name]}",
                        lineno,
                        io_m.start(2) + 1,
                    )
                output_lines[name] = lineno
                outputs.append(name)
            continue
        gate_m = _GATE_RE.match(line)
        if gate_m:
            name, kind_tok, args = gate_m.group(1), gate_m.group(2), gate_m.group(3)
            kind = kind_tok.upper()
            if kind not in GATE_KINDS:
                raise BenchParseError(
                    f"unknown gate kind {kind_tok!r}", lineno, gate_m.start(2) + 1
                )
            if name in driver_lines:
                raise BenchParseError(
                    f"net {name!r} already driven at line {driver_lines[name]}",
                    lineno,
                    gate_m.start(1) + 1,
                )
            fanin: list[str] = []
            args_base = gate_m.start(3)
            pos = 0
            for tok in args.split(","):
                stripped = tok.strip()
                col = args_base + pos + tok.index(stripped) + 1 if stripped else args_base + pos + 1
                if not stripped or not _NAME_RE.match(stripped):
                    raise BenchParseError(
                        f"invalid net name {stripped!r}", lineno, col
                    )
                fanin.append(stripped)
                fanin_sites.append((name, stripped, lineno, col))
                pos += len(tok) + 1
            problem = _check_arity(kind, len(fanin))
            if problem:
                raise BenchParseError(problem, lineno, gate_m.start(2) + 1)
            driver_lines[name] = lineno
            gate_lines[name] = lineno
            gates.append(Gate(name=name, kind=kind, fanin=tuple(fanin)))
            continue
        col = len(line) - len(line.lstrip()) + 1
        raise BenchParseError(f"unrecognized statement {line.strip()!r}", lineno, col)

    for gate_name, net, lineno, col in fanin_sites:
        if net not in driver_lines:
            raise BenchParseError(f"undefined net {net!r}", lineno, col)
    for name in outputs:
        if name not in driver_lines:
            raise BenchParseError(f"undefined net {name!r}", output_lines[name])

    try:
        return Netlist(inputs, outputs, gates)
    except CycleError as exc:
        first = min(exc.cycle, key=lambda n: gate_lines.get(n, 0))
        raise BenchParseError(str(exc), gate_lines.get(first, 1)) from exc


def serialize_bench(n: Netlist, header: str = "tvdcamo netlist") -> str:
    """Serialize a Netlist to .bench text.

    The output round-trips: parsing it yields a structurally equal Netlist.
    CAMO instances keep the CAMO token, so the text never encodes their
    function.
    """
    lines = [f"# {header}"]
    lines.extend(f"INPUT({name})" for name in n.inputs)
    lines.extend(f"OUTPUT({name})" for name in n.outputs)
    lines.extend(
        f"{g.name} = {g.kind}({', '.join(g.fanin)})" for g in n.gates
    )
    return "\n".join(lines) + "\n"


def _apply_gate(gate: Gate, fan: list[np.ndarray], bindings) -> np.ndarray:
    kind = gate.kind
    if kind == "NOT":
        return ~fan[0]
    if kind == "BUF":
        return fan[0]
    if kind == "AND":
        return reduce(np.logical_and, fan)
    if kind == "NAND":
        return ~reduce(np.logical_and, fan)
    if kind == "OR":
        return reduce(np.logical_or, fan)
    if kind == "NOR":
        return ~reduce(np.logical_or, fan)
    if kind == "XOR":
        return reduce(np.logical_xor, fan)
    if kind == "XNOR":
        return ~reduce(np.logical_xor, fan)
    # CAMO: the bound function may be one TruthTable2 for the whole batch or
    # a uint8 array of per-element function values (used by attack pruning).
    if bindings is None or gate.name not in bindings:
        raise UnprogrammedGateError(
            f"unprogrammed camouflaged gate {gate.name!r}"
        )
    bound = bindings[gate.name]
    m = (fan[0].astype(np.uint8) << 1) | fan[1].astype(np.uint8)
    if isinstance(bound, np.ndarray):
        return ((bound >> (3 - m).astype(np.uint8)) & 1).astype(bool)
    bits = np.array(TruthTable2(bound).minterm_bits, dtype=bool)
    return bits[m]


def eval_vectors(n: Netlist, input_arrays: dict, bindings=None) -> list[np.ndarray]:
    """Evaluate many input vectors at once.

    ``input_arrays`` maps every primary input name to a same-length boolean
    array; returns one boolean array per primary output, in output order.
    """
    missing = [name for name in n.inputs if name not in input_arrays]
    if missing:
        raise UsageError(f"missing value arrays for inputs {missing}")
    values: dict[str, np.ndarray] = {
        name: np.asarray(input_arrays[name], dtype=bool) for name in n.inputs
    }
    for gate in n.topo_gates:
        values[gate.name] = _apply_gate(
            gate, [values[f] for f in gate.fanin], bindings
        )
    return [values[o] for o in n.outputs]


def eval_logic(n: Netlist, inputs, bindings=None) -> tuple[int, ...]:
    """Evaluate one input vector (bits in primary-input order)."""
    vec = list(inputs)
    if len(vec) != len(n.inputs):
        raise UsageError(
            f"expected {len(n.inputs)} input bits, got {len(vec)}"
        )
    for bit in vec:
        if bit not in (0, 1, False, True):
            raise UsageError(f"input bits must be 0/1, got {bit!r}")
    arrays = {
        name: np.array([bool(bit)]) for name, bit in zip(n.inputs, vec)
    }
    outs = eval_vectors(n, arrays, bindings)
    return tuple(int(o[0]) for o in outs)


def exhaustive_input_arrays(
    names: tuple[str, ...], start: int, count: int
) -> dict[str, np.ndarray]:
    """Input arrays for global vector indices [start, start+count).

    Vector index bit (n-1-j) drives input j, so the first-listed input is the
    most significant bit of the index.
    """
    n = len(names)
    idx = np.arange(start, start + count, dtype=np.int64)
    return {
        name: ((idx >> (n - 1 - j)) & 1).astype(bool)
        for j, name in enumerate(names)
    }


def input_vector_from_index(names: tuple[str, ...], index: int) -> tuple[int, ...]:
    """The bit vector a global exhaustive index denotes, in input order."""
    n = len(names)
    return tuple((index >> (n - 1 - j)) & 1 for j in range(n))
