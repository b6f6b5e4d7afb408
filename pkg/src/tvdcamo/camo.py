"""The obfuscation compiler: swap selected gates for camouflaged instances.

The rewritten netlist carries only the CAMO token for each selected gate; the
function lives exclusively in the companion CamoConfig (the defender's
secret), together with the pH pair that programs it.
"""

import json
import random
from dataclasses import dataclass

import numpy as np

from .bench import Gate, Netlist, eval_vectors, exhaustive_input_arrays, input_vector_from_index
from .device import IsfetParams
from .errors import (
    CoverageError,
    DomainError,
    NotCamouflageableError,
    SignatureMismatchError,
    UsageError,
)
from .gates import BranchAssignment, GatePhProgram, TruthTable2, assignment_for

# Gate kinds the 2-input camouflaged cell can stand in for, and the reverse
# mapping used when a config is folded back into a plain netlist.
KIND_TO_FUNCTION = {
    "AND": TruthTable2.AND,
    "OR": TruthTable2.OR,
    "NAND": TruthTable2.NAND,
    "NOR": TruthTable2.NOR,
    "XOR": TruthTable2.XOR,
    "XNOR": TruthTable2.XNOR,
}
FUNCTION_TO_KIND = {f: k for k, f in KIND_TO_FUNCTION.items()}

EXHAUSTIVE_INPUT_LIMIT = 24
_CHUNK_BITS = 16


@dataclass(frozen=True)
class CamoGateSpec:
    """Secret programming record for one camouflaged instance."""

    name: str
    function: TruthTable2
    assignment: BranchAssignment
    ph_low: float
    ph_high: float

    def __post_init__(self):
        if self.assignment != assignment_for(self.function):
            raise DomainError(
                f"gate {self.name!r}: assignment does not realize "
                f"{self.function.name}"
            )
        if not self.ph_low < self.ph_high:
            raise DomainError(
                f"gate {self.name!r}: ph_low ({self.ph_low!r}) must be below "
                f"ph_high ({self.ph_high!r})"
            )

    def program(self) -> GatePhProgram:
        return GatePhProgram(
            ph_low=self.ph_low, ph_high=self.ph_high, assignment=self.assignment
        )


@dataclass(frozen=True)
class CamoConfig:
    """The full secret: device calibration plus per-gate programming."""

    params: IsfetParams
    gates: tuple[CamoGateSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        names = [g.name for g in self.gates]
        if len(names) != len(set(names)):
            raise DomainError("duplicate gate entries in camouflage config")

    def bindings(self) -> dict[str, TruthTable2]:
        return {g.name: g.function for g in self.gates}

    def programs(self) -> dict[str, GatePhProgram]:
        return {g.name: g.program() for g in self.gates}

    def to_json(self) -> str:
        doc = {
            "params": {
                "k_gain": self.params.k_gain,
                "vth0": self.params.vth0,
                "ph_ref": self.params.ph_ref,
                "sensitivity": self.params.sensitivity,
                "vdd": self.params.vdd,
            },
            "gates": [
                {
                    "name": g.name,
                    "function_name": g.function.name,
                    "function_bits": int(g.function),
                    "assignment": list(g.assignment.lvt_on_out_side),
                    "ph_low": g.ph_low,
                    "ph_high": g.ph_high,
                }
                for g in self.gates
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CamoConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"malformed camouflage config: {exc}") from exc
        try:
            params = IsfetParams(**doc["params"])
            gates = []
            for entry in doc["gates"]:
                function = TruthTable2(entry["function_bits"])
                if function.name != entry["function_name"]:
                    raise DomainError(
                        f"gate {entry['name']!r}: function_name "
                        f"{entry['function_name']!r} does not match bits "
                        f"{entry['function_bits']}"
                    )
                gates.append(
                    CamoGateSpec(
                        name=entry["name"],
                        function=function,
                        assignment=BranchAssignment(tuple(entry["assignment"])),
                        ph_low=entry["ph_low"],
                        ph_high=entry["ph_high"],
                    )
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed camouflage config: {exc}") from exc
        return cls(params=params, gates=tuple(gates))


def _eligible(gate: Gate) -> str | None:
    """Why a gate cannot be camouflaged, or None if it can."""
    if gate.kind == "CAMO":
        return "already camouflaged"
    if gate.kind not in KIND_TO_FUNCTION:
        return f"kind {gate.kind} has no camouflaged equivalent"
    if len(gate.fanin) != 2:
        return f"has {len(gate.fanin)} inputs (camouflaged cell is 2-input)"
    return None


def camouflage(
    n: Netlist,
    gates: list[str] | None = None,
    fraction: float | None = None,
    seed: int | None = None,
    ph_low: float = 2.0,
    ph_high: float = 10.0,
    params: IsfetParams | None = None,
) -> tuple[Netlist, CamoConfig]:
    """Replace selected 2-input gates with camouflaged instances.

    Selection is either an explicit gate-name list or a fraction of the
    eligible gates chosen pseudo-randomly from ``seed`` (deterministic).
    Returns the rewritten netlist and the secret config that programs it
    back to the original function.
    """
    if params is None:
        params = IsfetParams()
    if (gates is None) == (fraction is None):
        raise UsageError("specify exactly one of gates= or fraction=")

    existing = [g.name for g in n.gates if g.kind == "CAMO"]
    if existing:
        raise NotCamouflageableError(
            f"netlist already contains camouflaged gates: {existing}"
        )

    if gates is not None:
        selected = list(gates)
        seen = set()
        for name in selected:
            if name in seen:
                raise UsageError(f"gate {name!r} selected twice")
            seen.add(name)
            if name not in n.gate_map:
                raise UsageError(f"no gate named {name!r}")
            problem = _eligible(n.gate_map[name])
            if problem:
                raise NotCamouflageableError(
                    f"gate {name!r} not camouflageable: {problem}"
                )
        chosen = set(selected)
    else:
        if not 0 <= fraction <= 1:
            raise UsageError(f"fraction must lie in [0, 1], got {fraction!r}")
        eligible = [g.name for g in n.gates if _eligible(g) is None]
        count = round(fraction * len(eligible))
        rng = random.Random(seed)
        chosen = set(rng.sample(eligible, count))

    new_gates = []
    specs = []
    for g in n.gates:
        if g.name in chosen:
            new_gates.append(Gate(name=g.name, kind="CAMO", fanin=g.fanin))
            function = KIND_TO_FUNCTION[g.kind]
            specs.append(
                CamoGateSpec(
                    name=g.name,
                    function=function,
                    assignment=assignment_for(function),
                    ph_low=ph_low,
                    ph_high=ph_high,
                )
            )
        else:
            new_gates.append(g)
    camo_netlist = Netlist(n.inputs, n.outputs, new_gates)
    return camo_netlist, CamoConfig(params=params, gates=tuple(specs))


def decamouflage(camo: Netlist, cfg: CamoConfig) -> Netlist:
    """Fold a config back into the netlist, restoring concrete gate kinds."""
    instance_names = set(camo.camo_gates)
    config_names = {g.name for g in cfg.gates}
    missing = sorted(instance_names - config_names)
    if missing:
        raise CoverageError(
            f"config missing entries for camouflaged gates: {missing}"
        )
    extra = sorted(config_names - instance_names)
    if extra:
        raise CoverageError(
            f"config entries with no camouflaged instance: {extra}"
        )
    kind_for = {}
    for spec in cfg.gates:
        kind = FUNCTION_TO_KIND.get(spec.function)
        if kind is None:
            raise DomainError(
                f"gate {spec.name!r}: function {spec.function.name} has no "
                f"concrete gate kind"
            )
        kind_for[spec.name] = kind
    new_gates = [
        Gate(name=g.name, kind=kind_for[g.name], fanin=g.fanin)
        if g.kind == "CAMO"
        else g
        for g in camo.gates
    ]
    return Netlist(camo.inputs, camo.outputs, new_gates)


@dataclass(frozen=True)
class EquivalenceResult:
    """Outcome of an equivalence check between two netlists."""

    equivalent: bool
    mode: str
    vectors_checked: int
    vectors_total: int
    counterexample: tuple[int, ...] | None = None
    outputs_a: tuple[int, ...] | None = None
    outputs_b: tuple[int, ...] | None = None


def _first_mismatch(outs_a, outs_b) -> int | None:
    mismatch = np.zeros(len(outs_a[0]) if outs_a else 0, dtype=bool)
    for oa, ob in zip(outs_a, outs_b):
        mismatch |= oa != ob
    if mismatch.any():
        return int(np.argmax(mismatch))
    return None


def verify_equivalence(
    a: Netlist,
    b: Netlist,
    bindings=None,
    mode: str = "exhaustive",
    n_vectors: int = 1024,
    seed: int = 0,
) -> EquivalenceResult:
    """Check functional equivalence of two netlists with shared I/O signature.

    ``bindings`` programs CAMO instances in either netlist (keyed by gate
    name). Exhaustive mode enumerates every input vector and is sound and
    complete up to 24 inputs; random mode samples ``n_vectors`` vectors from
    ``seed`` and reports the first counterexample it finds, if any.
    """
    if a.inputs != b.inputs or a.outputs != b.outputs:
        raise SignatureMismatchError(
            f"I/O signatures differ: {a.inputs}/{a.outputs} vs "
            f"{b.inputs}/{b.outputs}"
        )
    n_in = len(a.inputs)

    if mode == "exhaustive":
        if n_in > EXHAUSTIVE_INPUT_LIMIT:
            raise UsageError(
                f"exhaustive mode supports at most {EXHAUSTIVE_INPUT_LIMIT} "
                f"inputs, netlist has {n_in}"
            )
        total = 1 << n_in
        chunk = min(total, 1 << _CHUNK_BITS)
        for start in range(0, total, chunk):
            count = min(chunk, total - start)
            arrays = exhaustive_input_arrays(a.inputs, start, count)
            outs_a = eval_vectors(a, arrays, bindings)
            outs_b = eval_vectors(b, arrays, bindings)
            hit = _first_mismatch(outs_a, outs_b)
            if hit is not None:
                vec = input_vector_from_index(a.inputs, start + hit)
                return EquivalenceResult(
                    equivalent=False,
                    mode=mode,
                    vectors_checked=start + hit + 1,
                    vectors_total=total,
                    counterexample=vec,
                    outputs_a=tuple(int(o[hit]) for o in outs_a),
                    outputs_b=tuple(int(o[hit]) for o in outs_b),
                )
        return EquivalenceResult(
            equivalent=True, mode=mode, vectors_checked=total, vectors_total=total
        )

    if mode == "random":
        if n_vectors <= 0:
            raise UsageError(f"n_vectors must be positive, got {n_vectors!r}")
        rng = np.random.default_rng(seed)
        matrix = rng.integers(0, 2, size=(n_vectors, n_in), dtype=np.uint8)
        arrays = {
            name: matrix[:, j].astype(bool) for j, name in enumerate(a.inputs)
        }
        outs_a = eval_vectors(a, arrays, bindings)
        outs_b = eval_vectors(b, arrays, bindings)
        hit = _first_mismatch(outs_a, outs_b)
        if hit is not None:
            return EquivalenceResult(
                equivalent=False,
                mode=mode,
                vectors_checked=hit + 1,
                vectors_total=n_vectors,
                counterexample=tuple(int(v) for v in matrix[hit]),
                outputs_a=tuple(int(o[hit]) for o in outs_a),
                outputs_b=tuple(int(o[hit]) for o in outs_b),
            )
        return EquivalenceResult(
            equivalent=True,
            mode=mode,
            vectors_checked=n_vectors,
            vectors_total=n_vectors,
        )

    raise UsageError(f"unknown equivalence mode {mode!r}")
