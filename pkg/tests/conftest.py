import random
from pathlib import Path

import pytest

from tvdcamo.bench import Gate, Netlist, parse_bench

DATA_DIR = Path(__file__).parent / "data"

BINARY_KINDS = ("AND", "OR", "NAND", "NOR", "XOR", "XNOR")


@pytest.fixture(scope="session")
def c17_text() -> str:
    return (DATA_DIR / "c17.bench").read_text()


@pytest.fixture(scope="session")
def c17(c17_text) -> Netlist:
    return parse_bench(c17_text)


def random_netlist(
    rng: random.Random,
    max_inputs: int = 12,
    max_gates: int = 30,
    unary_weight: float = 0.15,
    wide_weight: float = 0.1,
) -> Netlist:
    """A random combinational DAG; gates only fan in to earlier nets."""
    n_in = rng.randint(1, max_inputs)
    inputs = [f"i{k}" for k in range(n_in)]
    nets = list(inputs)
    gates = []
    for j in range(rng.randint(1, max_gates)):
        name = f"g{j}"
        roll = rng.random()
        if roll < unary_weight:
            kind = rng.choice(("NOT", "BUF"))
            fanin = (rng.choice(nets),)
        elif roll < unary_weight + wide_weight:
            kind = rng.choice(BINARY_KINDS)
            fanin = tuple(rng.choice(nets) for _ in range(3))
        else:
            kind = rng.choice(BINARY_KINDS)
            fanin = tuple(rng.choice(nets) for _ in range(2))
        gates.append(Gate(name=name, kind=kind, fanin=fanin))
        nets.append(name)
    n_out = rng.randint(1, min(5, len(nets)))
    outputs = rng.sample(nets, n_out)
    return Netlist(inputs, outputs, gates)


def naive_eval(netlist: Netlist, vec, bindings=None):
    """Independent reference evaluator: memoized recursion over drivers."""
    env = dict(zip(netlist.inputs, (int(v) for v in vec)))

    ops = {
        "AND": lambda xs: int(all(xs)),
        "OR": lambda xs: int(any(xs)),
        "NAND": lambda xs: int(not all(xs)),
        "NOR": lambda xs: int(not any(xs)),
        "XOR": lambda xs: sum(xs) % 2,
        "XNOR": lambda xs: 1 - sum(xs) % 2,
        "NOT": lambda xs: 1 - xs[0],
        "BUF": lambda xs: xs[0],
    }

    def value(net):
        if net not in env:
            gate = netlist.gate_map[net]
            xs = [value(f) for f in gate.fanin]
            if gate.kind == "CAMO":
                env[net] = bindings[net].eval(xs[0], xs[1])
            else:
                env[net] = ops[gate.kind](xs)
        return env[net]

    return tuple(value(o) for o in netlist.outputs)
