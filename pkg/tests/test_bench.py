import random
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import naive_eval, random_netlist
from tvdcamo.bench import (
    Gate,
    Netlist,
    eval_logic,
    eval_vectors,
    exhaustive_input_arrays,
    parse_bench,
    serialize_bench,
)
from tvdcamo.errors import (
    BenchParseError,
    CycleError,
    NetlistError,
    UnprogrammedGateError,
    UsageError,
)
from tvdcamo.gates import TruthTable2


class TestParse:
    def test_c17_counts(self, c17):
        assert c17.inputs == ("1", "2", "3", "6", "7")
        assert c17.outputs == ("22", "23")
        assert len(c17.gates) == 6
        assert all(g.kind == "NAND" for g in c17.gates)

    def test_passthrough_netlist(self):
        n = parse_bench("INPUT(a)\nOUTPUT(a)\n")
        assert n.inputs == ("a",)
        assert n.outputs == ("a",)
        assert n.gates == ()
        assert eval_logic(n, [1]) == (1,)
        assert eval_logic(n, [0]) == (0,)

    def test_comments_blank_lines_crlf(self):
        text = "# header\r\nINPUT(a)\r\n\r\nOUTPUT(y)\r\ny = NOT(a)  # inverter\r\n"
        n = parse_bench(text)
        assert n.gates == (Gate("y", "NOT", ("a",)),)

    def test_lowercase_kind_accepted(self):
        n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = nand(a, b)\n")
        assert n.gates[0].kind == "NAND"

    def test_undefined_net_located(self):
        with pytest.raises(BenchParseError) as exc:
            parse_bench("INPUT(b)\nOUTPUT(y)\ny = AND(a, b)\n")
        assert "undefined net 'a'" in str(exc.value)
        assert exc.value.line == 3

    def test_duplicate_driver_located(self):
        with pytest.raises(BenchParseError) as exc:
            parse_bench("INPUT(a)\nINPUT(a)\n")
        assert exc.value.line == 2
        assert "multiple" in str(exc.value) or "already driven" in str(exc.value)

    def test_gate_redefining_input_rejected(self):
        with pytest.raises(BenchParseError):
            parse_bench("INPUT(a)\nINPUT(b)\na = AND(b, b)\n")

    def test_cycle_located(self):
        text = "INPUT(a)\nOUTPUT(x)\nx = AND(a, y)\ny = AND(a, x)\n"
        with pytest.raises(BenchParseError) as exc:
            parse_bench(text)
        assert "cycle" in str(exc.value)
        assert exc.value.line == 3

    def test_arity_mismatch_located(self):
        with pytest.raises(BenchParseError) as exc:
            parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a, a)\n")
        assert exc.value.line == 3
        assert "exactly 1" in str(exc.value)

    def test_nary_and_accepted(self):
        n = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\ny = AND(a, b, c)\n")
        assert eval_logic(n, [1, 1, 1]) == (1,)
        assert eval_logic(n, [1, 0, 1]) == (0,)

    def test_unknown_kind_located(self):
        with pytest.raises(BenchParseError) as exc:
            parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = XAND(a, b)\n")
        assert "unknown gate kind 'XAND'" in str(exc.value)
        assert exc.value.line == 4

    def test_unrecognized_statement_located(self):
        with pytest.raises(BenchParseError) as exc:
            parse_bench("INPUT(a)\nwhat is this\n")
        assert exc.value.line == 2

    def test_camo_arity_enforced(self):
        with pytest.raises(BenchParseError):
            parse_bench("INPUT(a)\nOUTPUT(y)\ny = CAMO(a)\n")

    def test_duplicate_output_rejected(self):
        with pytest.raises(BenchParseError):
            parse_bench("INPUT(a)\nOUTPUT(a)\nOUTPUT(a)\n")

    def test_undefined_output_located(self):
        with pytest.raises(BenchParseError) as exc:
            parse_bench("INPUT(a)\nOUTPUT(z)\n")
        assert "undefined net 'z'" in str(exc.value)
        assert exc.value.line == 2


class TestNetlistValidation:
    def test_programmatic_duplicate_driver(self):
        with pytest.raises(NetlistError):
            Netlist(["a"], ["a"], [Gate("a", "NOT", ("a",))])

    def test_programmatic_cycle(self):
        with pytest.raises(CycleError):
            Netlist(
                ["a"],
                ["x"],
                [Gate("x", "AND", ("a", "y")), Gate("y", "AND", ("a", "x"))],
            )

    def test_bad_identifier(self):
        with pytest.raises(NetlistError):
            Netlist(["a-b"], ["a-b"], [])

    def test_topological_order_handles_reordered_gates(self):
        # Gate list deliberately not in dependency order.
        n = Netlist(
            ["a", "b"],
            ["y"],
            [Gate("y", "AND", ("x", "b")), Gate("x", "NOT", ("a",))],
        )
        assert eval_logic(n, [0, 1]) == (1,)


class TestSerialize:
    def test_c17_round_trip(self, c17):
        assert parse_bench(serialize_bench(c17)) == c17

    def test_empty_netlist_is_comment_only(self):
        text = serialize_bench(Netlist([], [], []))
        lines = text.strip().split("\n")
        assert len(lines) == 1
        assert lines[0].startswith("#")
        assert parse_bench(text) == Netlist([], [], [])

    def test_camo_token_round_trips(self):
        n = Netlist(["a", "b"], ["y"], [Gate("y", "CAMO", ("a", "b"))])
        text = serialize_bench(n)
        assert "y = CAMO(a, b)" in text
        assert parse_bench(text) == n

    @given(seed=st.integers(0, 10**6))
    @settings(max_examples=60, deadline=None)
    def test_round_trip_random_netlists(self, seed):
        n = random_netlist(random.Random(seed))
        assert parse_bench(serialize_bench(n)) == n


class TestEval:
    def test_c17_all_zero_inputs(self, c17):
        # Hand evaluation of the six NANDs: 10=11=16=19=1, so 22=23=NAND(1,1)=0.
        assert naive_eval(c17, [0, 0, 0, 0, 0]) == (0, 0)
        assert eval_logic(c17, [0, 0, 0, 0, 0]) == (0, 0)

    def test_c17_exhaustive_against_naive(self, c17):
        for bits in product((0, 1), repeat=5):
            assert eval_logic(c17, bits) == naive_eval(c17, bits)

    def test_single_buf_identity(self):
        n = Netlist(["a"], ["y"], [Gate("y", "BUF", ("a",))])
        assert eval_logic(n, [0]) == (0,)
        assert eval_logic(n, [1]) == (1,)

    def test_camo_bound_to_xor_behaves_as_xor(self):
        camo = Netlist(["a", "b"], ["y"], [Gate("y", "CAMO", ("a", "b"))])
        plain = Netlist(["a", "b"], ["y"], [Gate("y", "XOR", ("a", "b"))])
        for bits in product((0, 1), repeat=2):
            bound = eval_logic(camo, bits, {"y": TruthTable2.XOR})
            assert bound == eval_logic(plain, bits)

    def test_unbound_camo_rejected(self):
        n = Netlist(["a", "b"], ["y"], [Gate("y", "CAMO", ("a", "b"))])
        with pytest.raises(UnprogrammedGateError) as exc:
            eval_logic(n, [0, 1])
        assert "unprogrammed camouflaged gate" in str(exc.value)

    def test_wrong_vector_length_rejected(self, c17):
        with pytest.raises(UsageError):
            eval_logic(c17, [0, 1])

    def test_non_bit_rejected(self, c17):
        with pytest.raises(UsageError):
            eval_logic(c17, [0, 1, 2, 0, 1])

    @given(seed=st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_vectorized_matches_naive_on_random_netlists(self, seed):
        rng = random.Random(seed)
        n = random_netlist(rng)
        vectors = [
            tuple(rng.randint(0, 1) for _ in n.inputs) for _ in range(16)
        ]
        arrays = {
            name: np.array([vec[j] for vec in vectors], dtype=bool)
            for j, name in enumerate(n.inputs)
        }
        outs = eval_vectors(n, arrays)
        for row, vec in enumerate(vectors):
            got = tuple(int(o[row]) for o in outs)
            assert got == naive_eval(n, vec)

    def test_exhaustive_input_arrays_first_input_is_msb(self):
        arrays = exhaustive_input_arrays(("a", "b"), 0, 4)
        assert arrays["a"].tolist() == [False, False, True, True]
        assert arrays["b"].tolist() == [False, True, False, True]
