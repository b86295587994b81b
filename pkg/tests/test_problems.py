import io
import itertools
from collections import Counter

import numpy as np
import pytest

from mqc.errors import ContractError, ParseError
from mqc.ising import validate
from mqc.problems import (ChimeraSpec, CoefficientClass, chimera_edges,
                          chimera_instance, generate_instance, read_instance,
                          write_instance)


def degrees(edges, n):
    c = Counter()
    for i, j in edges:
        c[i] += 1
        c[j] += 1
    return [c[v] for v in range(n)]


class TestChimera:
    def test_single_cell(self):
        edges = chimera_edges(ChimeraSpec(1, 1, 4))
        assert len(edges) == 16
        assert max(degrees(edges, 8)) == 4

    def test_k11(self):
        assert chimera_edges(ChimeraSpec(1, 1, 1)) == [(0, 1)]

    def test_two_by_two(self):
        spec = ChimeraSpec(2, 2, 4)
        edges = chimera_edges(spec)
        assert spec.num_qubits == 32
        # no interior cell in a 2x2 grid, so the bound of 6 is not reached
        assert max(degrees(edges, 32)) == 5
        assert max(degrees(chimera_edges(ChimeraSpec(3, 3, 4)), 72)) == 6
        assert len(edges) == 80  # 4*16 intra + 8 vertical + 8 horizontal

    @pytest.mark.parametrize("m,c,k", list(itertools.product(range(1, 5), repeat=3)))
    def test_edge_count_and_degree(self, m, c, k):
        spec = ChimeraSpec(m, c, k)
        edges = chimera_edges(spec)
        assert len(edges) == m * c * k * k + (m - 1) * c * k + m * (c - 1) * k
        assert len(set(edges)) == len(edges)
        assert all(0 <= i < j < spec.num_qubits for i, j in edges)
        assert max(degrees(edges, spec.num_qubits)) <= k + 2

    def test_numbering(self):
        edges = set(chimera_edges(ChimeraSpec(2, 2, 4)))
        # left qubit 0 of cell (0,0) couples down to left qubit 0 of cell (1,0)
        assert (0, 16) in edges
        # right qubit 0 of cell (0,0) couples across to right qubit 0 of cell (0,1)
        assert (4, 12) in edges
        assert (0, 8) not in edges

    def test_zero_dimension(self):
        with pytest.raises(ContractError):
            ChimeraSpec(0, 1, 4)

    def test_parse(self):
        assert ChimeraSpec.parse("2,3,4") == ChimeraSpec(2, 3, 4)
        with pytest.raises(ContractError):
            ChimeraSpec.parse("2,3")


class TestGenerate:
    def test_deterministic(self):
        a = chimera_instance(ChimeraSpec(2, 2, 4), "normal", 17)
        b = chimera_instance(ChimeraSpec(2, 2, 4), "normal", 17)
        sa, sb = io.StringIO(), io.StringIO()
        write_instance(a, sa)
        write_instance(b, sb)
        assert sa.getvalue() == sb.getvalue()

    def test_binary_values(self):
        m = chimera_instance(ChimeraSpec(2, 2, 4), CoefficientClass.BINARY, 3)
        values = np.concatenate([m.h, m.edges[2]])
        assert set(values.tolist()) <= {-1.0, 1.0}

    def test_uniform_statistics(self):
        edges = [(i, i + 1) for i in range(4999)]
        m = generate_instance(edges, 5001, "uniform", 11)
        values = np.concatenate([m.h, m.edges[2]])
        assert len(values) == 10000
        assert np.all((values >= -1) & (values <= 1))
        assert abs(values.mean()) <= 0.05

    def test_normal_statistics(self):
        edges = [(i, i + 1) for i in range(4999)]
        m = generate_instance(edges, 5001, "normal", 11)
        values = np.concatenate([m.h, m.edges[2]])
        assert abs(values.mean()) <= 0.05
        assert abs(values.std() - 1.0) <= 0.05

    def test_seeds_differ(self):
        spec = ChimeraSpec(1, 1, 4)
        for seed in range(100):
            for cls in ("uniform", "normal"):
                assert chimera_instance(spec, cls, seed) != chimera_instance(spec, cls, seed + 1000)

    @pytest.mark.parametrize("cls", ["binary", "uniform", "normal"])
    def test_valid(self, cls):
        for seed in range(10):
            assert validate(chimera_instance(ChimeraSpec(2, 2, 4), cls, seed)).ok

    def test_invalid_edges(self):
        with pytest.raises(ContractError):
            generate_instance([(0, 5)], 3, "binary", 1)
        with pytest.raises(ContractError):
            generate_instance([(0, 1), (1, 0)], 3, "binary", 1)


class TestInstanceIO:
    def test_round_trip(self):
        for seed in range(10):
            m = chimera_instance(ChimeraSpec(2, 2, 4), "normal", seed)
            buf = io.StringIO()
            write_instance(m, buf)
            assert read_instance(io.StringIO(buf.getvalue())) == m

    def test_canonicalises_pair(self):
        text = '{"num_spins": 3, "h": [0, 0, 0], "couplers": [[3, 2, 0.5]]}'
        m = read_instance(io.StringIO(text))
        assert m.couplers == {(1, 2): 0.5}

    def test_duplicate_after_canonicalisation(self):
        text = '{"num_spins": 3, "h": [0, 0, 0], "couplers": [[2, 3, 0.5], [3, 2, 0.1]]}'
        with pytest.raises(ParseError) as exc:
            read_instance(io.StringIO(text))
        assert exc.value.location == "couplers[1]"

    def test_zero_coupler(self):
        text = '{"num_spins": 2, "h": [0, 0], "couplers": [[1, 2, 0.0]]}'
        with pytest.raises(ParseError, match="zero"):
            read_instance(io.StringIO(text))

    def test_malformed_json(self):
        with pytest.raises(ParseError) as exc:
            read_instance(io.StringIO('{"num_spins": 2,\n "h": [0, 0'))
        assert exc.value.location.startswith("line 2")

    def test_wrong_h_length(self):
        with pytest.raises(ParseError):
            read_instance(io.StringIO('{"num_spins": 2, "h": [0], "couplers": []}'))
