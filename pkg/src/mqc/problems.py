"""Random benchmark instances on Chimera graphs.

Chimera(M, C, K) is an M x C grid of unit cells, each a complete bipartite
graph K_{K,K} between a left and a right shore.  Left-shore qubit ``k`` of a
cell couples to left-shore qubit ``k`` of the cells above and below it;
right-shore qubits couple the same way to the cells left and right.  With
K = 4 every qubit has at most six neighbours.

Vertices are numbered cell-major (row, then column), left shore before right
shore: qubit ``k`` of the left shore in cell ``(r, c)`` is
``(r*C + c) * 2K + k`` and the right-shore one is that plus ``K``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .errors import ContractError
from .formats import read_instance, write_instance  # noqa: F401  (re-exported)
from .ising import IsingModel
from .rng import SplitMix64


@dataclass(frozen=True)
class ChimeraSpec:
    grid_rows: int = 4
    grid_cols: int = 4
    shore_size: int = 4

    def __post_init__(self):
        for name in ("grid_rows", "grid_cols", "shore_size"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ContractError(f"{name} must be a positive integer, got {value!r}")

    @property
    def num_qubits(self) -> int:
        return self.grid_rows * self.grid_cols * 2 * self.shore_size

    @classmethod
    def parse(cls, text: str) -> "ChimeraSpec":
        """Parse ``"M,C,K"``."""
        try:
            m, c, k = (int(part) for part in text.split(","))
        except ValueError:
            raise ContractError(f"expected M,C,K, got {text!r}") from None
        return cls(m, c, k)

    def as_list(self) -> list[int]:
        return [self.grid_rows, self.grid_cols, self.shore_size]


class CoefficientClass(str, enum.Enum):
    BINARY = "binary"
    UNIFORM = "uniform"
    NORMAL = "normal"

    def draw(self, rng: SplitMix64) -> float:
        if self is CoefficientClass.BINARY:
            return float(rng.sign())
        if self is CoefficientClass.UNIFORM:
            return rng.uniform_symmetric()
        return rng.normal()


def chimera_edges(spec: ChimeraSpec) -> list[tuple[int, int]]:
    """Canonical ``(i, j)``, ``i < j`` edge list of a Chimera graph, sorted."""
    m, c, k = spec.grid_rows, spec.grid_cols, spec.shore_size

    def left(r, col, q):
        return (r * c + col) * 2 * k + q

    def right(r, col, q):
        return (r * c + col) * 2 * k + k + q

    edges = []
    for r in range(m):
        for col in range(c):
            for a in range(k):
                for b in range(k):
                    edges.append((left(r, col, a), right(r, col, b)))
            for q in range(k):
                if r + 1 < m:
                    edges.append((left(r, col, q), left(r + 1, col, q)))
                if col + 1 < c:
                    edges.append((right(r, col, q), right(r, col + 1, q)))
    return sorted((min(e), max(e)) for e in edges)


def generate_instance(edges: Sequence[tuple[int, int]], num_vertices: int,
                      coefficient_class: CoefficientClass | str, seed: int) -> IsingModel:
    """Random Ising model over ``edges``.

    Draws come from one ``SplitMix64(seed)`` stream: all fields in vertex
    order first, then couplers in canonical edge order.  A draw of exactly
    zero is redrawn so that no coupler (or field) vanishes.
    """
    cls = CoefficientClass(coefficient_class)
    if num_vertices < 1:
        raise ContractError("num_vertices must be positive")
    canonical = []
    seen = set()
    for i, j in edges:
        if not (0 <= i < num_vertices and 0 <= j < num_vertices) or i == j:
            raise ContractError(f"invalid edge ({i}, {j}) for {num_vertices} vertices")
        pair = (min(i, j), max(i, j))
        if pair in seen:
            raise ContractError(f"duplicate edge {pair}")
        seen.add(pair)
        canonical.append(pair)
    canonical.sort()

    rng = SplitMix64(seed)

    def nonzero():
        while True:
            x = cls.draw(rng)
            if x != 0.0:
                return x

    h = [nonzero() for _ in range(num_vertices)]
    couplers = [(i, j, nonzero()) for i, j in canonical]
    return IsingModel(h, couplers)


def chimera_instance(spec: ChimeraSpec, coefficient_class: CoefficientClass | str, seed: int) -> IsingModel:
    return generate_instance(chimera_edges(spec), spec.num_qubits, coefficient_class, seed)
