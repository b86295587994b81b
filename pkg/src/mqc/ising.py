"""Ising Hamiltonians, spin vectors and exact energy arithmetic.

The energy of a spin vector ``z`` in {-1, +1}^N is::

    E(z) = sum_i h_i z_i + sum_{i<j} J_ij z_i z_j

Couplers are stored once each in canonical upper-triangular form
``(i, j)`` with ``i < j``.  Indices are 0-based in the Python API; the
JSON file formats (see :mod:`mqc.formats`) are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import ContractError, DimensionError

CouplerInput = Union[Mapping[tuple[int, int], float], Iterable[Sequence[float]]]


def _coupler_triples(couplers: CouplerInput) -> tuple[tuple[int, int, float], ...]:
    if isinstance(couplers, Mapping):
        items = ((i, j, v) for (i, j), v in couplers.items())
    else:
        items = couplers
    out = []
    for item in items:
        i, j, v = item
        if int(i) != i or int(j) != j:
            raise ContractError(f"coupler indices must be integers, got ({i}, {j})")
        out.append((int(i), int(j), float(v)))
    return tuple(out)


@dataclass(frozen=True)
class ValidationResult:
    """Outcome of :func:`validate`.

    ``reason`` is one of ``"bad-size"``, ``"non-finite"``, ``"out-of-range"``,
    ``"non-canonical-pair"``, ``"zero-coupler"``, ``"duplicate-pair"`` when
    ``ok`` is false.  ``location`` is the offending spin index or pair.
    """

    ok: bool
    reason: str | None = None
    message: str | None = None
    location: int | tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.ok


class IsingModel:
    """Problem Hamiltonian with linear fields ``h`` and sparse couplers ``J``.

    Args:
        h: the N linear coefficients.
        couplers: ``{(i, j): J_ij}`` or an iterable of ``(i, j, J_ij)``.
        check: raise :class:`ContractError` unless :func:`validate` accepts
            the model.  Pass ``False`` only to inspect broken input.

    Instances are immutable; the numpy views they expose are read-only.
    """

    __slots__ = ("_h", "_triples", "_rows", "_cols", "_vals",
                 "_indptr", "_nbrs", "_nbr_vals", "_nbr_lists")

    def __init__(self, h: Sequence[float], couplers: CouplerInput = (), *, check: bool = True):
        h_arr = np.array(h, dtype=np.float64)
        if h_arr.ndim != 1:
            raise DimensionError("h must be one-dimensional")
        h_arr.setflags(write=False)
        self._h = h_arr
        self._triples = _coupler_triples(couplers)
        if check:
            result = validate(self)
            if not result.ok:
                raise ContractError(result.message)

        # Canonical order: ascending i, then ascending j.
        ordered = sorted(self._triples, key=lambda t: (t[0], t[1]))
        n = len(h_arr)
        self._rows = np.array([t[0] for t in ordered], dtype=np.intp)
        self._cols = np.array([t[1] for t in ordered], dtype=np.intp)
        self._vals = np.array([t[2] for t in ordered], dtype=np.float64)
        for arr in (self._rows, self._cols, self._vals):
            arr.setflags(write=False)

        nbr_lists: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        if check:
            for i, j, v in ordered:
                nbr_lists[i].append((j, v))
                nbr_lists[j].append((i, v))
            for lst in nbr_lists:
                lst.sort()
        self._nbr_lists = tuple(tuple(lst) for lst in nbr_lists)
        self._indptr = np.zeros(n + 1, dtype=np.intp)
        self._indptr[1:] = np.cumsum([len(lst) for lst in nbr_lists])
        self._nbrs = np.array([j for lst in nbr_lists for j, _ in lst], dtype=np.intp)
        self._nbr_vals = np.array([v for lst in nbr_lists for _, v in lst], dtype=np.float64)

    @property
    def num_spins(self) -> int:
        return len(self._h)

    @property
    def h(self) -> np.ndarray:
        return self._h

    @property
    def couplers(self) -> dict[tuple[int, int], float]:
        """Fresh ``{(i, j): J_ij}`` dict in canonical order."""
        return {(int(i), int(j)): float(v) for i, j, v in zip(self._rows, self._cols, self._vals)}

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Canonically ordered ``(rows, cols, values)`` arrays."""
        return self._rows, self._cols, self._vals

    @property
    def raw_couplers(self) -> tuple[tuple[int, int, float], ...]:
        """Couplers exactly as passed to the constructor."""
        return self._triples

    @property
    def num_couplers(self) -> int:
        return len(self._vals)

    def neighbors(self, i: int) -> tuple[tuple[int, float], ...]:
        """``(j, J_ij)`` pairs adjacent to spin ``i``, ascending in ``j``."""
        return self._nbr_lists[i]

    def degree(self, i: int) -> int:
        return int(self._indptr[i + 1] - self._indptr[i])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IsingModel):
            return NotImplemented
        return (
            np.array_equal(self._h, other._h)
            and np.array_equal(self._rows, other._rows)
            and np.array_equal(self._cols, other._cols)
            and np.array_equal(self._vals, other._vals)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"IsingModel(num_spins={self.num_spins}, num_couplers={self.num_couplers})"


def validate(model: IsingModel) -> ValidationResult:
    """Check every model invariant, reporting the first violation."""
    n = model.num_spins
    if n < 1:
        return ValidationResult(False, "bad-size", "model must have at least one spin")
    bad = np.flatnonzero(~np.isfinite(model.h))
    if bad.size:
        i = int(bad[0])
        return ValidationResult(False, "non-finite", f"h[{i}] is not finite", i)
    seen: set[tuple[int, int]] = set()
    for i, j, v in model.raw_couplers:
        pair = (i, j)
        if not (0 <= i < n and 0 <= j < n):
            return ValidationResult(
                False, "out-of-range", f"coupler {pair} outside 0..{n - 1}", pair)
        if i >= j:
            return ValidationResult(
                False, "non-canonical-pair", f"coupler {pair} is not in i < j form", pair)
        if v == 0.0:
            return ValidationResult(False, "zero-coupler", f"coupler {pair} is zero", pair)
        if not np.isfinite(v):
            return ValidationResult(False, "non-finite", f"coupler {pair} is not finite", pair)
        if pair in seen:
            return ValidationResult(False, "duplicate-pair", f"coupler {pair} appears twice", pair)
        seen.add(pair)
    return ValidationResult(True)


def as_spins(z, num_spins: int | None = None) -> np.ndarray:
    """Coerce ``z`` to an int8 spin vector, checking length and values."""
    arr = np.asarray(z)
    if arr.ndim != 1:
        raise DimensionError(f"spin vector must be one-dimensional, got shape {arr.shape}")
    if num_spins is not None and arr.shape[0] != num_spins:
        raise DimensionError(f"spin vector has length {arr.shape[0]}, model has {num_spins} spins")
    if not np.all((arr == 1) | (arr == -1)):
        raise ContractError("spin values must be -1 or +1")
    return arr.astype(np.int8)


def as_samples(samples, num_spins: int | None = None) -> np.ndarray:
    """Coerce a sample set to an ``(n, N)`` int8 array, preserving order."""
    if isinstance(samples, np.ndarray):
        arr = samples
    else:
        rows = list(samples)
        if not rows:
            raise ContractError("sample set is empty")
        lengths = {len(r) for r in rows}
        if len(lengths) != 1:
            raise DimensionError(f"samples have mixed lengths {sorted(lengths)}")
        arr = np.asarray(rows)
    if arr.ndim != 2:
        raise DimensionError(f"sample set must be two-dimensional, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ContractError("sample set is empty")
    if num_spins is not None and arr.shape[1] != num_spins:
        raise DimensionError(f"samples have length {arr.shape[1]}, model has {num_spins} spins")
    if not np.all((arr == 1) | (arr == -1)):
        raise ContractError("spin values must be -1 or +1")
    return arr.astype(np.int8)


def energies(model: IsingModel, samples) -> np.ndarray:
    """Energy of every row of a sample set.

    This is the single evaluation path of the package: :func:`energy` calls
    it on a one-row set, so a state gets the same bits wherever it is scored
    and however many rows are evaluated together.
    """
    Z = as_samples(samples, model.num_spins).astype(np.float64)
    rows, cols, vals = model.edges
    terms = np.concatenate([Z * model.h, Z[:, rows] * Z[:, cols] * vals], axis=1)
    # cumsum adds strictly left to right along each row: fields in index
    # order, then couplers in (i, j) order, whatever the batch shape.
    return np.cumsum(terms, axis=1)[:, -1]


def energy(model: IsingModel, z) -> float:
    z = as_spins(z, model.num_spins)
    return float(energies(model, z[None, :])[0])


def flip_deltas(model: IsingModel, Z: np.ndarray, i: int) -> np.ndarray:
    """Energy change of flipping spin ``i`` in each row of ``Z``.

    ``Z`` is trusted to be a valid ``(n, N)`` spin array; this is the inner
    loop of SQC and the sampler.
    """
    lo, hi = model._indptr[i], model._indptr[i + 1]
    if hi == lo:
        return -2.0 * model._h[i] * Z[:, i]
    terms = Z[:, model._nbrs[lo:hi]] * model._nbr_vals[lo:hi]
    local = np.cumsum(terms, axis=1)[:, -1] + model._h[i]
    return -2.0 * Z[:, i] * local


def energy_delta_flip(model: IsingModel, z, i: int) -> float:
    """``energy(flip(z, i)) - energy(z)`` in O(deg(i))."""
    z = as_spins(z, model.num_spins)
    if not 0 <= i < model.num_spins:
        raise DimensionError(f"spin index {i} outside 0..{model.num_spins - 1}")
    return float(flip_deltas(model, z[None, :], i)[0])


def flip(z, indices) -> np.ndarray:
    """Copy of ``z`` with the given spins negated."""
    out = np.array(z, dtype=np.int8)
    out[np.asarray(list(indices), dtype=np.intp)] *= -1
    return out
