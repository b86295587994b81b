"""Sample correction: SQC, pairwise Reduce, MQC and RMQC.

SQC relaxes one sample by greedy single-spin descent.  The multi-spin
methods work on pairs of samples: the spins on which two samples disagree
split into sub-tunnels (connected components of the coupling graph
restricted to the disagreement set), and every sub-tunnel whose influence
on the first sample is positive gets flipped.  Flipping sub-tunnel ``T``
changes the energy by exactly ``-2 * I_T``, so the result never scores
worse than either input.  MQC folds a whole sample set through pairwise
reductions, RMQC repeats MQC over seeded reshuffles.

Energies are compared with plain ``<`` / ``>``; no tolerance.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ContractError, DimensionError
from .ising import IsingModel, as_samples, as_spins, flip_deltas
from .rng import SplitMix64


@dataclass(frozen=True)
class TunnelPartition:
    """The agree/disagree split of two samples and its sub-tunnels.

    ``influences[k]`` is measured against the first sample.
    """

    same_set: tuple[int, ...]
    diff_set: tuple[int, ...]
    sub_tunnels: tuple[tuple[int, ...], ...]
    influences: tuple[float, ...]


@dataclass
class MQCStats:
    """Counters filled in by :func:`mqc` when passed as ``stats``."""

    reduce_calls: int = 0
    rounds: int = 0
    round_sizes: list[int] = field(default_factory=list)


def sqc_batch(model: IsingModel, samples) -> np.ndarray:
    """Apply :func:`sqc` to every row of a sample set.

    Rows never interact, so sweeping all of them together makes exactly the
    same per-row decisions as running them one at a time.
    """
    Z = as_samples(samples, model.num_spins).copy()
    active = np.arange(Z.shape[0])
    while active.size:
        sub = Z[active]
        changed = np.zeros(active.size, dtype=bool)
        for i in range(model.num_spins):
            better = flip_deltas(model, sub, i) < 0.0
            if better.any():
                sub[better, i] *= -1
                changed |= better
        Z[active] = sub
        # A row whose sweep changed nothing is a 1-flip local minimum.
        active = active[changed]
    return Z


def sqc(model: IsingModel, z) -> np.ndarray:
    """Single-qubit correction.

    Sweeps spins in ascending order, keeping a flip only when it strictly
    lowers the energy, until a full sweep changes nothing.
    """
    z = as_spins(z, model.num_spins)
    return sqc_batch(model, z[None, :])[0]


def partition_diff(z1, z2) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Indices where the samples agree and where they differ."""
    z1 = as_spins(z1)
    z2 = as_spins(z2, len(z1))
    same = z1 == z2
    return tuple(np.flatnonzero(same).tolist()), tuple(np.flatnonzero(~same).tolist())


def _component_labels(n: int, members: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> tuple[np.ndarray, int]:
    """BFS component labels over ``members`` using edges ``rows[k]-cols[k]``.

    Labels are numbered in order of each component's smallest member, since
    roots are taken in ascending index order.
    """
    adj: dict[int, list[int]] = {}
    for a, b in zip(rows.tolist(), cols.tolist()):
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    labels = np.full(n, -1, dtype=np.intp)
    count = 0
    for root in members.tolist():
        if labels[root] >= 0:
            continue
        labels[root] = count
        if root in adj:
            queue = deque((root,))
            while queue:
                u = queue.popleft()
                for v in adj[u]:
                    if labels[v] < 0:
                        labels[v] = count
                        queue.append(v)
        count += 1
    return labels, count


def sub_tunnels(model: IsingModel, diff_set: Iterable[int]) -> list[tuple[int, ...]]:
    """Connected components of the coupling graph restricted to ``diff_set``.

    Components are ordered by smallest member, members ascending.
    """
    n = model.num_spins
    members = np.array(sorted(set(int(i) for i in diff_set)), dtype=np.intp)
    if members.size and (members[0] < 0 or members[-1] >= n):
        raise DimensionError(f"diff_set indices must lie in 0..{n - 1}")
    mask = np.zeros(n, dtype=bool)
    mask[members] = True
    rows, cols, _ = model.edges
    inside = mask[rows] & mask[cols]
    labels, count = _component_labels(n, members, rows[inside], cols[inside])
    groups: list[list[int]] = [[] for _ in range(count)]
    for i in members.tolist():
        groups[labels[i]].append(i)
    return [tuple(g) for g in groups]


def influence(model: IsingModel, z1, same_set: Iterable[int], tunnel: Iterable[int]) -> float:
    """Energy contribution of ``tunnel`` to ``z1``.

    Field terms over the tunnel plus coupler terms between the tunnel and
    ``same_set``; couplers inside the tunnel are left out because flipping
    the whole tunnel leaves them unchanged.
    """
    z1 = as_spins(z1, model.num_spins)
    same = set(int(i) for i in same_set)
    tunnel = sorted(set(int(i) for i in tunnel))
    if same.intersection(tunnel):
        raise ContractError("tunnel and same_set must be disjoint")
    n = model.num_spins
    if any(not 0 <= i < n for i in tunnel) or any(not 0 <= j < n for j in same):
        raise DimensionError(f"indices must lie in 0..{n - 1}")
    h = model.h
    total = 0.0
    for i in tunnel:
        total += h[i] * z1[i]
    for i in tunnel:
        for j, v in model.neighbors(i):
            if j in same:
                total += v * z1[i] * z1[j]
    return float(total)


def _partition(model: IsingModel, z1: np.ndarray, z2: np.ndarray):
    """Vectorised core of Reduce on validated int8 spin vectors.

    Returns ``(diff_idx, labels, influences)`` where ``labels[i]`` is the
    sub-tunnel number of spin ``i`` (``-1`` for agreeing spins).
    """
    n = model.num_spins
    diff = z1 != z2
    diff_idx = np.flatnonzero(diff)
    if diff_idx.size == 0:
        return diff_idx, np.full(n, -1, dtype=np.intp), np.zeros(0)
    rows, cols, vals = model.edges
    in_r = diff[rows]
    in_c = diff[cols]
    inside = in_r & in_c
    labels, count = _component_labels(n, diff_idx, rows[inside], cols[inside])

    zf = z1.astype(np.float64)
    infl = np.bincount(labels[diff_idx], weights=model.h[diff_idx] * zf[diff_idx], minlength=count)
    boundary = in_r ^ in_c
    if boundary.any():
        br, bc = rows[boundary], cols[boundary]
        tunnel_end = np.where(in_r[boundary], br, bc)
        terms = vals[boundary] * zf[br] * zf[bc]
        infl = infl + np.bincount(labels[tunnel_end], weights=terms, minlength=count)
    return diff_idx, labels, infl


def tunnel_partition(model: IsingModel, z1, z2) -> TunnelPartition:
    """Full :class:`TunnelPartition` of a sample pair."""
    z1 = as_spins(z1, model.num_spins)
    z2 = as_spins(z2, model.num_spins)
    diff_idx, labels, infl = _partition(model, z1, z2)
    groups: list[list[int]] = [[] for _ in range(len(infl))]
    for i in diff_idx.tolist():
        groups[labels[i]].append(i)
    same_idx = np.flatnonzero(z1 == z2)
    return TunnelPartition(
        same_set=tuple(same_idx.tolist()),
        diff_set=tuple(diff_idx.tolist()),
        sub_tunnels=tuple(tuple(g) for g in groups),
        influences=tuple(float(x) for x in infl),
    )


def _reduce(model: IsingModel, z1: np.ndarray, z2: np.ndarray) -> np.ndarray:
    diff_idx, labels, infl = _partition(model, z1, z2)
    out = z1.copy()
    if diff_idx.size:
        positive = infl > 0.0
        if positive.any():
            chosen = diff_idx[positive[labels[diff_idx]]]
            out[chosen] *= -1
    return out


def reduce(model: IsingModel, z1, z2) -> np.ndarray:
    """Combine two samples into one that is no worse than either.

    Starts from ``z1`` and flips every sub-tunnel with strictly positive
    influence.  Zero-influence sub-tunnels stay as in ``z1``, so
    ``reduce(a, b)`` and ``reduce(b, a)`` can differ as states while having
    equal energy.
    """
    z1 = as_spins(z1, model.num_spins)
    z2 = as_spins(z2, model.num_spins)
    return _reduce(model, z1, z2)


def _mqc(model: IsingModel, Z: np.ndarray, workers: int, stats: MQCStats | None) -> np.ndarray:
    current = list(Z)
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        while len(current) > 1:
            if stats is not None:
                stats.rounds += 1
                stats.round_sizes.append(len(current))
            pairs = [(current[k], current[k + 1]) for k in range(0, len(current) - 1, 2)]
            if pool is None:
                merged = [_reduce(model, a, b) for a, b in pairs]
            else:
                merged = list(pool.map(lambda p: _reduce(model, *p), pairs))
            if stats is not None:
                stats.reduce_calls += len(pairs)
            if len(current) % 2:
                merged.append(current[-1])
            current = merged
    finally:
        if pool is not None:
            pool.shutdown()
    return current[0].copy()


def mqc(model: IsingModel, samples, *, workers: int = 1, stats: MQCStats | None = None) -> np.ndarray:
    """Multi-qubit correction of an ordered sample set.

    Each round reduces samples pairwise in order (1st with 2nd, 3rd with
    4th, ...), carrying an odd leftover into the next round unchanged, until
    one sample remains.  That takes ``n - 1`` reductions over
    ``ceil(log2 n)`` rounds.  ``workers > 1`` runs the reductions of a round
    on a thread pool; the result does not depend on it.
    """
    Z = as_samples(samples, model.num_spins)
    return _mqc(model, Z, workers, stats)


def rmqc_orders(n: int, r: int, seed: int) -> list[list[int]]:
    """Sample orderings seen by the ``r`` MQC passes of :func:`rmqc`.

    Pass 0 sees the input order; each later pass reshuffles the previous
    ordering with a Fisher-Yates shuffle driven by ``SplitMix64(seed)``.
    """
    if r < 1:
        raise ContractError(f"r must be at least 1, got {r}")
    rng = SplitMix64(seed)
    order = list(range(n))
    orders = []
    for _ in range(r):
        orders.append(list(order))
        rng.shuffle(order)
    return orders


def rmqc(model: IsingModel, samples, r: int, seed: int, *, workers: int = 1) -> np.ndarray:
    """Randomised MQC: ``r`` MQC passes over reshuffled orderings, then MQC
    over the ``r`` pass results.  ``r = 1`` reproduces :func:`mqc`."""
    Z = as_samples(samples, model.num_spins)
    orders = rmqc_orders(Z.shape[0], r, seed)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda o: _mqc(model, Z[o], 1, None), orders))
    else:
        results = [_mqc(model, Z[o], 1, None) for o in orders]
    return _mqc(model, np.stack(results), 1, None)
