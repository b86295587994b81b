"""Classical stand-in for annealer reads, plus an exhaustive oracle.

Reads come from Metropolis single-spin-flip chains swept in ascending spin
order under a geometric inverse-temperature ramp.  Keeping the sweep count
low leaves samples near, but usually not at, a local minimum, which is the
regime the correction methods target.  ``sweeps_per_read`` plays the role
of annealing time; it has no physical calibration.

In clustered mode reads come in blocks of ``cluster_persistence``: the
first read of a block starts from a uniformly random state, later reads
continue from the previous read's final state and re-run the ramp from its
geometric midpoint, so neighbouring reads are correlated.

All randomness is counter-based (see :mod:`mqc.rng`): read ``r`` owns the
SplitMix64 stream ``stream_key(seed, r)``; draw ``i`` of it picks the
initial spin ``i`` and draw ``N*(t+1) + i`` is the acceptance uniform for
spin ``i`` in sweep ``t``.  Output therefore depends only on
``(model, config)``, not on how reads are batched.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ContractError
from .ising import IsingModel, as_spins, energy, flip_deltas
from .rng import MASK64, counter_u64, stream_key, to_unit

BRUTE_FORCE_CAP_ENV = "MQC_BRUTE_FORCE_CAP"
DEFAULT_BRUTE_FORCE_CAP = 24


class CorrelationMode(str, enum.Enum):
    INDEPENDENT = "independent"
    CLUSTERED = "clustered"


@dataclass(frozen=True)
class SamplerConfig:
    num_reads: int
    sweeps_per_read: int = 50
    beta_schedule: tuple[float, float] = (0.1, 8.0)
    correlation_mode: CorrelationMode = CorrelationMode.INDEPENDENT
    cluster_persistence: int = 1
    seed: int = 0
    precision_bits: int | None = None
    """Quantise h and J to multiples of ``2**-precision_bits`` before
    sampling (models limited coefficient precision); ``None`` disables."""
    auto_scale: bool = True
    """Read ``beta_schedule`` in units of ``1 / max|coefficient|``, the way
    an annealer rescales a problem into its fixed coefficient range."""

    def __post_init__(self):
        object.__setattr__(self, "correlation_mode", CorrelationMode(self.correlation_mode))
        object.__setattr__(self, "beta_schedule", tuple(float(b) for b in self.beta_schedule))
        if self.num_reads < 1:
            raise ContractError("num_reads must be positive")
        if self.sweeps_per_read < 1:
            raise ContractError("sweeps_per_read must be positive")
        if len(self.beta_schedule) != 2:
            raise ContractError("beta_schedule must be (beta_start, beta_end)")
        b0, b1 = self.beta_schedule
        if not (0 < b0 <= b1 and math.isfinite(b1)):
            raise ContractError("need 0 < beta_start <= beta_end")
        if self.cluster_persistence < 1:
            raise ContractError("cluster_persistence must be at least 1")
        if (self.correlation_mode is CorrelationMode.INDEPENDENT) != (self.cluster_persistence == 1):
            raise ContractError("cluster_persistence is 1 exactly in independent mode")
        if not 0 <= self.seed <= MASK64:
            raise ContractError("seed must be a 64-bit unsigned integer")
        if self.precision_bits is not None and self.precision_bits < 1:
            raise ContractError("precision_bits must be positive")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["correlation_mode"] = self.correlation_mode.value
        out["beta_schedule"] = list(self.beta_schedule)
        out["sweeps_semantics"] = "Metropolis sweeps per read; stand-in for annealing time"
        return out


def _ramp(beta_start: float, beta_end: float, sweeps: int) -> np.ndarray:
    if sweeps == 1:
        return np.array([beta_end])
    return np.geomspace(beta_start, beta_end, sweeps)


def quantize(model: IsingModel, bits: int) -> IsingModel:
    """Round coefficients to multiples of ``2**-bits``; couplers that round to
    zero are dropped."""
    step = 2.0**-bits
    h = np.round(model.h / step) * step
    rows, cols, vals = model.edges
    q = np.round(vals / step) * step
    return IsingModel(h, [(int(i), int(j), float(v)) for i, j, v in zip(rows, cols, q) if v != 0.0])


def coefficient_span(model: IsingModel) -> float:
    """Largest absolute field or coupler value (0 for an all-zero model)."""
    return float(max(np.abs(model.h).max(initial=0.0), np.abs(model.edges[2]).max(initial=0.0)))


def _metropolis(model: IsingModel, Z: np.ndarray, keys: np.ndarray, betas: np.ndarray) -> None:
    n = model.num_spins
    spin_idx = np.arange(n, dtype=np.uint64)
    for t, beta in enumerate(betas):
        U = to_unit(counter_u64(keys[:, None], np.uint64(n * (t + 1)) + spin_idx[None, :]))
        for i in range(n):
            d = flip_deltas(model, Z, i)
            accept = U[:, i] < np.exp(-beta * np.maximum(d, 0.0))
            Z[accept, i] *= -1


def _initial_states(keys: np.ndarray, n: int) -> np.ndarray:
    bits = counter_u64(keys[:, None], np.arange(n, dtype=np.uint64)[None, :]) >> np.uint64(63)
    return np.where(bits == 1, 1, -1).astype(np.int8)


def draw_samples(model: IsingModel, config: SamplerConfig) -> np.ndarray:
    """Draw ``config.num_reads`` spin vectors as an ``(reads, N)`` int8 array."""
    target = quantize(model, config.precision_bits) if config.precision_bits else model
    n = model.num_spins
    reads = config.num_reads
    keys = np.array([stream_key(config.seed, r) for r in range(reads)], dtype=np.uint64)
    b0, b1 = config.beta_schedule
    if config.auto_scale:
        span = coefficient_span(target)
        if span > 0:
            b0, b1 = b0 / span, b1 / span
    full = _ramp(b0, b1, config.sweeps_per_read)
    out = np.empty((reads, n), dtype=np.int8)

    if config.correlation_mode is CorrelationMode.INDEPENDENT:
        Z = _initial_states(keys, n)
        _metropolis(target, Z, keys, full)
        out[:] = Z
        return out

    p = config.cluster_persistence
    reheat = _ramp(math.sqrt(b0 * b1), b1, config.sweeps_per_read)
    starts = np.arange(0, reads, p)
    Z = _initial_states(keys[starts], n)
    for k in range(p):
        ids = starts + k
        live = ids < reads
        ids = ids[live]
        if ids.size == 0:
            break
        Z = Z[live]
        starts = starts[live]
        _metropolis(target, Z, keys[ids], full if k == 0 else reheat)
        out[ids] = Z
    return out


def brute_force_cap() -> int:
    raw = os.environ.get(BRUTE_FORCE_CAP_ENV)
    return int(raw) if raw else DEFAULT_BRUTE_FORCE_CAP


def brute_force_ground(model: IsingModel, cap: int | None = None) -> tuple[np.ndarray, float]:
    """Exhaustive ground state.

    States are enumerated in lexicographic order with -1 < +1 (spin 0 is the
    most significant digit), and the first state attaining the minimum wins,
    so ties go to the lexicographically smallest state.  The returned energy
    is re-evaluated with :func:`mqc.ising.energy`.
    """
    cap = brute_force_cap() if cap is None else cap
    n = model.num_spins
    if n > cap:
        raise ContractError(f"brute force is capped at N = {cap} (got N = {n}); "
                            f"raise it with {BRUTE_FORCE_CAP_ENV}")
    rows, cols, vals = model.edges
    h = np.asarray(model.h)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    total = 1 << n
    chunk = 1 << 16
    best_val = math.inf
    best_idx = -1
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        S = (((idx[:, None] >> shifts[None, :]) & 1) * 2 - 1).astype(np.float64)
        E = S @ h
        if len(vals):
            E = E + (S[:, rows] * S[:, cols]) @ vals
        k = int(np.argmin(E))
        if E[k] < best_val:
            best_val = float(E[k])
            best_idx = start + k
    z = ((np.array([(best_idx >> int(s)) & 1 for s in shifts]) * 2) - 1).astype(np.int8)
    return z, energy(model, z)


def is_local_minimum(model: IsingModel, z) -> bool:
    """True iff no single spin flip strictly lowers the energy."""
    z = as_spins(z, model.num_spins)
    Z = z[None, :]
    return all(flip_deltas(model, Z, i)[0] >= 0.0 for i in range(model.num_spins))
