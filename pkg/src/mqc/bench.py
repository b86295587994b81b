"""Benchmark harness: pipelines, sign tests and robustness tables.

A suite is one coefficient class on one Chimera spec with a list of
instance seeds.  For every instance and repeat the harness draws one raw
sample set of ``max(reads_grid)`` reads; the set for ``s`` reads is its
first ``s`` rows (reads are prefix-stable, see :mod:`mqc.sampler`), so
every method at every ``s`` sees the same raw data.

Methods, in the order they are usually listed (weakest first):

``raw``
    best raw sample.
``sqc``
    best of SQC applied to every raw sample.
``mqc``
    MQC over the raw set in read order.
``rmqc<R>``
    RMQC with ``R`` passes, e.g. ``rmqc5``.

Comparisons treat the later method of each listed pair as the expected
winner.  Ties are exact energy equality.
"""

from __future__ import annotations

import importlib.resources
import json
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .correction import mqc, rmqc, sqc_batch
from .errors import ContractError
from .formats import SuiteManifest
from .ising import IsingModel, energies, energy
from .problems import ChimeraSpec, chimera_instance
from .rng import derive_seed
from .sampler import CorrelationMode, SamplerConfig, draw_samples

REPORT_SCHEMA_ID = "mqc-bench-report/1"
ROBUSTNESS_AGGREGATION = "population variance over repeats per instance, averaged over instances"
DEFAULT_READS_GRID = (100, 200, 500, 1000)

_METHOD_RE = re.compile(r"^(raw|sqc|mqc|rmqc(\d+))$")


EXACT_SIGN_TEST_LIMIT = 20000


def sign_test_p(n_b: int, n_w: int) -> float:
    """One-sided sign test: P(X >= n_b) for X ~ Binomial(n_b + n_w, 1/2).

    Up to ``EXACT_SIGN_TEST_LIMIT`` trials the tail is summed in exact
    integers and divided once, which Python rounds correctly; larger totals
    use :func:`_tail_by_ratios`.
    """
    if n_b < 0 or n_w < 0:
        raise ContractError("win counts must be non-negative")
    total = n_b + n_w
    if n_b == 0:
        return 1.0
    if total <= EXACT_SIGN_TEST_LIMIT:
        return _tail_exact(n_b, total)
    return _tail_by_ratios(n_b, total)


def _tail_exact(n_b: int, total: int) -> float:
    term = math.comb(total, n_b)
    tail = 0
    for k in range(n_b, total + 1):
        tail += term
        term = term * (total - k) // (k + 1)
    return tail / (1 << total)


def _tail_by_ratios(n_b: int, total: int) -> float:
    """Walk outward from the largest summand with ratios of consecutive
    binomial coefficients; only the peak goes through ``lgamma``."""
    peak = max(n_b, (total + 1) // 2)
    log_peak = (math.lgamma(total + 1) - math.lgamma(peak + 1)
                - math.lgamma(total - peak + 1) - total * math.log(2.0))
    acc = 1.0
    term = 1.0
    for k in range(peak, total):
        term *= (total - k) / (k + 1)
        if term < 1e-18 * acc:
            break
        acc += term
    term = 1.0
    for k in range(peak, n_b, -1):
        term *= k / (total - k + 1)
        if term < 1e-18 * acc:
            break
        acc += term
    return min(1.0, math.exp(log_peak) * acc)


def significance(p: float) -> str:
    if p < 0.05:
        return "significant"
    if p >= 0.95:
        return "expected winner chosen incorrectly"
    return "not significant"


@dataclass(frozen=True)
class ComparisonOutcome:
    expected_winner: str
    baseline: str
    s: int
    n_better: int
    n_worse: int
    n_tie: int
    p_value: float
    significance: str


def compare_energies(winner: Mapping[str, float], baseline: Mapping[str, float]) -> tuple[int, int, int]:
    """(wins, losses, ties) of ``winner`` against ``baseline`` per instance."""
    if set(winner) != set(baseline):
        raise ContractError("methods were not run on the same instances")
    better = worse = tie = 0
    for key in winner:
        a, b = winner[key], baseline[key]
        if a < b:
            better += 1
        elif a > b:
            worse += 1
        else:
            tie += 1
    return better, worse, tie


def _check_method(name: str) -> str:
    if not _METHOD_RE.match(name):
        raise ContractError(f"unknown method {name!r}; use raw, sqc, mqc or rmqc<R>")
    if name.startswith("rmqc") and int(name[4:]) < 1:
        raise ContractError("rmqc needs at least one pass")
    return name


def parse_methods(text: str | Sequence[str]) -> list[str]:
    names = text.split(",") if isinstance(text, str) else list(text)
    names = [_check_method(n.strip()) for n in names if n.strip()]
    if len(set(names)) != len(names):
        raise ContractError("methods listed twice")
    if not names:
        raise ContractError("no methods given")
    return names


def run_method(model: IsingModel, samples: np.ndarray, method: str, seed: int) -> float:
    """Best energy that ``method`` extracts from ``samples``."""
    if method == "raw":
        return float(energies(model, samples).min())
    if method == "sqc":
        return float(energies(model, sqc_batch(model, samples)).min())
    if method == "mqc":
        return energy(model, mqc(model, samples))
    return energy(model, rmqc(model, samples, int(method[4:]), seed))


@dataclass(frozen=True)
class BenchConfig:
    """Sampler and harness settings shared by every instance of a run."""

    methods: tuple[str, ...] = ("raw", "sqc", "mqc")
    reads_grid: tuple[int, ...] = DEFAULT_READS_GRID
    repeats: int = 1
    seed: int = 0
    # Short anneal chosen so reads sit near low energies but rarely at a
    # local minimum; betas are in units of 1 / max|coefficient|.
    sweeps_per_read: int = 4
    beta_schedule: tuple[float, float] = (0.1, 8.0)
    correlation_mode: str = "independent"
    cluster_persistence: int = 1

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(parse_methods(self.methods)))
        grid = tuple(sorted(set(int(s) for s in self.reads_grid)))
        if not grid or grid[0] < 1:
            raise ContractError("reads grid must hold positive sample counts")
        object.__setattr__(self, "reads_grid", grid)
        object.__setattr__(self, "beta_schedule", tuple(float(b) for b in self.beta_schedule))
        if self.repeats < 1:
            raise ContractError("repeats must be positive")
        # validates the sampler fields early
        self.sampler_config(1, 0)

    def sampler_config(self, num_reads: int, seed: int) -> SamplerConfig:
        return SamplerConfig(num_reads, self.sweeps_per_read, self.beta_schedule,
                             CorrelationMode(self.correlation_mode), self.cluster_persistence, seed)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["methods"] = list(self.methods)
        out["reads_grid"] = list(self.reads_grid)
        out["beta_schedule"] = list(self.beta_schedule)
        out["sweeps_semantics"] = "Metropolis sweeps per read; stand-in for annealing time"
        return out


@dataclass(frozen=True)
class InstanceRecord:
    instance_id: str
    repeat: int
    method: str
    s: int
    best_energy: float
    wall_time: float

    def to_dict(self) -> dict:
        return {"instance_id": self.instance_id, "repeat": self.repeat, "method": self.method,
                "s": self.s, "best_energy": self.best_energy,
                "best_energy_display": round(self.best_energy, 4), "wall_time_s": self.wall_time}


def run_instance(model: IsingModel, instance_id: str, instance_seed: int,
                 config: BenchConfig) -> list[InstanceRecord]:
    """Every (repeat, s, method) record for one instance."""
    records = []
    top = config.reads_grid[-1]
    for repeat in range(config.repeats):
        sample_seed = derive_seed(config.seed, instance_seed, repeat, 0)
        Z = draw_samples(model, config.sampler_config(top, sample_seed))
        for s in config.reads_grid:
            for method in config.methods:
                method_seed = derive_seed(config.seed, instance_seed, repeat, 1)
                start = time.perf_counter()
                best = run_method(model, Z[:s], method, method_seed)
                records.append(InstanceRecord(instance_id, repeat, method, s, best,
                                              time.perf_counter() - start))
    return records


def _run_job(args):
    model, instance_id, seed, config = args
    return run_instance(model, instance_id, seed, config)


@dataclass
class BenchResults:
    """All records of a run plus enough context to rebuild the report."""

    manifest: SuiteManifest
    config: BenchConfig
    records: list[InstanceRecord] = field(default_factory=list)

    def best(self, method: str, s: int, repeat: int = 0) -> dict[str, float]:
        return {r.instance_id: r.best_energy for r in self.records
                if r.method == method and r.s == s and r.repeat == repeat}

    def by_instance(self, method: str, s: int) -> dict[str, list[float]]:
        out: dict[str, list[float]] = {}
        for r in sorted(self.records, key=lambda r: (r.instance_id, r.repeat)):
            if r.method == method and r.s == s:
                out.setdefault(r.instance_id, []).append(r.best_energy)
        return out


def run_suite(manifest: SuiteManifest, config: BenchConfig, workers: int = 1,
              models: Mapping[int, IsingModel] | None = None) -> BenchResults:
    """Run every instance of ``manifest``; instances are rebuilt from their seeds
    unless ``models`` (keyed by seed) supplies them."""
    spec = ChimeraSpec(*manifest.spec)
    jobs = []
    for seed in manifest.seeds:
        model = models[seed] if models is not None else chimera_instance(spec, manifest.coefficient_class, seed)
        jobs.append((model, manifest.instance_id(seed), seed, config))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_run_job, jobs))
    else:
        chunks = [_run_job(job) for job in jobs]
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (r.instance_id, r.repeat, r.s, config.methods.index(r.method)))
    return BenchResults(manifest, config, records)


def compare_methods(results: BenchResults, expected_winner: str, baseline: str, s: int,
                    repeat: int = 0) -> ComparisonOutcome:
    better, worse, tie = compare_energies(results.best(expected_winner, s, repeat),
                                          results.best(baseline, s, repeat))
    if better + worse + tie != len(results.manifest.seeds):
        raise ContractError("instance coverage does not match the suite")
    p = sign_test_p(better, worse)
    return ComparisonOutcome(expected_winner, baseline, s, better, worse, tie, p, significance(p))


def robustness_table(results: BenchResults) -> list[dict]:
    """Mean over instances of the per-instance variance across repeats."""
    if results.config.repeats < 2:
        raise ContractError("robustness needs at least two repeats")
    rows = []
    for s in results.config.reads_grid:
        for method in results.config.methods:
            per_instance = results.by_instance(method, s)
            variances = [float(np.var(v)) for v in per_instance.values()]
            rows.append({"class": results.manifest.coefficient_class, "s": s, "method": method,
                         "mean_variance": float(np.mean(variances)),
                         "mean_variance_display": round(float(np.mean(variances)), 4)})
    return rows


def robustness_report(manifest: SuiteManifest, method: str, repeats: int, s: int,
                      config: BenchConfig | None = None, workers: int = 1) -> dict:
    """Variance of ``method``'s best energy over ``repeats`` reruns at ``s`` reads."""
    if repeats < 2:
        raise ContractError("robustness needs at least two repeats")
    base = config or BenchConfig()
    cfg = BenchConfig(methods=(method,), reads_grid=(s,), repeats=repeats, seed=base.seed,
                      sweeps_per_read=base.sweeps_per_read, beta_schedule=base.beta_schedule,
                      correlation_mode=base.correlation_mode,
                      cluster_persistence=base.cluster_persistence)
    results = run_suite(manifest, cfg, workers)
    per_instance = {k: float(np.var(v)) for k, v in results.by_instance(method, s).items()}
    return {"class": manifest.coefficient_class, "s": s, "method": method,
            "per_instance_variance": per_instance,
            "mean_variance": float(np.mean(list(per_instance.values())))}


def all_comparisons(results: BenchResults) -> list[ComparisonOutcome]:
    methods = results.config.methods
    out = []
    for s in results.config.reads_grid:
        for a in range(len(methods)):
            for b in range(a + 1, len(methods)):
                out.append(compare_methods(results, methods[b], methods[a], s))
    return out


def build_report(results: BenchResults) -> dict:
    report = {
        "schema": REPORT_SCHEMA_ID,
        "suite": {"class": results.manifest.coefficient_class, "spec": list(results.manifest.spec),
                  "seeds": list(results.manifest.seeds),
                  "instance_ids": results.manifest.instance_ids},
        "config": results.config.to_dict(),
        "per_instance": [r.to_dict() for r in results.records],
        "comparisons": [asdict(c) for c in all_comparisons(results)],
        "robustness": robustness_table(results) if results.config.repeats >= 2 else [],
        "robustness_aggregation": ROBUSTNESS_AGGREGATION,
    }
    validate_report(report)
    return report


def report_schema() -> dict:
    text = importlib.resources.files("mqc").joinpath("report_schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate_report(report: dict) -> None:
    """Check ``report`` against the shipped JSON schema and its cross-references."""
    import jsonschema

    jsonschema.validate(report, report_schema())
    ids = set(report["suite"]["instance_ids"])
    unknown = {r["instance_id"] for r in report["per_instance"]} - ids
    if unknown:
        raise ContractError(f"report references unknown instances {sorted(unknown)}")


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def report_to_csv(report: dict) -> str:
    lines = ["instance_id,repeat,method,s,best_energy,best_energy_display,wall_time_s"]
    for r in report["per_instance"]:
        lines.append(f'{r["instance_id"]},{r["repeat"]},{r["method"]},{r["s"]},'
                     f'{r["best_energy"]!r},{r["best_energy_display"]},{r["wall_time_s"]!r}')
    return "\n".join(lines) + "\n"


def format_robustness_table(rows: Iterable[dict], methods: Sequence[str]) -> str:
    """Text table with one line per (class, s) and one column per method."""
    rows = list(rows)
    header = f"{'Coefficients':<13}{'Samples':>8}" + "".join(f"{m:>12}" for m in methods)
    lines = [header, "-" * len(header)]
    cells = {(r["class"], r["s"], r["method"]): r["mean_variance"] for r in rows}
    for cls, s in sorted({(r["class"], r["s"]) for r in rows}, key=lambda k: (k[0], k[1])):
        vals = "".join(f"{cells.get((cls, s, m), float('nan')):>12.4f}" for m in methods)
        lines.append(f"{cls:<13}{s:>8}{vals}")
    return "\n".join(lines)
