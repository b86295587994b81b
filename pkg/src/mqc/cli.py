"""Command-line interface: ``mqc <subcommand> ...``.

Exit status is 0 on success, 1 on a usage error and 2 on bad data or a
violated contract; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench
from .correction import mqc, rmqc, sqc_batch
from .errors import IsingError
from .formats import (SuiteManifest, read_instance, read_manifest, read_samples, write_instance,
                      write_manifest, write_metadata, write_samples)
from .ising import energies, energy
from .problems import ChimeraSpec, chimera_instance
from .sampler import SamplerConfig, brute_force_ground, draw_samples


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _add_sampler_args(p: argparse.ArgumentParser, sweeps: int) -> None:
    p.add_argument("--sweeps", type=int, default=sweeps, help="Metropolis sweeps per read")
    p.add_argument("--beta-start", type=float, default=bench.BenchConfig.beta_schedule[0])
    p.add_argument("--beta-end", type=float, default=bench.BenchConfig.beta_schedule[1])
    p.add_argument("--mode", choices=["independent", "clustered"], default="independent")
    p.add_argument("--persistence", type=int, default=1, help="reads per cluster in clustered mode")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mqc", description="Ising post-processing toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a suite of random Chimera instances")
    p.add_argument("--class", dest="cls", choices=["binary", "uniform", "normal"], required=True)
    p.add_argument("--spec", default="4,4,4", help="M,C,K")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--seed", type=_nonneg, default=0, help="seed of the first instance")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("sample", help="draw reads from the stand-in sampler")
    p.add_argument("--instance", required=True)
    p.add_argument("--reads", type=int, required=True)
    _add_sampler_args(p, bench.BenchConfig.sweeps_per_read)
    p.add_argument("--precision-bits", type=int, default=None)
    p.add_argument("--seed", type=_nonneg, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("correct", help="post-process a sample file")
    p.add_argument("--instance", required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--method", choices=["sqc", "mqc", "rmqc"], required=True)
    p.add_argument("--r", type=int, default=None, help="RMQC passes")
    p.add_argument("--seed", type=_nonneg, default=0, help="RMQC shuffle seed")
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="run a suite and write a JSON report")
    p.add_argument("--suite", required=True, help="manifest written by 'generate'")
    p.add_argument("--methods", default="raw,sqc,mqc")
    p.add_argument("--reads-grid", type=_int_list, default=list(bench.DEFAULT_READS_GRID))
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--seed", type=_nonneg, default=0, help="master seed")
    _add_sampler_args(p, bench.BenchConfig.sweeps_per_read)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--report", required=True)
    p.add_argument("--csv", default=None, help="also write per-instance rows as CSV")

    p = sub.add_parser("pvalue", help="one-sided sign-test p-value")
    p.add_argument("--nb", type=int, required=True)
    p.add_argument("--nw", type=int, required=True)

    p = sub.add_parser("oracle", help="exhaustive ground state of a small instance")
    p.add_argument("--instance", required=True)

    p = sub.add_parser("plot", help="render figures from a bench report")
    p.add_argument("--report", required=True)
    p.add_argument("--out", required=True, help="PNG path")
    return parser


def _generate(args) -> None:
    spec = ChimeraSpec.parse(args.spec)
    if args.count < 1:
        raise UsageError("--count must be positive")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = SuiteManifest(args.cls, spec.as_list(), [args.seed + k for k in range(args.count)])
    for seed in manifest.seeds:
        write_instance(chimera_instance(spec, args.cls, seed), out / f"{manifest.instance_id(seed)}.json")
    write_manifest(manifest, out / "manifest.json")
    print(f"wrote {args.count} instances to {out}")


def _sample(args) -> None:
    model = read_instance(args.instance)
    cfg = SamplerConfig(args.reads, args.sweeps, (args.beta_start, args.beta_end), args.mode,
                        args.persistence, args.seed, args.precision_bits)
    Z = draw_samples(model, cfg)
    write_samples(Z, args.out)
    write_metadata(args.out, {"instance": str(args.instance), "sampler": cfg.to_dict()})
    print(f"best raw energy {energies(model, Z).min():.6f}")


def _correct(args) -> None:
    model = read_instance(args.instance)
    Z = read_samples(args.samples)
    meta = {"method": args.method, "input_count": int(Z.shape[0])}
    if args.method == "sqc":
        out = sqc_batch(model, Z)
        best = float(energies(model, out).min())
    elif args.method == "mqc":
        out = mqc(model, Z)[None, :]
        best = energy(model, out[0])
    else:
        if args.r is None:
            raise UsageError("--method rmqc needs --r")
        out = rmqc(model, Z, args.r, args.seed)[None, :]
        best = energy(model, out[0])
        meta.update(r=args.r, seed=args.seed)
    meta["energy"] = best
    write_samples(out, args.out)
    write_metadata(args.out, meta)
    print(f"energy {best:.6f}")


def _load_models(manifest: SuiteManifest, folder: Path) -> dict | None:
    """Instance files next to the manifest, if all of them are there."""
    paths = {seed: folder / f"{manifest.instance_id(seed)}.json" for seed in manifest.seeds}
    if not all(p.exists() for p in paths.values()):
        return None
    return {seed: read_instance(p) for seed, p in paths.items()}


def _bench(args) -> None:
    manifest = read_manifest(args.suite)
    config = bench.BenchConfig(tuple(bench.parse_methods(args.methods)), tuple(args.reads_grid),
                               args.repeats, args.seed, args.sweeps, (args.beta_start, args.beta_end),
                               args.mode, args.persistence)
    models = _load_models(manifest, Path(args.suite).parent)
    results = bench.run_suite(manifest, config, args.workers, models)
    report = bench.build_report(results)
    Path(args.report).write_text(bench.report_to_json(report), encoding="utf-8")
    if args.csv:
        Path(args.csv).write_text(bench.report_to_csv(report), encoding="utf-8")
    for c in report["comparisons"]:
        print(f"s={c['s']:<6} {c['expected_winner']:>8} vs {c['baseline']:<8} "
              f"wins {c['n_better']:>3} losses {c['n_worse']:>3} ties {c['n_tie']:>3} "
              f"p={c['p_value']:.4e} ({c['significance']})")
    if report["robustness"]:
        print()
        print(bench.format_robustness_table(report["robustness"], config.methods))


def _oracle(args) -> None:
    model = read_instance(args.instance)
    z, e = brute_force_ground(model)
    print(json.dumps({"energy": e, "state": z.tolist()}))


def _plot(args) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    report = json.loads(Path(args.report).read_text(encoding="utf-8"))
    bench.validate_report(report)
    methods = report["config"]["methods"]
    grid = report["config"]["reads_grid"]
    fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4))
    for m in methods:
        means = [np.mean([r["best_energy"] for r in report["per_instance"]
                          if r["method"] == m and r["s"] == s and r["repeat"] == 0]) for s in grid]
        left.plot(grid, means, marker="o", label=m)
    left.set_xscale("log")
    left.set_xlabel("samples s")
    left.set_ylabel("mean best energy")
    left.legend()
    comps = report["comparisons"]
    labels = [f"{c['expected_winner']}/{c['baseline']}\ns={c['s']}" for c in comps]
    total = [c["n_better"] + c["n_worse"] + c["n_tie"] for c in comps]
    right.bar(range(len(comps)), [c["n_better"] / t for c, t in zip(comps, total)])
    right.set_xticks(range(len(comps)), labels, fontsize=6, rotation=90)
    right.set_ylabel("win rate of expected winner")
    right.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    plt.close(fig)


def _pvalue(args) -> None:
    print(f"{bench.sign_test_p(args.nb, args.nw):.4e}")


_COMMANDS = {"generate": _generate, "sample": _sample, "correct": _correct, "bench": _bench,
             "pvalue": _pvalue, "oracle": _oracle, "plot": _plot}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (IsingError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
