"""Command-line interface: ``bekktail analyze CONFIG`` and ``bekktail reproduce ID``.

Exit codes: 0 success, 1 a reproduced example missed its expected conclusion,
2 invalid config, 3 a requested assumption check failed, 4 nonstationary model
under --require-stationary.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .assumptions import AssumptionName, AssumptionVerdict, Status, check_all
from .errors import InsufficientData, SimulationOverflow, SpecError, UnknownExample
from .estimate import (ComponentTailDiagnostics, angular_histogram, diagnose_component, write_hill_curve_csv,
                       write_survival_csv)
from .fixtures import FIXTURES, Fixture, get_fixture
from .kernels import backend_name
from .model import ModelSpec, load_spec
from .simulate import SimConfig, simulate_ensemble
from .stationarity import LyapunovReport, Verdict, kronecker_condition, lyapunov_estimate, nelson_bound
from .structure import StructureDecomposition, classify_spec, simultaneous_triangularize_2d
from .tailtheory import TailReport, tail_theory

logger = logging.getLogger("bekktail")

REPORT_VERSION = 1
EXIT_OK, EXIT_EXPECTATION, EXIT_CONFIG, EXIT_ASSUMPTION, EXIT_NONSTATIONARY = 0, 1, 2, 3, 4
DEFAULT_SAMPLES = 1_000_000
DEFAULT_REPLICAS = 1000
DEFAULT_THINNING = 20

# which hypothesis each checker speaks to; a hypothesis is refuted only if no check certifies it
_HYPOTHESIS = {
    AssumptionName.IRREDUCIBILITY_DENSITY: "irreducibility",
    AssumptionName.IRREDUCIBILITY_NON_PARALLEL: "irreducibility",
    AssumptionName.PROXIMALITY_DENSITY: "proximality",
    AssumptionName.DET_NONDEGENERATE: "invertibility",
}


@dataclass
class RunResult:
    spec: ModelSpec
    dec: StructureDecomposition
    seed: int
    stationarity: LyapunovReport | None = None
    kronecker: dict | None = None
    tail: TailReport | None = None
    sim_config: SimConfig | None = None
    empirics: list[ComponentTailDiagnostics] | None = None
    empirics_errors: dict[int, str] = field(default_factory=dict)
    angular: dict | None = None
    assumptions: list[AssumptionVerdict] | None = None
    skipped: dict[str, str] = field(default_factory=dict)

    def uncertified(self) -> list[str]:
        """Hypotheses with a failing check and no certifying one."""
        if not self.assumptions:
            return []
        by = {}
        for v in self.assumptions:
            by.setdefault(_HYPOTHESIS[v.name], []).append(v.status)
        return sorted(h for h, st in by.items() if Status.FAILS in st and Status.HOLDS not in st)

    def to_report(self, wall_time: float) -> dict:
        def section(name, build):
            if name in self.skipped:
                return {"skipped": self.skipped[name]}
            return build()

        def stationarity():
            out = self.stationarity.to_dict()
            out["kronecker"] = self.kronecker
            out["nelson_bound"] = nelson_bound()
            return out

        def empirics():
            comps = []
            for i in range(self.spec.d):
                if i in self.empirics_errors:
                    comps.append({"component": i + 1, "skipped": self.empirics_errors[i]})
                else:
                    comps.append(next(c for c in self.empirics if c.component == i).to_dict())
            return {"sim_config": asdict(self.sim_config), "components": comps, "angular": self.angular}

        return {
            "report_version": REPORT_VERSION,
            "spec_echo": {**self.spec.to_dict(), "digest": self.spec.digest()},
            "structure": self.dec.summary(),
            "stationarity": section("stationarity", stationarity),
            "tail_theory": section("tail_theory", lambda: self.tail.to_dict()),
            "tail_empirics": section("tail_empirics", empirics),
            "assumptions": section("assumptions", lambda: {
                "verdicts": [v.to_dict() for v in self.assumptions],
                "uncertified": self.uncertified(),
            }),
            "provenance": {"seed": self.seed, "version": __version__, "backend": backend_name(),
                           "wall_time": wall_time},
        }


def run_pipeline(spec: ModelSpec, seed: int = 0, simulate: bool = False, check_assumptions: bool = False,
                 samples: int = DEFAULT_SAMPLES, replicas: int = DEFAULT_REPLICAS, thinning: int = DEFAULT_THINNING,
                 force_triangular: bool = False) -> RunResult:
    """classify -> stationarity -> tail theory -> (simulate) -> (assumptions); failures become skipped sections."""
    dec = simultaneous_triangularize_2d(spec.lag_matrices(1)) if force_triangular else classify_spec(spec)
    run = RunResult(spec=spec, dec=dec, seed=seed)
    run.stationarity = lyapunov_estimate(spec, seed=seed, dec=dec)
    run.kronecker = kronecker_condition(spec)
    nonstationary = run.stationarity.verdict is Verdict.NON_STATIONARY

    if nonstationary:
        run.skipped["tail_theory"] = "NonStationary: top Lyapunov exponent is positive"
    else:
        run.tail = tail_theory(spec, dec, seed=seed)

    if not simulate:
        run.skipped["tail_empirics"] = "not requested (use --simulate)"
    elif nonstationary:
        run.skipped["tail_empirics"] = "NonStationary: simulation would diverge"
    else:
        _simulate(run, samples, replicas, thinning)

    if check_assumptions:
        run.assumptions = check_all(spec, seed=seed)
    else:
        run.skipped["assumptions"] = "not requested (use --check-assumptions)"
    return run


def _simulate(run: RunResult, samples: int, replicas: int, thinning: int) -> None:
    sim = SimConfig(seed=run.seed, n_samples=samples, replicas=min(replicas, samples), thinning=thinning)
    run.sim_config = sim
    try:
        batch = simulate_ensemble(run.spec, sim)
    except SimulationOverflow as exc:
        run.skipped["tail_empirics"] = f"SimulationOverflow: {exc}"
        return
    alphas = run.tail.alphas if run.tail is not None else [None] * run.spec.d
    run.empirics = []
    for i in range(run.spec.d):
        try:
            run.empirics.append(diagnose_component(batch.samples[:, i], i, alphas[i]))
        except InsufficientData as exc:
            run.empirics_errors[i] = f"InsufficientData: {exc}"
    if run.spec.dq >= 2:
        try:
            run.angular = angular_histogram(batch.samples).to_dict()
        except InsufficientData as exc:
            run.angular = {"skipped": f"InsufficientData: {exc}"}
    else:
        run.angular = {"skipped": "one-dimensional state"}


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _sanitize(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def dump_report(report: dict) -> str:
    return json.dumps(_sanitize(report), indent=2, sort_keys=False, default=_json_default, allow_nan=False) + "\n"


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_csv(run: RunResult, directory: str) -> None:
    if not run.empirics:
        logger.warning("no empirical diagnostics to write (use --simulate)")
        return
    os.makedirs(directory, exist_ok=True)
    write_hill_curve_csv(os.path.join(directory, "hill_curve.csv"), run.empirics)
    write_survival_csv(os.path.join(directory, "survival.csv"), run.empirics)


def cmd_analyze(args) -> int:
    t0 = time.perf_counter()
    try:
        spec = load_spec(args.config)
    except (SpecError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    run = run_pipeline(spec, seed=args.seed, simulate=args.simulate, check_assumptions=args.check_assumptions,
                       samples=args.samples, replicas=args.replicas, thinning=args.thinning)
    _write(dump_report(run.to_report(time.perf_counter() - t0)), args.out)
    if args.emit_csv:
        _emit_csv(run, args.emit_csv)
    if args.require_stationary and run.stationarity.verdict is Verdict.NON_STATIONARY:
        print("error: model is not stationary (top Lyapunov exponent > 0)", file=sys.stderr)
        return EXIT_NONSTATIONARY
    bad = run.uncertified()
    if bad:
        print(f"error: assumption checks failed for: {', '.join(bad)}", file=sys.stderr)
        return EXIT_ASSUMPTION
    return EXIT_OK


def reproduce_fixture(fx: Fixture, seed: int = 0, simulate: bool = False, samples: int = DEFAULT_SAMPLES,
                      replicas: int = DEFAULT_REPLICAS) -> tuple[RunResult, list[tuple[str, bool]]]:
    run = run_pipeline(fx.spec, seed=seed, simulate=simulate, check_assumptions=True, samples=samples,
                       replicas=replicas, force_triangular=fx.force_triangular)
    return run, fx.expectations(run)


def cmd_reproduce(args) -> int:
    t0 = time.perf_counter()
    try:
        fx = get_fixture(args.example_id)
    except UnknownExample as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    reports, ok = {}, True
    for item in [fx] + fx.variants:
        run, checks = reproduce_fixture(item, seed=args.seed, simulate=args.simulate, samples=args.samples,
                                        replicas=args.replicas)
        print(f"example {item.example_id}: {item.title}")
        for label, passed in checks:
            print(f"  {'PASS' if passed else 'FAIL'}  {label}")
            ok &= bool(passed)
        reports[item.example_id] = run.to_report(time.perf_counter() - t0)
    if args.out:
        payload = reports[fx.example_id] if not fx.variants else {"report_version": REPORT_VERSION,
                                                                   "examples": reports}
        _write(dump_report(payload), args.out)
    return EXIT_OK if ok else EXIT_EXPECTATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bekktail", description="Stationarity and tail analysis of BEKK-ARCH models.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
        p.add_argument("--simulate", action="store_true", help="simulate an ensemble and run tail diagnostics")
        p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="retained draws (default 10^6)")
        p.add_argument("--replicas", type=int, default=DEFAULT_REPLICAS, help="independent trajectories (default 1000)")
        p.add_argument("--out", help="write the JSON report here instead of stdout")

    a = sub.add_parser("analyze", help="analyze a model config file")
    a.add_argument("config", help="JSON model config")
    common(a)
    a.add_argument("--thinning", type=int, default=DEFAULT_THINNING, help="keep every k-th state (default 20)")
    a.add_argument("--check-assumptions", action="store_true", help="run the assumption checkers")
    a.add_argument("--require-stationary", action="store_true", help="exit 4 if the model is not stationary")
    a.add_argument("--emit-csv", metavar="DIR", help="write hill_curve.csv and survival.csv to DIR")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("reproduce", help=f"run a stored example ({', '.join(FIXTURES)})")
    r.add_argument("example_id")
    common(r)
    r.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if getattr(args, "samples", 1) < 1 or getattr(args, "replicas", 1) < 1 or getattr(args, "thinning", 1) < 1:
        print("error: --samples, --replicas and --thinning must be positive", file=sys.stderr)
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
