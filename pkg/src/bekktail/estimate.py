"""Empirical tail diagnostics: Hill estimates, survival curves, tail balance and angular masses."""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientData
from .model import ModelSpec
from .simulate import SimBatch, SimConfig, simulate_ensemble

MODEL_TOLERANCE = 0.15
N_CURVE = 20
N_SURVIVAL = 30
MIN_EXCEEDANCES = 200


class TailVerdict(str, enum.Enum):
    CONSISTENT = "Consistent"
    INCONSISTENT = "Inconsistent"
    NO_THEORY = "NoTheory"


@dataclass(frozen=True)
class HillEstimate:
    alpha_hat: float
    k: int
    ci_low: float
    ci_high: float
    n: int
    threshold: float

    def to_dict(self) -> dict:
        return {"alpha_hat": self.alpha_hat, "k": self.k, "ci_low": self.ci_low, "ci_high": self.ci_high,
                "n": self.n, "threshold": self.threshold}


def default_k(n: int) -> int:
    return int(math.floor(1.5 * n ** 0.55))


def _descending_abs(sample) -> np.ndarray:
    x = np.abs(np.asarray(sample, dtype=float).ravel())
    return -np.sort(-x)


def _hill_sorted(desc: np.ndarray, k: int, n: int) -> HillEstimate:
    if k < 5:
        raise InsufficientData(f"Hill needs k >= 5, got {k}")
    if k + 1 > n or desc[k] <= 0:
        raise InsufficientData(f"Hill with k={k} needs at least {k + 1} positive values")
    spacing = float(np.sum(np.log(desc[:k] / desc[k])))
    if spacing <= 0:
        raise InsufficientData("all top order statistics are equal (zero log-spacings)")
    a = k / spacing
    half = 1.96 * a / math.sqrt(k)
    return HillEstimate(alpha_hat=a, k=k, ci_low=a - half, ci_high=a + half, n=n, threshold=float(desc[k]))


def hill_estimator(sample, k: int | None = None) -> HillEstimate:
    """Hill estimate k / sum_{i<=k} log(x_(i) / x_(k+1)) on the descending order statistics of |sample|.

    The confidence band is alpha_hat +- 1.96 alpha_hat / sqrt(k).
    """
    desc = _descending_abs(sample)
    n = desc.size
    if k is None:
        k = default_k(n)
    return _hill_sorted(desc, int(k), n)


def hill_curve(sample, n_points: int = N_CURVE, k_min: int = 10, k_max: int | None = None) -> list[tuple[int, float]]:
    """Hill estimates over a log-spaced grid of k (for visual plateau inspection)."""
    desc = _descending_abs(sample)
    n = desc.size
    positives = int(np.count_nonzero(desc > 0))
    k_max = min(k_max or max(n // 10, k_min), positives - 1)
    if k_max < 5:
        return []
    ks = np.unique(np.geomspace(max(5, min(k_min, k_max)), k_max, n_points).astype(int))
    out = []
    for k in ks:
        try:
            out.append((int(k), _hill_sorted(desc, int(k), n).alpha_hat))
        except InsufficientData:
            continue
    return out


def survival_points(sample, x_low: float, n_points: int = N_SURVIVAL) -> list[tuple[float, float]]:
    """(log x, log P^(|X| > x)) at log-spaced x from ``x_low`` to the level with 10 exceedances."""
    desc = _descending_abs(sample)
    n = desc.size
    if n < 11 or x_low <= 0:
        return []
    x_high = desc[9]
    if x_high <= x_low:
        return []
    asc = desc[::-1]
    xs = np.geomspace(x_low, x_high, n_points)
    counts = n - np.searchsorted(asc, xs, side="right")
    keep = counts > 0
    return [(float(math.log(x)), float(math.log(c / n))) for x, c in zip(xs[keep], counts[keep])]


def survival_slope(points, decades: float = 1.0) -> float:
    """Least-squares slope of log survival against log x over the top ``decades`` of x."""
    pts = np.asarray(points, dtype=float)
    top = pts[pts[:, 0] >= pts[-1, 0] - decades * math.log(10.0)]
    if top.shape[0] < 3:
        top = pts
    return float(np.polyfit(top[:, 0], top[:, 1], 1)[0])


def tail_balance(sample, threshold: float) -> float:
    """Share of exceedances |X| > threshold that are positive."""
    x = np.asarray(sample, dtype=float)
    big = np.abs(x) > threshold
    total = int(np.count_nonzero(big))
    if total == 0:
        raise InsufficientData("no exceedances above the threshold")
    return float(np.count_nonzero(x[big] > 0) / total)


def compare_with_theory(hill: HillEstimate, theory_alpha: float | None,
                        tolerance: float = MODEL_TOLERANCE) -> TailVerdict:
    if theory_alpha is None or not math.isfinite(theory_alpha):
        return TailVerdict.NO_THEORY
    lo, hi = (1 - tolerance) * hill.ci_low, (1 + tolerance) * hill.ci_high
    return TailVerdict.CONSISTENT if lo <= theory_alpha <= hi else TailVerdict.INCONSISTENT


@dataclass
class ComponentTailDiagnostics:
    component: int
    hill: HillEstimate
    hill_curve: list[tuple[int, float]]
    survival_points: list[tuple[float, float]]
    theory_alpha: float | None
    verdict: TailVerdict
    p_hat: float
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "component": self.component + 1,
            "hill": self.hill.to_dict(),
            "p_hat": self.p_hat,
            "theory_alpha": self.theory_alpha if self.theory_alpha is None or math.isfinite(self.theory_alpha) else None,
            "verdict": self.verdict.value,
            "hill_curve": [[k, a] for k, a in self.hill_curve],
            "survival_points": [[x, s] for x, s in self.survival_points],
            "warnings": list(self.warnings),
        }


def diagnose_component(sample, component: int = 0, theory_alpha: float | None = None, k: int | None = None,
                       tolerance: float = MODEL_TOLERANCE) -> ComponentTailDiagnostics:
    x = np.asarray(sample, dtype=float)
    hill = hill_estimator(x, k)
    return ComponentTailDiagnostics(
        component=component,
        hill=hill,
        hill_curve=hill_curve(x),
        survival_points=survival_points(x, hill.threshold),
        theory_alpha=theory_alpha,
        verdict=compare_with_theory(hill, theory_alpha, tolerance),
        p_hat=tail_balance(x, hill.threshold),
    )


def component_tail_report(spec: ModelSpec, sim: SimConfig, theory=None, batch: SimBatch | None = None,
                          k: int | None = None, backend: str | None = None) -> list[ComponentTailDiagnostics]:
    """Simulate an ensemble (unless ``batch`` is given) and diagnose each of the d observed components.

    ``theory`` is a TailReport, a list of per-component indexes, or None.
    """
    if batch is None:
        batch = simulate_ensemble(spec, sim, backend=backend)
    if theory is None:
        alphas = [None] * spec.d
    elif hasattr(theory, "alphas"):
        alphas = theory.alphas
    else:
        alphas = list(theory)
    out = []
    for i in range(spec.d):
        diag = diagnose_component(batch.samples[:, i], i, alphas[i], k)
        if batch.config.replicas == 1:
            diag.warnings.append("single-path sample: draws are dependent, the Hill band is too narrow")
        out.append(diag)
    return out


@dataclass
class AngularHistogram:
    labels: list[str]
    masses: np.ndarray
    n_exceed: int
    threshold: float

    def to_dict(self) -> dict:
        return {"labels": self.labels, "masses": self.masses.tolist(), "n_exceed": self.n_exceed,
                "threshold": self.threshold}


def angular_histogram(samples, threshold_quantile: float = 0.99) -> AngularHistogram:
    """Empirical distribution of V/|V| over draws with |V| above the given quantile.

    Two dimensions use 36 equal sectors of the circle, labelled by their lower angle in
    degrees; higher dimensions use the 2*dim faces of the cube (the coordinate of largest
    modulus and its sign), labelled like '+e1' or '-e3'.
    """
    V = np.atleast_2d(np.asarray(samples, dtype=float))
    dim = V.shape[1]
    if dim < 2:
        raise ValueError("angular histogram needs at least two coordinates")
    norms = np.linalg.norm(V, axis=1)
    thr = float(np.quantile(norms, threshold_quantile))
    W = V[norms > thr]
    if W.shape[0] < MIN_EXCEEDANCES:
        raise InsufficientData(f"{W.shape[0]} exceedances above the {threshold_quantile} quantile (< {MIN_EXCEEDANCES})")
    if dim == 2:
        theta = np.mod(np.arctan2(W[:, 1], W[:, 0]), 2 * np.pi)
        idx = np.minimum((theta / (2 * np.pi) * 36).astype(int), 35)
        counts = np.bincount(idx, minlength=36)
        labels = [f"{10 * b}" for b in range(36)]
    else:
        j = np.argmax(np.abs(W), axis=1)
        neg = W[np.arange(W.shape[0]), j] < 0
        counts = np.bincount(2 * j + neg, minlength=2 * dim)
        labels = [f"{s}e{c + 1}" for c in range(dim) for s in "+-"]
    return AngularHistogram(labels=labels, masses=counts / counts.sum(), n_exceed=int(W.shape[0]), threshold=thr)


def write_hill_curve_csv(path, diagnostics: list[ComponentTailDiagnostics]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "alpha_hat", "component"])
        for d in diagnostics:
            for k, a in d.hill_curve:
                w.writerow([k, repr(a), d.component + 1])


def write_survival_csv(path, diagnostics: list[ComponentTailDiagnostics]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["log_x", "log_sf", "component"])
        for d in diagnostics:
            for x, s in d.survival_points:
                w.writerow([repr(x), repr(s), d.component + 1])
