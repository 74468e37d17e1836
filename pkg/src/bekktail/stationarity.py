"""Existence of a strictly stationary solution: top Lyapunov exponent and sufficient conditions."""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .kernels import get_backend
from .model import ModelSpec, build_companion_template
from .structure import StructureDecomposition, StructureKind, classify_spec, spectral_radius
from .tailtheory import E_LOG_ABS_NORMAL

RENORM_EVERY = 10
_CHUNK_STEPS = 500


class Verdict(str, enum.Enum):
    STATIONARY = "Stationary"
    NON_STATIONARY = "NonStationary"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class LyapunovReport:
    gamma_hat: float
    stderr: float
    n_horizon: int
    replicas: int
    closed_form: float | None
    verdict: Verdict

    def to_dict(self) -> dict:
        return {
            "gamma_hat": self.gamma_hat,
            "stderr": self.stderr,
            "n_horizon": self.n_horizon,
            "replicas": self.replicas,
            "closed_form": self.closed_form,
            "verdict": self.verdict.value,
        }


def nelson_bound() -> float:
    """Largest a^2 for which the scalar Gaussian ARCH(1) X_t = a X_{t-1} z_t + ... is stationary: 2 exp(euler_gamma)."""
    return 2.0 * math.exp(np.euler_gamma)


def decide(gamma_hat: float, stderr: float) -> Verdict:
    if gamma_hat + 2 * stderr < 0:
        return Verdict.STATIONARY
    if gamma_hat - 2 * stderr > 0:
        return Verdict.NON_STATIONARY
    return Verdict.INCONCLUSIVE


def closed_form_gamma(spec: ModelSpec, dec: StructureDecomposition | None = None) -> float | None:
    """max_i E log|M_ii| when q = 1 and the coefficients are jointly diagonal or triangular.

    M_ii = sum_j m_j (U_j)_ii is N(0, sigma_i^2), so E log|M_ii| = log sigma_i + E log|z|.
    Returns None when no such structure is available.
    """
    if spec.q != 1:
        return None
    if dec is None:
        dec = classify_spec(spec)
    if dec.kind is StructureKind.GENERAL:
        return None
    diag = np.array([np.diag(U) for U in dec.transformed])
    sigmas = np.sqrt(np.sum(diag ** 2, axis=0))
    with np.errstate(divide="ignore"):
        return float(np.max(np.log(sigmas)) + E_LOG_ABS_NORMAL)


def _lyap_group(template, seed: int, indices, n_horizon: int, kern) -> np.ndarray:
    K = len(template.random_slots)
    dim = template.dim
    gens = [rng.stream(seed, rng.LYAPUNOV, r) for r in indices]
    prod = np.broadcast_to(np.eye(dim), (len(indices), dim, dim)).copy()
    logscale = np.zeros(len(indices))
    done = 0
    while done < n_horizon:
        T = min(_CHUNK_STEPS, n_horizon - done)
        z = np.empty((len(indices), T, K))
        for i, g in enumerate(gens):
            z[i] = rng.normals(g, (T, K))
        kern.lyap_chunk(template.slot_matrices, template.slot_lags, z, prod, logscale, RENORM_EVERY, done)
        done += T
    with np.errstate(divide="ignore"):
        return (logscale + np.log(np.linalg.norm(prod, ord=2, axis=(1, 2)))) / n_horizon


def lyapunov_estimate(spec: ModelSpec, n_horizon: int = 2000, replicas: int = 200, seed: int = 0,
                      backend: str | None = None, workers: int = 1,
                      dec: StructureDecomposition | None = None) -> LyapunovReport:
    """Monte Carlo estimate of gamma = lim (1/n) E log||M_n ... M_1|| with replica standard error.

    Each replica multiplies ``n_horizon`` companion matrices drawn from its own stream,
    dividing by the Frobenius norm every 10 steps; the final log operator 2-norm is added
    to the accumulated log scales.
    """
    if n_horizon < 1 or replicas < 2:
        raise ValueError("need n_horizon >= 1 and replicas >= 2")
    kern = get_backend(backend)
    template = build_companion_template(spec)
    batches = [list(range(s, min(s + 256, replicas))) for s in range(0, replicas, 256)]

    def run(idx):
        return _lyap_group(template, seed, idx, n_horizon, kern)

    if workers > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, batches))
    else:
        parts = [run(b) for b in batches]
    per_rep = np.concatenate(parts)
    gamma_hat = float(np.mean(per_rep))
    stderr = float(np.std(per_rep, ddof=1) / math.sqrt(replicas))
    if not math.isfinite(gamma_hat):  # a product collapsed to zero exactly
        gamma_hat, stderr = -math.inf, 0.0
    return LyapunovReport(
        gamma_hat=gamma_hat, stderr=stderr, n_horizon=n_horizon, replicas=replicas,
        closed_form=closed_form_gamma(spec, dec), verdict=decide(gamma_hat, stderr),
    )


def expected_kronecker(spec: ModelSpec) -> np.ndarray:
    """E[M (x) M] = Mbar (x) Mbar + sum over slots S (x) S (slot weights are independent, centered, unit variance)."""
    template = build_companion_template(spec)
    Mbar = template.deterministic_part
    out = np.kron(Mbar, Mbar)
    for slot in template.random_slots:
        out += np.kron(slot.placement, slot.placement)
    return out


def kronecker_condition(spec: ModelSpec) -> dict:
    """Sufficient second-moment condition rho(E[M (x) M]) < 1."""
    rho = spectral_radius(expected_kronecker(spec))
    return {"rho": rho, "sufficient": bool(rho < 1)}
