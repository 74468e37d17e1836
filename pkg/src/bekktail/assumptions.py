"""Sufficient-condition checkers for the irreducibility, proximality and invertibility hypotheses
behind the general-order multivariate tail result.

None of the checks decides the semigroup conditions directly; each verdict records in
``addresses`` which sufficient condition it evaluates.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from . import rng
from .model import ModelSpec


class AssumptionName(str, enum.Enum):
    IRREDUCIBILITY_DENSITY = "IrreducibilityDensity"
    IRREDUCIBILITY_NON_PARALLEL = "IrreducibilityNonParallel"
    PROXIMALITY_DENSITY = "ProximalityDensity"
    DET_NONDEGENERATE = "DetNondegenerate"


class Status(str, enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    UNDETERMINED = "Undetermined"


@dataclass
class AssumptionVerdict:
    name: AssumptionName
    status: Status
    witness: object = None
    detail: str = ""
    addresses: str = ""

    def __post_init__(self):
        if self.status is Status.FAILS and self.witness is None:
            raise ValueError("a failing verdict needs a witness")

    def to_dict(self) -> dict:
        return {"name": self.name.value, "status": self.status.value, "witness": self.witness,
                "detail": self.detail, "addresses": self.addresses}


_IRRED = "irreducibility (no finite union of proper subspaces is invariant)"
_PROX = "proximality (the semigroup contains a matrix with a simple dominant eigenvalue)"
_DET = "almost sure invertibility of the last lag block M_q"


def _scale(spec: ModelSpec) -> float:
    return float(sum(np.linalg.norm(A, 2) ** 2 for A in spec.A.reshape(-1, spec.d, spec.d)))


# ---------------------------------------------------------------------------
# irreducibility: full-support density of M^(1,q) x

def _cov_batch(spec: ModelSpec, X: np.ndarray) -> np.ndarray:
    """Cov(M^(1,q) x) = sum_ij A_ij x_i x_i' A_ij' for each row x of X (S x dq)."""
    S, d = X.shape[0], spec.d
    cov = np.zeros((S, d, d))
    for i in range(spec.q):
        xi = X[:, i * d:(i + 1) * d]
        for j in range(spec.l):
            y = xi @ spec.A[i, j].T
            cov += y[:, :, None] * y[:, None, :]
    return cov


def _lambda_min_and_grad(spec: ModelSpec, X: np.ndarray):
    vals, vecs = np.linalg.eigh(_cov_batch(spec, X))
    lam, v = vals[:, 0], vecs[:, :, 0]
    grad = np.zeros_like(X)
    d = spec.d
    for i in range(spec.q):
        xi = X[:, i * d:(i + 1) * d]
        for j in range(spec.l):
            A = spec.A[i, j]
            proj = np.einsum("sa,sa->s", v, xi @ A.T)
            grad[:, i * d:(i + 1) * d] += 2.0 * proj[:, None] * (v @ A)
    return lam, grad


def minimize_lambda_min(spec: ModelSpec, starts: int = 200, seed: int = 0, iters: int = 300):
    """Multi-start projected gradient descent of lambda_min(Cov(M^(1,q) x)) over the unit sphere.

    Returns the final values and points of every start; the first dq starts are the coordinate axes.
    """
    dim = spec.dq
    gen = rng.stream(seed, rng.ASSUMPTIONS, 0)
    X = np.vstack([np.eye(dim), rng.normals(gen, (starts, dim))])
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    scale = _scale(spec)
    step = np.full(X.shape[0], 0.5 / max(scale, 1e-300))
    lam, grad = _lambda_min_and_grad(spec, X)
    for _ in range(iters):
        trial = X - step[:, None] * grad
        trial /= np.linalg.norm(trial, axis=1, keepdims=True)
        lam_t, grad_t = _lambda_min_and_grad(spec, trial)
        better = lam_t < lam
        X[better], lam[better], grad[better] = trial[better], lam_t[better], grad_t[better]
        step = np.where(better, step * 1.5, step * 0.5)
        if np.all(step < 1e-12 / max(scale, 1e-300)):
            break
    return lam, X


def check_irreducibility_density(spec: ModelSpec, seed: int = 0, starts: int = 200) -> AssumptionVerdict:
    """M^(1,q) x is a centered Gaussian vector; its density is positive on R^d iff Cov(x) is positive definite.

    Holds when the smallest eigenvalue found over all starts exceeds 1e-8 times the
    coefficient scale sum ||A_ij||^2 ("numerically certified"); Fails when a point with
    lambda_min below 1e-14 times the scale is found; Undetermined in between.
    """
    scale = _scale(spec)
    lams, X = minimize_lambda_min(spec, starts=starts, seed=seed)
    pd_tol, zero_tol = 1e-8 * scale, 1e-14 * scale
    # the earliest certificate of singularity (axes come first), else the overall minimum
    hits = np.flatnonzero(lams < zero_tol)
    best = int(hits[0]) if hits.size else int(np.argmin(lams))
    lam, x = float(lams[best]), X[best]
    name = AssumptionName.IRREDUCIBILITY_DENSITY
    addresses = f"{_IRRED}, via a strictly positive density of M^(1,q) x for every x != 0"
    if lam > pd_tol:
        return AssumptionVerdict(name, Status.HOLDS, {"min_lambda": lam},
                                 f"numerically certified: min lambda_min over the sphere {lam:.4g} > {pd_tol:.3g}",
                                 addresses)
    if lam < zero_tol:
        return AssumptionVerdict(name, Status.FAILS, {"x": x.tolist(), "lambda_min": lam},
                                 "Cov(M^(1,q) x) is singular: the law of M^(1,q) x lives on a proper subspace",
                                 addresses)
    return AssumptionVerdict(name, Status.UNDETERMINED, {"x": x.tolist(), "lambda_min": lam},
                             f"min lambda_min {lam:.3g} is neither clearly positive nor zero", addresses)


# ---------------------------------------------------------------------------
# irreducibility: non-parallel trajectory

def _spans(spec: ModelSpec, x: np.ndarray, tol: float) -> bool:
    d = spec.d
    cols = []
    for i in range(spec.q):
        xi = x[i * d:(i + 1) * d]
        cols.extend(spec.A[i, j] @ xi for j in range(spec.l))
    s = np.linalg.svd(np.array(cols).T, compute_uv=False)
    if s.size < d:
        return False
    return s[0] > 0 and s[d - 1] > tol * s[0]


def structured_starts(spec: ModelSpec) -> list[np.ndarray]:
    """Coordinate axes, null vectors of the coefficients and, for q = 1, directions where two
    coefficient matrices act in parallel (real eigenvectors of the pencil A_j - lambda A_k)."""
    dim, d = spec.dq, spec.d
    starts = [e for e in np.eye(dim)]
    for i in range(spec.q):
        for j in range(spec.l):
            _, s, vt = np.linalg.svd(spec.A[i, j])
            for k in np.flatnonzero(s <= 1e-12 * max(s[0], 1e-300)):
                x = np.zeros(dim)
                x[i * d:(i + 1) * d] = vt[k]
                starts.append(x)
    if spec.q == 1:
        for j, k in itertools.combinations(range(spec.l), 2):
            A, B = spec.A[0, j], spec.A[0, k]
            for P, Q in ((A, B), (B, A)):
                if abs(np.linalg.det(Q)) > 1e-12 * max(np.linalg.norm(Q) ** d, 1e-300):
                    w, V = np.linalg.eig(np.linalg.solve(Q, P))
                    starts.extend(np.real(V[:, m]) for m in range(d) if abs(w[m].imag) <= 1e-12 * (1 + abs(w[m])))
    out = []
    for x in starts:
        n = np.linalg.norm(x)
        if n > 0:
            out.extend([x / n, -x / n])
    return out


def check_nonparallel_trajectory(spec: ModelSpec, trials: int = 100, horizon: int = 20, seed: int = 0,
                                 tol: float = 1e-8) -> AssumptionVerdict:
    """For each start x, follow x^(n) = M_n ... M_1 x and look for an n at which the vectors
    {A_ij x_i^(n)} span R^d (for d = 2, q = 1, l = 2: A_1 x^(n) and A_2 x^(n) are nonzero and not
    parallel), so that the next M^(1,q) x^(n) can take any value in R^d.

    Starts are ``trials`` random directions plus structured ones.  A randomized check cannot prove
    failure: the result is Holds or Undetermined, never Fails.
    """
    from .model import build_companion_template
    from .simulate import draw_coefficients

    template = build_companion_template(spec)
    gen = rng.stream(seed, rng.ASSUMPTIONS, 1)
    starts = structured_starts(spec) + [x / np.linalg.norm(x) for x in rng.normals(gen, (trials, spec.dq))]
    steps_needed = []
    for x0 in starts:
        x = x0.copy()
        hit = None
        for n in range(horizon + 1):
            if _spans(spec, x, tol):
                hit = n
                break
            M, _ = draw_coefficients(template, gen)
            x = M @ x
            nx = np.linalg.norm(x)
            if nx == 0:
                break
            x /= nx
        if hit is None:
            name = AssumptionName.IRREDUCIBILITY_NON_PARALLEL
            return AssumptionVerdict(
                name, Status.UNDETERMINED, {"start": x0.tolist()},
                f"always parallel: the coefficient images stayed in a proper subspace for {horizon} steps from this start",
                f"{_IRRED}, via escape of trajectories from parallel configurations",
            )
        steps_needed.append(hit)
    return AssumptionVerdict(
        AssumptionName.IRREDUCIBILITY_NON_PARALLEL, Status.HOLDS,
        {"starts": len(starts), "max_steps": int(max(steps_needed))},
        f"all {len(starts)} starts reached a spanning configuration within {max(steps_needed)} steps",
        f"{_IRRED}, via escape of trajectories from parallel configurations",
    )


# ---------------------------------------------------------------------------
# proximality

def _proximal_gap(M: np.ndarray) -> float:
    """Relative gap |l1| / |l2| - 1 when the dominant eigenvalue is real and simple, else 0."""
    w = np.linalg.eigvals(M)
    order = np.argsort(-np.abs(w))
    w = w[order]
    if abs(w[0]) == 0 or abs(w[0].imag) > 1e-12 * abs(w[0]):
        return 0.0
    if w.size == 1:
        return np.inf
    return float(abs(w[0]) / max(abs(w[1]), 1e-300) - 1.0)


def check_proximality_density(spec: ModelSpec, seed: int = 0, draws: int = 1000) -> AssumptionVerdict:
    """Each lag block M_i = sum_j m_ij A_ij has a full Lebesgue density on M(d, R) iff the
    vectorized A_ij span R^{d^2}.  When that fails for q = 1, l >= 2 a random search for a
    draw with a simple real dominant eigenvalue is tried (Holds with the eigen-gap as witness,
    Undetermined when none is found)."""
    d = spec.d
    ranks = []
    for i in range(spec.q):
        V = spec.A[i].reshape(spec.l, d * d)
        s = np.linalg.svd(V, compute_uv=False)
        ranks.append(int(np.sum(s > 1e-10 * max(s[0], 1e-300))))
    name = AssumptionName.PROXIMALITY_DENSITY
    if all(r == d * d for r in ranks):
        return AssumptionVerdict(name, Status.HOLDS, {"ranks": ranks},
                                 "every lag block has a density positive near zero",
                                 f"{_PROX}, via full-support densities of the lag blocks")
    bad = next(i for i, r in enumerate(ranks) if r < d * d)
    if spec.q == 1 and spec.l >= 2:
        gen = rng.stream(seed, rng.ASSUMPTIONS, 2)
        m = rng.normals(gen, (draws, spec.l))
        best_gap, best_m = 0.0, None
        for row in m:
            gap = _proximal_gap(np.tensordot(row, spec.A[0], axes=1))
            if gap > best_gap:
                best_gap, best_m = gap, row
        if best_gap > 1e-8:
            return AssumptionVerdict(name, Status.HOLDS, {"eigen_gap": best_gap, "weights": best_m.tolist()},
                                     f"rank {ranks[0]} of {d * d}; found a support element with a simple real "
                                     f"dominant eigenvalue (relative gap {best_gap:.3g})",
                                     f"{_PROX}, via an explicit proximal element of the support")
        return AssumptionVerdict(name, Status.UNDETERMINED, {"rank": ranks[0]},
                                 f"rank {ranks[0]} of {d * d}; no proximal element in {draws} random draws",
                                 f"{_PROX}, via an explicit proximal element of the support")
    return AssumptionVerdict(name, Status.FAILS, f"rank {ranks[bad]} of {d * d}",
                             f"lag {bad + 1} coefficients span only a {ranks[bad]}-dimensional subspace of M(d, R)",
                             f"{_PROX}, via full-support densities of the lag blocks (sufficient condition only)")


# ---------------------------------------------------------------------------
# invertibility of the last lag block

_RATIONAL_POINTS = 10


def _rational_weights(l: int) -> np.ndarray:
    pts = np.empty((_RATIONAL_POINTS, l))
    for k in range(_RATIONAL_POINTS):
        for j in range(l):
            pts[k, j] = ((k + 1) * (2 * j + 1) % 7 - 3) / (j + 2) + (1.0 if j == k % l else 0.0)
    return pts


def check_det_nondegenerate(spec: ModelSpec, seed: int = 0, tol: float = 1e-10) -> AssumptionVerdict:
    """det(M_q) is a polynomial in the weights m_q1..m_ql; it vanishes on a null set unless it is
    the zero polynomial.  A row or column that is zero in every A_qj makes it identically zero;
    otherwise the determinant is evaluated at one Gaussian and ten fixed rational weight vectors."""
    As = spec.A[spec.q - 1]
    name = AssumptionName.DET_NONDEGENERATE
    addresses = _DET
    ref = max(float(np.max(np.abs(As))), 1e-300)
    absmax = np.max(np.abs(As), axis=0)
    for axis, label in ((1, "row"), (0, "column")):
        zero = np.flatnonzero(np.max(absmax, axis=axis) <= 1e-14 * ref)
        if zero.size:
            return AssumptionVerdict(name, Status.FAILS, f"{label} {zero[0] + 1} is zero in every A_qj",
                                     "det(M_q) vanishes identically", addresses)
    gen = rng.stream(seed, rng.ASSUMPTIONS, 3)
    points = np.vstack([rng.normals(gen, (1, spec.l)), _rational_weights(spec.l)])
    norms = np.array([np.linalg.norm(A, 2) for A in As])
    best = 0.0
    for m in points:
        scale = float(np.abs(m) @ norms) ** spec.d
        det = abs(np.linalg.det(np.tensordot(m, As, axes=1)))
        if scale > 0:
            best = max(best, det / scale)
        if det > tol * scale:
            return AssumptionVerdict(name, Status.HOLDS, {"weights": m.tolist(), "abs_det": det},
                                     "det(M_q) is not the zero polynomial", addresses)
    return AssumptionVerdict(name, Status.FAILS, {"max_relative_det": best},
                             f"det(M_q) vanished at all {len(points)} evaluation points", addresses)


def check_all(spec: ModelSpec, seed: int = 0) -> list[AssumptionVerdict]:
    return [
        check_irreducibility_density(spec, seed=seed),
        check_nonparallel_trajectory(spec, seed=seed),
        check_proximality_density(spec, seed=seed),
        check_det_nondegenerate(spec, seed=seed),
    ]
