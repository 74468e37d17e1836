"""Algebraic structure of the coefficient collection {A_j}.

Finds a real similarity P with P A_j P^{-1} diagonal for every j (simultaneous
diagonalization) or, for d = 2, upper triangular (simultaneous triangularization).
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ComplexEigenvalues,
    NoCommonRealEigenvector,
    NotDiagonalizable,
    NotSimultaneouslyDiagonalizable,
    StructureError,
)

# fixed seed for the generic linear combinations
_COMBO_SEED = 20190601
_MAX_RETRIES = 5


class StructureKind(str, enum.Enum):
    ALREADY_DIAGONAL = "AlreadyDiagonal"
    SIM_DIAGONALIZABLE = "SimDiagonalizable"
    SIM_TRIANGULARIZABLE_2D = "SimTriangularizable2D"
    GENERAL = "General"


@dataclass(frozen=True, eq=False)
class StructureDecomposition:
    kind: StructureKind
    P: np.ndarray
    P_inv: np.ndarray
    transformed: list[np.ndarray]
    residual: float
    tol: float = field(default=0.0)
    detail: str = ""

    def summary(self) -> dict:
        return {
            "kind": self.kind.value,
            "P": self.P.tolist(),
            "P_inv": self.P_inv.tolist(),
            "transformed": [U.tolist() for U in self.transformed],
            "residual": float(self.residual),
            "tol": float(self.tol),
            "detail": self.detail,
        }


def struct_tol(mats) -> float:
    """Relative tolerance 1e-8 * (1 + max ||A_j||) used by all structure tests."""
    scale = max((np.linalg.norm(A, 2) for A in mats), default=0.0)
    return 1e-8 * (1.0 + scale)


def spectral_radius(mat) -> float:
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(mat))))


def check_commuting(mats, tol: float | None = None) -> bool:
    mats = [np.asarray(A, dtype=float) for A in mats]
    if tol is None:
        tol = struct_tol(mats)
    for A, B in itertools.combinations(mats, 2):
        bound = tol * (1.0 + np.linalg.norm(A, 2) * np.linalg.norm(B, 2))
        if np.linalg.norm(A @ B - B @ A, 2) > bound:
            return False
    return True


def _normalize_columns(V: np.ndarray) -> np.ndarray:
    """Unit Euclidean norm, first non-negligible component positive."""
    V = V / np.linalg.norm(V, axis=0)
    for k in range(V.shape[1]):
        col = V[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            V[:, k] = -col
    return V


def _off_diagonal(M: np.ndarray) -> float:
    return float(np.max(np.abs(M - np.diag(np.diag(M))))) if M.size else 0.0


def _cluster(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group (sorted) eigenvalues closer than ``tol`` into index clusters."""
    order = np.argsort(values)
    groups, current = [], [order[0]]
    for a, b in zip(order[:-1], order[1:]):
        if values[b] - values[a] <= tol:
            current.append(b)
        else:
            groups.append(np.array(current))
            current = [b]
    groups.append(np.array(current))
    return groups


def _simdiag_basis(mats: list[np.ndarray], tol: float, rng: np.random.Generator, depth: int = 0) -> np.ndarray:
    """Columns of the returned matrix form a common real eigenbasis of ``mats``."""
    n = mats[0].shape[0]
    if n == 1:
        return np.ones((1, 1))
    last_error: StructureError | None = None
    for attempt in range(_MAX_RETRIES + 1):
        coef = rng.standard_normal(len(mats))
        G = sum(c * A for c, A in zip(coef, mats))
        w, V = np.linalg.eig(G)
        if np.max(np.abs(w.imag)) > tol * (1 + np.max(np.abs(w))):
            raise ComplexEigenvalues("generic combination has non-real eigenvalues; no real P exists")
        w, V = w.real, V.real
        if np.linalg.cond(V) > 1e10:
            last_error = NotDiagonalizable("defective coefficient combination")
            if len(mats) == 1:
                raise last_error
            continue
        V = _normalize_columns(V)
        Vinv = np.linalg.inv(V)
        if all(_off_diagonal(Vinv @ A @ V) <= tol for A in mats):
            order = np.argsort(w, kind="stable")
            return V[:, order]
        last_error = NotSimultaneouslyDiagonalizable("eigenbasis of a generic combination does not diagonalize all matrices")
        # a repeated eigenvalue of G leaves freedom inside its eigenspace: refine blockwise
        groups = _cluster(w, 1e3 * tol)
        if len(groups) > 1 or depth > 0:
            blocks = []
            for g in groups:
                Vg = V[:, g]
                Wg = np.linalg.pinv(Vg)
                sub = [Wg @ A @ Vg for A in mats]
                if len(g) == 1:
                    blocks.append(Vg)
                    continue
                if len(g) == n:
                    break
                inner = _simdiag_basis(sub, tol, rng, depth + 1)
                blocks.append(Vg @ inner)
            else:
                B = _normalize_columns(np.hstack(blocks))
                Binv = np.linalg.inv(B)
                if all(_off_diagonal(Binv @ A @ B) <= tol for A in mats):
                    diag_g = np.diag(Binv @ G @ B)
                    return B[:, np.argsort(diag_g, kind="stable")]
    raise last_error


def simultaneous_diagonalize(mats, tol: float | None = None) -> StructureDecomposition:
    """Real P with P A_j P^{-1} diagonal for all j.

    Eigendecomposes a random linear combination drawn from a fixed seed and keeps
    the basis if it diagonalizes every matrix; retries with fresh coefficients and
    finally refines inside repeated eigenspaces.  Columns of ``P_inv`` are unit
    eigenvectors with first nonzero entry positive.
    """
    mats = [np.atleast_2d(np.asarray(A, dtype=float)) for A in mats]
    if tol is None:
        tol = struct_tol(mats)
    if len(mats) >= 2 and not check_commuting(mats, tol):
        raise NotSimultaneouslyDiagonalizable("matrices do not commute")
    d = mats[0].shape[0]
    if all(_off_diagonal(A) <= tol for A in mats):
        eye = np.eye(d)
        return StructureDecomposition(
            StructureKind.ALREADY_DIAGONAL, eye, eye.copy(),
            [np.diag(np.diag(A)) for A in mats], residual=max(_off_diagonal(A) for A in mats), tol=tol,
        )
    rng = np.random.default_rng(_COMBO_SEED)
    P_inv = _simdiag_basis(mats, tol, rng)
    P = np.linalg.inv(P_inv)
    raw = [P @ A @ P_inv for A in mats]
    transformed = [np.diag(np.diag(U)) for U in raw]
    residual = max(float(np.max(np.abs(U - D))) for U, D in zip(raw, transformed))
    if residual > tol:
        raise NotSimultaneouslyDiagonalizable(f"reconstruction residual {residual:.3g} exceeds {tol:.3g}")
    if np.max(np.abs(P @ P_inv - np.eye(d))) > 1e-10:
        raise NotDiagonalizable("eigenbasis too ill-conditioned to invert")
    return StructureDecomposition(StructureKind.SIM_DIAGONALIZABLE, P, P_inv, transformed, residual, tol)


def _real_eigvecs_2x2(A: np.ndarray, tol: float) -> list[np.ndarray]:
    """Real eigen-directions of a 2x2 matrix; repeated roots are snapped to trace/2."""
    tr, det = np.trace(A), np.linalg.det(A)
    disc = (tr / 2) ** 2 - det
    scale = 1.0 + np.linalg.norm(A, 2) ** 2
    if disc < -tol * scale:
        return []
    if abs(disc) <= tol * scale:
        roots = [tr / 2]
    else:
        s = np.sqrt(disc)
        roots = [tr / 2 - s, tr / 2 + s]
    out = []
    for lam in roots:
        N = A - lam * np.eye(2)
        if np.max(np.abs(N)) <= tol:
            # scalar matrix: every direction is an eigenvector
            out.extend([np.array([1.0, 0.0]), np.array([0.0, 1.0])])
            continue
        row = N[np.argmax(np.linalg.norm(N, axis=1))]
        v = np.array([-row[1], row[0]])
        out.append(v / np.linalg.norm(v))
    return out


def _is_common_eigvec(v: np.ndarray, mats, tol: float) -> bool:
    for A in mats:
        Av = A @ v
        if abs(Av[0] * v[1] - Av[1] * v[0]) > tol * (1 + np.linalg.norm(A, 2)):
            return False
    return True


def simultaneous_triangularize_2d(mats, tol: float | None = None) -> StructureDecomposition:
    """Real P with every P A_j P^{-1} upper triangular (d = 2 only).

    Upper triangular U_j forces the first column v of P^{-1} to be a common
    eigenvector of all A_j; candidates come from each A_j and from one generic
    combination, with e_1 tried first so that triangular input keeps P = I.
    """
    mats = [np.atleast_2d(np.asarray(A, dtype=float)) for A in mats]
    if mats[0].shape != (2, 2):
        raise ValueError("simultaneous triangularization is implemented for d = 2 only")
    if tol is None:
        tol = struct_tol(mats)
    rng = np.random.default_rng(_COMBO_SEED)
    G = sum(c * A for c, A in zip(rng.standard_normal(len(mats)), mats))
    candidates = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    for A in [*mats, G]:
        candidates.extend(_real_eigvecs_2x2(A, tol))
    for v in candidates:
        if not _is_common_eigvec(v, mats, tol):
            continue
        v = _normalize_columns(v[:, None])[:, 0]
        P_inv = np.column_stack([v, [-v[1], v[0]]])
        P = np.linalg.inv(P_inv)
        raw = [P @ A @ P_inv for A in mats]
        residual = max(abs(U[1, 0]) for U in raw)
        if residual > tol:
            continue
        transformed = [np.triu(U) for U in raw]
        return StructureDecomposition(
            StructureKind.SIM_TRIANGULARIZABLE_2D, P, P_inv, transformed, float(residual), tol
        )
    raise NoCommonRealEigenvector("coefficient matrices share no real eigenvector")


def classify(mats, tol: float | None = None) -> StructureDecomposition:
    """Most specific decomposition available: diagonal, sim. diagonal, 2-d triangular, or general."""
    mats = [np.atleast_2d(np.asarray(A, dtype=float)) for A in mats]
    if tol is None:
        tol = struct_tol(mats)
    d = mats[0].shape[0]
    reasons = []
    try:
        return simultaneous_diagonalize(mats, tol)
    except StructureError as exc:
        reasons.append(f"{type(exc).__name__}: {exc}")
    if d == 2:
        try:
            return simultaneous_triangularize_2d(mats, tol)
        except StructureError as exc:
            reasons.append(f"{type(exc).__name__}: {exc}")
    eye = np.eye(d)
    return StructureDecomposition(
        StructureKind.GENERAL, eye, eye.copy(), [m.copy() for m in mats], 0.0, tol, detail="; ".join(reasons)
    )


def classify_spec(spec) -> StructureDecomposition:
    """Classify a model; only q = 1 models can have a non-General structure."""
    if spec.q != 1:
        eye = np.eye(spec.dq)
        return StructureDecomposition(
            StructureKind.GENERAL, eye, eye.copy(), [], 0.0, struct_tol(spec.A.reshape(-1, spec.d, spec.d)),
            detail="order q > 1: structure results apply to q = 1 only",
        )
    return classify(spec.lag_matrices(1))
