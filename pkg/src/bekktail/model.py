"""BEKK-ARCH(q,0,l) models and their companion-form SRE templates.

A model is

    X_t = H_t^{1/2} Z_t,   H_t = C + sum_{i<=q} sum_{j<=l} A_ij X_{t-i} X_{t-i}' A_ij',

with Gaussian Z_t.  Stacking V_t = (X_t', ..., X_{t-q+1}')' gives the random
coefficient recursion V_t = M_t V_{t-1} + Q_t where the top block row of M_t is
(M_1t, ..., M_qt), M_it = sum_j m_ijt A_ij with i.i.d. N(0,1) weights, the block
subdiagonal holds identities, and Q_t = (B_t', 0', ..., 0')' with B_t ~ N(0, C).
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import (
    AllZeroCoefficients,
    ConfigError,
    NotPositiveDefinite,
    ShapeMismatch,
)


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Full parameterization of a BEKK-ARCH(q,0,l) model.

    ``A`` has shape ``(q, l, d, d)``; ``A[i - 1, j - 1]`` is the matrix A_ij.
    Instances are only guaranteed well formed after :func:`validate_spec`.
    """

    d: int
    q: int
    l: int
    C: np.ndarray
    A: np.ndarray

    @property
    def dq(self) -> int:
        return self.d * self.q

    def lag_matrices(self, lag: int = 1) -> list[np.ndarray]:
        """The l matrices A_{lag,1}, ..., A_{lag,l}."""
        return [self.A[lag - 1, j] for j in range(self.l)]

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "q": self.q,
            "l": self.l,
            "C": np.asarray(self.C).tolist(),
            "A": [
                {"lag": i + 1, "index": j + 1, "matrix": np.asarray(self.A[i, j]).tolist()}
                for i in range(self.q)
                for j in range(self.l)
            ],
        }

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form; used to tag simulation output."""
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def scaled(self, s: float) -> "ModelSpec":
        """Same model with every A_ij multiplied by ``s``."""
        return validate_spec(ModelSpec(self.d, self.q, self.l, self.C, s * np.asarray(self.A)))


def make_spec(C, A) -> ModelSpec:
    """Build and validate a spec from C and a nested ``[lag][index]`` list of matrices.

    A bare list of d x d matrices is read as the l matrices of a q = 1 model.
    """
    A = np.asarray(A, dtype=float)
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if A.ndim == 3:
        A = A[None]
    if A.ndim != 4:
        raise ShapeMismatch(f"A must have shape (q, l, d, d) or (l, d, d), got {A.shape}")
    q, l, d = A.shape[0], A.shape[1], A.shape[2]
    return validate_spec(ModelSpec(d=d, q=q, l=l, C=C, A=A))


def validate_spec(raw: ModelSpec) -> ModelSpec:
    """Check well-formedness and return a canonical copy (float64, C symmetrized)."""
    d, q, l = int(raw.d), int(raw.q), int(raw.l)
    if min(d, q, l) < 1:
        raise ShapeMismatch(f"d, q, l must be positive, got d={d}, q={q}, l={l}")
    C = np.asarray(raw.C, dtype=float)
    A = np.asarray(raw.A, dtype=float)
    if C.shape != (d, d):
        raise ShapeMismatch(f"C must be {d}x{d}, got {C.shape}")
    if A.shape != (q, l, d, d):
        raise ShapeMismatch(f"A must have shape {(q, l, d, d)}, got {A.shape}")
    if not (np.all(np.isfinite(C)) and np.all(np.isfinite(A))):
        raise ShapeMismatch("C and A must be finite")
    C = 0.5 * (C + C.T)
    try:
        np.linalg.cholesky(C)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(f"C is not positive definite (eigenvalues {np.linalg.eigvalsh(C)})") from None
    if not np.any(A):
        raise AllZeroCoefficients("every A_ij is zero")
    C.setflags(write=False)
    A = A.copy()
    A.setflags(write=False)
    return ModelSpec(d=d, q=q, l=l, C=C, A=A)


def _config_schema() -> dict:
    text = resources.files("bekktail").joinpath("data/config.schema.json").read_text()
    return json.loads(text)


def spec_from_dict(config: dict) -> ModelSpec:
    """Parse a config mapping (strict: unknown keys are rejected)."""
    import jsonschema

    try:
        jsonschema.validate(config, _config_schema())
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config schema violation: {exc.message}") from None
    d, q, l = config["d"], config["q"], config["l"]
    A = np.zeros((q, l, d, d))
    seen = set()
    for entry in config["A"]:
        i, j = entry["lag"], entry["index"]
        if not (1 <= i <= q and 1 <= j <= l):
            raise ShapeMismatch(f"A entry (lag={i}, index={j}) outside 1..{q} x 1..{l}")
        if (i, j) in seen:
            raise ShapeMismatch(f"duplicate A entry (lag={i}, index={j})")
        seen.add((i, j))
        mat = np.asarray(entry["matrix"], dtype=float)
        if mat.shape != (d, d):
            raise ShapeMismatch(f"A_{i}{j} must be {d}x{d}, got {mat.shape}")
        A[i - 1, j - 1] = mat
    if len(seen) != q * l:
        raise ShapeMismatch(f"expected {q * l} A entries, got {len(seen)}")
    C = np.asarray(config["C"], dtype=float)
    return validate_spec(ModelSpec(d=d, q=q, l=l, C=C, A=A))


def load_spec(path) -> ModelSpec:
    try:
        with open(path) as fh:
            config = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(config, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return spec_from_dict(config)


@dataclass(frozen=True, eq=False)
class RandomSlot:
    lag: int  # 1-based
    index: int  # 1-based
    placement: np.ndarray  # dq x dq, A_ij in top block row, block column lag


@dataclass(frozen=True, eq=False)
class CompanionTemplate:
    """Companion-form recipe: M = deterministic_part + sum_k m_k * slots[k].placement."""

    dim: int
    d: int
    q: int
    deterministic_part: np.ndarray
    random_slots: list[RandomSlot]
    noise_cov: np.ndarray
    chol: np.ndarray = field(repr=False)
    # kernel-friendly views of the slots, canonical order
    slot_matrices: np.ndarray = field(repr=False)
    slot_lags: np.ndarray = field(repr=False)

    @property
    def n_normals(self) -> int:
        """Standard normals consumed per step: q*l slot weights then d noise draws."""
        return len(self.random_slots) + self.d


def build_companion_template(spec: ModelSpec) -> CompanionTemplate:
    d, q, l = spec.d, spec.q, spec.l
    dq = d * q
    det = np.zeros((dq, dq))
    for i in range(1, q):
        det[i * d:(i + 1) * d, (i - 1) * d:i * d] = np.eye(d)
    slots = []
    mats = []
    lags = []
    # lag-major, then index
    for i in range(q):
        for j in range(l):
            placement = np.zeros((dq, dq))
            placement[:d, i * d:(i + 1) * d] = spec.A[i, j]
            slots.append(RandomSlot(lag=i + 1, index=j + 1, placement=placement))
            mats.append(spec.A[i, j])
            lags.append(i)
    noise = np.zeros((dq, dq))
    noise[:d, :d] = spec.C
    return CompanionTemplate(
        dim=dq,
        d=d,
        q=q,
        deterministic_part=det,
        random_slots=slots,
        noise_cov=noise,
        chol=np.linalg.cholesky(spec.C),
        slot_matrices=np.ascontiguousarray(mats, dtype=float),
        slot_lags=np.asarray(lags, dtype=np.int64),
    )


def one_step_covariance(spec: ModelSpec, state) -> np.ndarray:
    """Conditional covariance H_t given the stacked past (X_{t-1}', ..., X_{t-q}')'."""
    x = np.asarray(state, dtype=float).ravel()
    if x.size != spec.dq:
        raise ShapeMismatch(f"state must have length {spec.dq}, got {x.size}")
    blocks = x.reshape(spec.q, spec.d)
    H = np.array(spec.C, dtype=float)
    for i in range(spec.q):
        for j in range(spec.l):
            v = spec.A[i, j] @ blocks[i]
            H += np.outer(v, v)
    return H
