"""Theoretical tail indexes and tail constants.

Closed-form Gaussian moment equations cover the simultaneously diagonalizable
and the 2-d triangularizable q = 1 cases; a Monte Carlo root of the spectral
functional covers general order q; Goldie's formula and the forward series of
the triangular case give tail constants.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import digamma, gammaln, logsumexp

from . import rng
from .errors import NoRoot, NoSignChange, NotApplicable, TieUndetermined
from .model import ModelSpec, build_companion_template, validate_spec
from .structure import StructureDecomposition, StructureKind

#: E[log|z|] for z ~ N(0, 1), equal to -(euler_gamma + log 2) / 2
E_LOG_ABS_NORMAL = -0.5 * (np.euler_gamma + math.log(2.0))
#: sigma at which E|sigma z|^alpha = 1 stops having a positive root
SIGMA_BOUNDARY = math.exp(-E_LOG_ABS_NORMAL)

ALPHA_MAX = 25.0
TIE_RTOL = 1e-6

_LOG_SQRT_PI = 0.5 * math.log(math.pi)


class TailMethod(str, enum.Enum):
    SIM_DIAG = "SimDiag"
    SIM_DIAG_REPEATED = "SimDiagRepeated"
    TRIANGULAR_2D = "Triangular2D"
    SPECTRAL_MC = "SpectralMC"
    UNDETERMINED = "Undetermined"


@dataclass
class ComponentTail:
    alpha: float | None
    method: TailMethod
    relevant_set: list[int] = field(default_factory=list)
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "alpha": _json_float(self.alpha),
            "method": self.method.value,
            "relevant_set": [j + 1 for j in self.relevant_set],
            "detail": self.detail,
        }


@dataclass
class TailConstants:
    c_plus: float | None = None
    c2: float | None = None
    c1_tilde: float | None = None
    w_s_series: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "c_plus": _json_float(self.c_plus),
            "c2": _json_float(self.c2),
            "c1_tilde": _json_float(self.c1_tilde),
            "w_s_series": [float(w) for w in self.w_s_series],
        }


@dataclass
class TailReport:
    per_component: list[ComponentTail]
    transformed_alphas: list[float | None] = field(default_factory=list)
    constants: TailConstants | None = None
    balance: tuple[float, float] = (0.5, 0.5)
    notes: list[str] = field(default_factory=list)

    @property
    def alphas(self) -> list[float | None]:
        return [c.alpha for c in self.per_component]

    def to_dict(self) -> dict:
        return {
            "per_component": [c.to_dict() for c in self.per_component],
            "transformed_alphas": [_json_float(a) for a in self.transformed_alphas],
            "constants": None if self.constants is None else self.constants.to_dict(),
            "balance": {"p": self.balance[0], "q": self.balance[1]},
            "notes": list(self.notes),
        }


def _json_float(x):
    if x is None or not math.isfinite(x):
        return None
    return float(x)


# ---------------------------------------------------------------------------
# Gaussian moment equation

def log_gaussian_abs_moment(alpha, sigma):
    """log E|sigma z|^alpha = alpha log sigma + (alpha/2) log 2 + lgamma((alpha+1)/2) - log(pi)/2."""
    alpha = np.asarray(alpha, dtype=float)
    return alpha * np.log(sigma) + 0.5 * alpha * math.log(2.0) + gammaln(0.5 * (alpha + 1.0)) - _LOG_SQRT_PI


def gaussian_abs_moment(alpha, sigma):
    """E|sigma z|^alpha for z ~ N(0, 1), evaluated in log space."""
    out = np.exp(log_gaussian_abs_moment(alpha, sigma))
    return float(out) if np.ndim(out) == 0 else out


def moment_log_derivative(alpha, sigma):
    """d/dalpha log E|sigma z|^alpha = log sigma + (log 2 + digamma((alpha+1)/2)) / 2.

    At a root of E|sigma z|^alpha = 1 this is m_alpha = E[|sigma z|^alpha log|sigma z|].
    """
    out = np.log(sigma) + 0.5 * (math.log(2.0) + digamma(0.5 * (np.asarray(alpha, dtype=float) + 1.0)))
    return float(out) if np.ndim(out) == 0 else out


def _bisect(f, lo, hi, max_iter=200):
    """Bisection to machine precision on a bracket with f(lo) < 0 < f(hi)."""
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo if abs(f(lo)) <= abs(f(hi)) else hi


def solve_component_tail_index(sigma: float) -> float:
    """Unique alpha > 0 with E|sigma z|^alpha = 1.

    alpha -> log E|sigma z|^alpha is strictly convex, vanishes at 0 with slope
    log sigma + E log|z|, and diverges; a positive root exists iff that slope is
    negative, i.e. sigma < SIGMA_BOUNDARY (about 1.8874).
    """
    sigma = float(sigma)
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if math.log(sigma) + E_LOG_ABS_NORMAL >= 0:
        raise NoRoot(f"sigma={sigma:.6g} >= {SIGMA_BOUNDARY:.6g}: E|sigma z|^alpha >= 1 for all alpha > 0")

    def f(a):
        return float(log_gaussian_abs_moment(a, sigma))

    def fprime(a):
        return moment_log_derivative(a, sigma)

    # the minimizer of f separates the trivial zero at 0 from the root
    hi = 1.0
    while fprime(hi) < 0:
        hi *= 2.0
    a_min = _bisect(fprime, 0.0, hi)
    lo = a_min
    if f(lo) >= 0:  # root and minimizer coincide to rounding (sigma at the boundary)
        return lo
    hi = max(2.0 * lo, 1.0)
    while f(hi) <= 0:
        hi *= 2.0
    return _bisect(f, lo, hi)


# ---------------------------------------------------------------------------
# closed-form tail indexes

def _row_sigmas(transformed: list[np.ndarray]) -> np.ndarray:
    diag = np.array([np.diag(U) for U in transformed])  # l x d
    return np.sqrt(np.sum(diag ** 2, axis=0))


def _solve_or_none(sigma):
    if sigma == 0:
        return math.inf, "degenerate multiplier (light Gaussian tail)"
    try:
        return solve_component_tail_index(sigma), ""
    except NoRoot as exc:
        return None, str(exc)


def tail_indexes_simdiag(spec: ModelSpec, dec: StructureDecomposition) -> TailReport:
    """Per-component indexes when P A_j P^{-1} = D_j are diagonal.

    Row i of Y = P X solves a scalar SRE with multiplier N(0, sigma_i^2),
    sigma_i^2 = sum_j D_{ii,j}^2.  X_i = sum_j P^{ij} Y_j takes the smallest
    index among rows with P^{ij} != 0 when it is attained once, or, for l = 1,
    when all minimizing rows share the same D_jj.
    """
    if dec.kind not in (StructureKind.ALREADY_DIAGONAL, StructureKind.SIM_DIAGONALIZABLE):
        raise ValueError(f"simultaneous-diagonal tail indexes need a diagonal decomposition, got {dec.kind.value}")
    sigmas = _row_sigmas(dec.transformed)
    solved = [_solve_or_none(s) for s in sigmas]
    alpha_y = [a for a, _ in solved]
    d1 = np.array([np.diag(D) for D in dec.transformed])  # l x d
    ptol = 1e-8 * (1.0 + np.max(np.abs(dec.P_inv)))
    out = []
    for i in range(spec.d):
        relevant = [j for j in range(spec.d) if abs(dec.P_inv[i, j]) > ptol]
        missing = [j for j in relevant if alpha_y[j] is None]
        if missing:
            out.append(ComponentTail(None, TailMethod.UNDETERMINED, relevant,
                                     "; ".join(f"row {j + 1}: {solved[j][1]}" for j in missing)))
            continue
        amin = min(alpha_y[j] for j in relevant)
        if math.isinf(amin):
            out.append(ComponentTail(None, TailMethod.UNDETERMINED, relevant, "all relevant rows have light tails"))
            continue
        argmin = [j for j in relevant if abs(alpha_y[j] - amin) <= 1e-9 * amin]
        if len(argmin) == 1:
            out.append(ComponentTail(amin, TailMethod.SIM_DIAG, relevant))
        elif spec.l == 1 and np.ptp(d1[0, argmin]) <= dec.tol:
            out.append(ComponentTail(amin, TailMethod.SIM_DIAG_REPEATED, relevant,
                                     f"minimum attained by rows {[j + 1 for j in argmin]} sharing one eigenvalue"))
        else:
            out.append(ComponentTail(None, TailMethod.UNDETERMINED, relevant,
                                     f"minimum attained by rows {[j + 1 for j in argmin]} with different coefficients"))
    return TailReport(per_component=out, transformed_alphas=alpha_y)


def triangular_sigmas(dec: StructureDecomposition) -> tuple[float, float]:
    s = _row_sigmas(dec.transformed)
    return float(s[0]), float(s[1])


def tail_indexes_triangular(spec: ModelSpec, dec: StructureDecomposition) -> TailReport:
    """Indexes for d = 2 when P A_j P^{-1} = U_j are upper triangular.

    Y_2 solves a scalar SRE with index alpha_2; Y_1 has index min(alpha_1, alpha_2).
    Equal diagonal indexes are refused, as is an X component mixing Y_1 and Y_2
    when both carry the same index alpha_2 < alpha_1 (they are dependent).
    """
    if dec.kind is not StructureKind.SIM_TRIANGULARIZABLE_2D or spec.d != 2:
        raise ValueError("triangular tail indexes need a d = 2 triangular decomposition")
    s1, s2 = triangular_sigmas(dec)
    if abs(s1 - s2) <= TIE_RTOL * max(s1, s2):
        raise TieUndetermined(
            f"diagonal multipliers have equal scale ({s1:.6g}); the alpha_1 = alpha_2 triangular case has no known tail result"
        )
    a1, a2 = solve_component_tail_index(s1), solve_component_tail_index(s2)
    alpha_y = [min(a1, a2), a2]
    ptol = 1e-8 * (1.0 + np.max(np.abs(dec.P_inv)))
    out = []
    for i in range(2):
        relevant = [k for k in range(2) if abs(dec.P_inv[i, k]) > ptol]
        if len(relevant) == 2 and a2 < a1:
            out.append(ComponentTail(
                None, TailMethod.UNDETERMINED, relevant,
                "dependent equal-index Y components: both transformed components carry index "
                f"alpha_2={a2:.6g} and are dependent, so no available result fixes the index of their combination",
            ))
        else:
            out.append(ComponentTail(min(alpha_y[k] for k in relevant), TailMethod.TRIANGULAR_2D, relevant))
    notes = [f"diagonal indexes alpha_1={a1:.10g}, alpha_2={a2:.10g}"]
    return TailReport(per_component=out, transformed_alphas=alpha_y, notes=notes)


# ---------------------------------------------------------------------------
# spectral functional root (general order q)

@dataclass
class SpectralTailResult:
    alpha: float
    by_horizon: dict[int, float]
    low_precision: bool
    min_ess: float
    walkers: int


class _TiltedPopulation:
    """Resampled population of directions for Lambda_n(alpha) = (1/n) log E|M_n...M_1 u|^alpha.

    Each step multiplies every walker by a fresh random companion matrix, averages the
    weights |M u|^alpha, renormalizes and resamples systematically.  The running product of
    the averaged weights is an unbiased estimate of E|M_n...M_1 u_0|^alpha, whose growth rate
    equals that of E||M_1...M_n||^alpha.  All randomness is drawn once, so every alpha is
    evaluated on common random numbers.
    """

    def __init__(self, spec: ModelSpec, n_max: int, walkers: int, seed: int):
        tpl = build_companion_template(spec)
        self.A, self.lags, self.d, self.dq = tpl.slot_matrices, tpl.slot_lags, tpl.d, tpl.dim
        gen = rng.stream(seed, rng.SPECTRAL, walkers)
        self.z = rng.normals(gen, (n_max, walkers, len(self.lags)))
        u0 = rng.normals(gen, (walkers, self.dq))
        self.u0 = u0 / np.linalg.norm(u0, axis=1, keepdims=True)
        self.offsets = rng.uniforms(gen, (n_max,))
        self.walkers = walkers

    def run(self, alpha: float, n: int, record=()) -> tuple[dict[int, float], float]:
        N, d, dq = self.walkers, self.d, self.dq
        u = self.u0.copy()
        acc, min_ess, out = 0.0, float(N), {}
        grid = (np.arange(N) + 0.0) / N
        for t in range(n):
            top = np.zeros((N, d))
            for k in range(len(self.lags)):
                off = self.lags[k] * d
                top += self.z[t, :, k, None] * (u[:, off:off + d] @ self.A[k].T)
            v = np.concatenate([top, u[:, :dq - d]], axis=1)
            r = np.linalg.norm(v, axis=1)
            with np.errstate(divide="ignore"):
                logw = alpha * np.log(r)
            lse = logsumexp(logw)
            acc += lse - math.log(N)
            w = np.exp(logw - lse)
            min_ess = min(min_ess, 1.0 / float(np.sum(w * w)))
            safe = np.where(r > 0, r, 1.0)
            u = v / safe[:, None]
            cdf = np.cumsum(w)
            cdf[-1] = 1.0
            idx = np.searchsorted(cdf, grid + self.offsets[t] / N, side="right")
            u = u[np.minimum(idx, N - 1)]
            if t + 1 in record:
                out[t + 1] = acc / (t + 1)
        out[n] = acc / n
        return out, min_ess


def _spectral_root(pop: _TiltedPopulation, n: int, alpha_max: float, rtol: float) -> tuple[float, float]:
    def lam(a):
        return pop.run(a, n)[0][n]

    grid = [0.01 * 2 ** k for k in range(12) if 0.01 * 2 ** k < alpha_max] + [alpha_max]
    lo = None
    prev = 0.0
    for a in grid:
        val = lam(a)
        if val < 0:
            prev = a
            lo = a
        elif lo is not None:
            hi = a
            break
    else:
        raise NoSignChange(f"Lambda_{n}(alpha) has no sign change in (0, {alpha_max}]")
    if lo is None:
        raise NoSignChange(f"Lambda_{n}(alpha) >= 0 already at alpha={grid[0]}: not stationary or root below grid")
    lo = prev
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if lam(mid) < 0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    return root, pop.run(root, n)[1]


def solve_spectral_tail_index(spec: ModelSpec, n_horizon: int = 200, replicas: int = 2000, seed: int = 0,
                              horizons=(50, 100, 200), alpha_max: float = ALPHA_MAX,
                              rtol: float = 1e-4) -> SpectralTailResult:
    """Root in alpha of the spectral functional Lambda_n(alpha) for n in ``horizons``.

    The reported index is the root at the largest horizon ``n_horizon``; the roots at
    shorter horizons are a convergence diagnostic.  ``replicas`` is the population size.
    When the per-step effective sample size drops below 100 the population is doubled
    (twice at most) and the result is flagged ``low_precision`` if that does not help.
    """
    horizons = sorted({int(h) for h in horizons if h <= n_horizon} | {int(n_horizon)})
    walkers = int(replicas)
    for attempt in range(3):
        pop = _TiltedPopulation(spec, n_horizon, walkers, seed)
        by_h = {}
        ess = float(walkers)
        for n in horizons:
            root, e = _spectral_root(pop, n, alpha_max, rtol)
            by_h[n] = root
            ess = min(ess, e)
        if ess >= 100 or attempt == 2:
            break
        walkers *= 2
    return SpectralTailResult(alpha=by_h[n_horizon], by_horizon=by_h, low_precision=ess < 100,
                              min_ess=ess, walkers=walkers)


# ---------------------------------------------------------------------------
# tail constants

@dataclass(frozen=True)
class ScalarSRE:
    """X_t = A_t X_{t-1} + B_t with A_t ~ N(0, sigma_a^2), B_t ~ N(0, sigma_b^2) independent."""

    sigma_a: float
    sigma_b: float

    @classmethod
    def from_spec(cls, spec: ModelSpec) -> "ScalarSRE":
        if spec.d != 1 or spec.q != 1:
            raise NotApplicable("a scalar SRE needs d = q = 1")
        return cls(float(np.sqrt(np.sum(spec.A ** 2))), float(np.sqrt(spec.C[0, 0])))

    def to_spec(self) -> ModelSpec:
        return validate_spec(ModelSpec(d=1, q=1, l=1, C=np.array([[self.sigma_b ** 2]]),
                                       A=np.array([[[[self.sigma_a]]]])))


@dataclass
class GoldieEstimate:
    c_plus: float
    stderr: float
    m_alpha: float
    n_mc: int
    flags: list[str] = field(default_factory=list)


def goldie_constant(sre, alpha: float, n_mc: int = 1_000_000, seed: int = 0, *, m_alpha: float | None = None,
                    burn_in: int = 10_000, replicas: int = 1000, backend: str | None = None) -> GoldieEstimate:
    """c_+ = E[|AX + B|^alpha - |AX|^alpha] / (2 alpha m_alpha) by Monte Carlo.

    X are stationary draws from an ensemble simulation, (A, B) fresh independent
    coefficient draws.  ``sre`` is a :class:`ScalarSRE` or a d = q = 1 model.
    """
    from .simulate import SimConfig, simulate_ensemble

    if isinstance(sre, ModelSpec):
        sre = ScalarSRE.from_spec(sre)
    if m_alpha is None:
        if sre.sigma_a <= 0:
            raise ValueError("m_alpha must be supplied when the multiplier is degenerate")
        m_alpha = moment_log_derivative(alpha, sre.sigma_a)
    if sre.sigma_a > 0:
        sim = SimConfig(seed=seed, burn_in=burn_in, n_samples=n_mc, replicas=min(replicas, n_mc))
        X = simulate_ensemble(sre.to_spec(), sim, backend=backend).samples[:, 0]
    else:
        X = sre.sigma_b * rng.normals(rng.stream(seed, rng.GOLDIE, 1), (n_mc,))
    gen = rng.stream(seed, rng.GOLDIE, 0)
    total = total_sq = 0.0
    for start in range(0, n_mc, 1_000_000):
        x = X[start:start + 1_000_000]
        z = rng.normals(gen, (x.size, 2))
        ax = sre.sigma_a * z[:, 0] * x
        term = np.abs(ax + sre.sigma_b * z[:, 1]) ** alpha - np.abs(ax) ** alpha
        total += float(np.sum(term))
        total_sq += float(np.sum(term * term))
    mean = total / n_mc
    var = max(total_sq / n_mc - mean * mean, 0.0)
    scale = 1.0 / (2.0 * alpha * m_alpha)
    est = GoldieEstimate(c_plus=scale * mean, stderr=abs(scale) * math.sqrt(var / n_mc), m_alpha=m_alpha, n_mc=n_mc)
    if est.c_plus <= 0:
        est.flags.append("NonPositiveEstimate")
    return est


@dataclass
class ForwardConstants:
    w_s: list[float]
    w_s_stderr: list[float]
    c2: float
    c2_stderr: float
    c1_tilde: float
    plateau: bool
    envelope: float
    alpha1: float
    alpha2: float
    notes: list[str] = field(default_factory=list)


def forward_series(dec: StructureDecomposition, alpha2: float, s_max: int = 30, n_mc: int = 200_000,
                   seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """w_s = E|sum_{i<=s} Pi^(1)_{0,2-i} M_12,1-i Pi^(2)_{-i,1-s}|^alpha2 for s = 1..s_max.

    Writing the sum as (prod of the s-1 M_22 factors at times -1..1-s) * S_s and using
    E|M_22|^alpha2 = 1, the expectation equals E_Q|S_s|^alpha2 where under Q the draws at
    times -1..1-s are tilted by |M_22|^alpha2 and
    S_s = M_12,0 + sum_{i=2}^s (prod_{t=2-i}^{0} M_11,t / prod_{t=2-i}^{-1} M_22,t) M_12,1-i / M_22,1-i.
    Under Q the summands decay geometrically (E_Q|M_11/M_22|^alpha2 = E|M_11|^alpha2 < 1), so
    one set of draws serves every s.
    """
    U = np.array(dec.transformed)
    u11, u12, u22 = U[:, 0, 0], U[:, 0, 1], U[:, 1, 1]
    norm22 = float(np.linalg.norm(u22))
    e = u22 / norm22
    gen = rng.stream(seed, rng.FORWARD, 0)
    m0 = rng.normals(gen, (n_mc, len(u11)))
    S = m0 @ u12
    F = m0 @ u11
    w = [float(np.mean(np.abs(S) ** alpha2))]
    se = [float(np.std(np.abs(S) ** alpha2) / math.sqrt(n_mc))]
    for _ in range(2, s_max + 1):
        xi = rng.normals(gen, (n_mc, len(u11)))
        # |g| ~ chi with alpha2 + 1 degrees of freedom: N(0,1) tilted by |g|^alpha2
        g = np.sqrt(gen.gamma(0.5 * (alpha2 + 1.0), 2.0, size=n_mc))
        g *= np.where(rng.uniforms(gen, (n_mc,)) < 0.5, -1.0, 1.0)
        m = xi - np.outer(xi @ e, e) + np.outer(g, e)
        m22 = m @ u22
        S = S + F * (m @ u12) / m22
        F = F * (m @ u11) / m22
        vals = np.abs(S) ** alpha2
        w.append(float(np.mean(vals)))
        se.append(float(np.std(vals) / math.sqrt(n_mc)))
    return np.array(w), np.array(se)


def forward_envelope(dec: StructureDecomposition, alpha2: float) -> float:
    """Upper bound on sup_s w_s from E|M_11|^alpha2 < 1 and E|M_12|^alpha2 (subadditivity / Minkowski)."""
    U = np.array(dec.transformed)
    s11 = float(np.linalg.norm(U[:, 0, 0]))
    s12 = float(np.linalg.norm(U[:, 0, 1]))
    if s12 == 0:
        return 0.0
    qq = gaussian_abs_moment(alpha2, s11) if s11 > 0 else 0.0
    e12 = gaussian_abs_moment(alpha2, s12)
    if alpha2 <= 1:
        return e12 / (1.0 - qq)
    return (e12 ** (1 / alpha2) / (1.0 - qq ** (1 / alpha2))) ** alpha2


def plateau_reached(w, window: int = 5, rtol: float = 0.01) -> bool:
    w = np.asarray(w, dtype=float)
    if w.size < window + 1:
        return False
    tail = w[-(window + 1):]
    if np.all(tail == 0):
        return True
    rel = np.abs(np.diff(tail)) / np.maximum(np.abs(tail[1:]), 1e-300)
    return bool(np.all(rel < rtol))


def forward_constant_triangular(spec: ModelSpec, dec: StructureDecomposition, alpha2: float | None = None,
                                s_max: int = 30, n_mc: int = 200_000, seed: int = 0,
                                c2_n_mc: int = 1_000_000, backend: str | None = None) -> ForwardConstants:
    """Tail constant of Y_1 in the triangular case alpha_1 > alpha_2: c~_1 = c_2 lim_s w_s.

    c_2 is Goldie's constant of the autonomous SRE Y_2,t = M_22,t Y_2,t-1 + Q~_2,t.
    """
    s1, s2 = triangular_sigmas(dec)
    a1 = solve_component_tail_index(s1) if s1 > 0 else math.inf
    a2 = solve_component_tail_index(s2) if alpha2 is None else float(alpha2)
    if not a1 > a2:
        raise NotApplicable(f"forward constant needs alpha_1 > alpha_2 (got {a1:.6g} <= {a2:.6g})")
    w, se = forward_series(dec, a2, s_max=s_max, n_mc=n_mc, seed=seed)
    noise = dec.P @ spec.C @ dec.P.T
    c2 = goldie_constant(ScalarSRE(s2, float(np.sqrt(noise[1, 1]))), a2, n_mc=c2_n_mc, seed=seed, backend=backend)
    notes = [
        "w_s uses exponent alpha_2 (the limit derived for alpha_1 > alpha_2); a display with alpha_1 gives a different number",
        "c_2 uses M_22 in both terms of Goldie's formula",
    ]
    return ForwardConstants(
        w_s=w.tolist(), w_s_stderr=se.tolist(), c2=c2.c_plus, c2_stderr=c2.stderr, c1_tilde=c2.c_plus * float(w[-1]),
        plateau=plateau_reached(w), envelope=forward_envelope(dec, a2), alpha1=a1, alpha2=a2, notes=notes,
    )


# ---------------------------------------------------------------------------
# dispatcher

def _undetermined(d: int, detail: str) -> TailReport:
    return TailReport(per_component=[ComponentTail(None, TailMethod.UNDETERMINED, [], detail) for _ in range(d)])


def tail_theory(spec: ModelSpec, dec: StructureDecomposition, seed: int = 0, constants: bool = True,
                spectral_replicas: int = 2000, spectral_horizon: int = 200, goldie_n_mc: int = 1_000_000,
                forward_n_mc: int = 200_000, backend: str | None = None) -> TailReport:
    """Route a validated spec to the applicable tail result.

    q = 1 with jointly diagonal coefficients uses the closed-form diagonal rule, d = 2
    triangular coefficients the triangular rule, everything else the spectral root shared
    by all components.  Constants: Goldie's c_+ for scalar models and c_2, c~_1, w_s for
    the triangular case with alpha_1 > alpha_2.
    """
    if spec.q == 1 and dec.kind in (StructureKind.ALREADY_DIAGONAL, StructureKind.SIM_DIAGONALIZABLE):
        report = tail_indexes_simdiag(spec, dec)
        a = report.per_component[0].alpha
        if constants and spec.d == 1 and a is not None and math.isfinite(a):
            g = goldie_constant(spec, a, n_mc=goldie_n_mc, seed=seed, backend=backend)
            report.constants = TailConstants(c_plus=g.c_plus)
            report.notes.append(f"c_plus Monte Carlo standard error {g.stderr:.3g}")
            report.notes.extend(g.flags)
        return report
    if spec.q == 1 and dec.kind is StructureKind.SIM_TRIANGULARIZABLE_2D:
        try:
            report = tail_indexes_triangular(spec, dec)
        except (TieUndetermined, NoRoot) as exc:
            return _undetermined(spec.d, str(exc))
        if constants:
            try:
                fc = forward_constant_triangular(spec, dec, n_mc=forward_n_mc, seed=seed,
                                                 c2_n_mc=goldie_n_mc, backend=backend)
            except NotApplicable as exc:
                report.notes.append(f"forward constant not computed: {exc}")
            else:
                report.constants = TailConstants(c2=fc.c2, c1_tilde=fc.c1_tilde, w_s_series=fc.w_s)
                report.notes.append(f"w_s plateau reached: {fc.plateau}; closed-form envelope {fc.envelope:.6g}")
                report.notes.extend(fc.notes)
        return report
    try:
        res = solve_spectral_tail_index(spec, n_horizon=spectral_horizon, replicas=spectral_replicas, seed=seed)
    except NoSignChange as exc:
        return _undetermined(spec.d, str(exc))
    detail = "root of the spectral functional; " + ", ".join(
        f"n={n}: {a:.6g}" for n, a in sorted(res.by_horizon.items()))
    if res.low_precision:
        detail += f"; LowPrecision (min effective sample size {res.min_ess:.0f})"
    report = TailReport(
        per_component=[ComponentTail(res.alpha, TailMethod.SPECTRAL_MC, list(range(spec.d)), detail)
                       for _ in range(spec.d)],
    )
    report.notes.append("the index applies to |V_t| and to every linear combination with a nonzero limit constant")
    return report
