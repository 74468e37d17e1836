"""Simulation of the stacked SRE V_t = M_t V_{t-1} + Q_t."""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import rng
from .errors import SimulationOverflow
from .kernels import get_backend
from .model import CompanionTemplate, ModelSpec, build_companion_template

OVERFLOW_LIMIT = 1e300
_CHUNK_STEPS = 4096
_CHUNK_DOUBLES = 4_000_000


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    burn_in: int = 10_000
    n_samples: int = 100_000
    replicas: int = 1
    thinning: int = 1

    def __post_init__(self):
        if self.burn_in < 1 or self.n_samples < 1 or self.replicas < 1 or self.thinning < 1:
            raise ValueError(f"burn_in, n_samples, replicas and thinning must be >= 1: {self}")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True, eq=False)
class SimBatch:
    samples: np.ndarray  # n_samples x dq, replica-major
    spec_hash: str
    config: SimConfig
    wall_time: float

    @property
    def X(self) -> np.ndarray:
        """The current-observation block X_t (first d coordinates are stored first)."""
        return self.samples

    def to_csv(self, path) -> None:
        write_states_csv(path, self.samples)


def coefficients_from_normals(template: CompanionTemplate, normals) -> tuple[np.ndarray, np.ndarray]:
    """Map standard normals (..., q*l + d) to companion coefficients (M, Q).

    The first q*l entries weight the random slots in canonical order, the last d
    are turned into B ~ N(0, C) through the Cholesky factor of C.
    """
    z = np.asarray(normals, dtype=float)
    K = len(template.random_slots)
    if z.shape[-1] != K + template.d:
        raise ValueError(f"expected {K + template.d} normals per draw, got {z.shape[-1]}")
    placements = np.stack([s.placement for s in template.random_slots])
    M = template.deterministic_part + np.tensordot(z[..., :K], placements, axes=(-1, 0))
    Q = np.zeros(z.shape[:-1] + (template.dim,))
    Q[..., :template.d] = z[..., K:] @ template.chol.T
    return M, Q


def draw_coefficients(template: CompanionTemplate, gen: np.random.Generator | None = None, normals=None):
    """One draw of (M_t, Q_t).  ``normals`` overrides the generator (test hook)."""
    if normals is None:
        normals = rng.normals(gen, (template.n_normals,))
    return coefficients_from_normals(template, normals)


def _replica_counts(n_samples: int, replicas: int) -> np.ndarray:
    base, extra = divmod(n_samples, replicas)
    counts = np.full(replicas, base, dtype=np.int64)
    counts[:extra] += 1
    return counts


def _run_group(template, sim: SimConfig, indices, n_keep: int, out: np.ndarray, backend) -> None:
    """Simulate replicas ``indices`` (all keeping ``n_keep`` draws) into ``out`` (len(indices), n_keep, dq)."""
    K = len(template.random_slots)
    width = K + template.d
    gens = [rng.stream(sim.seed, rng.SIMULATION, r) for r in indices]
    state = np.zeros((len(indices), template.dim))
    total = sim.burn_in + sim.thinning * n_keep
    done = 0
    while done < total:
        T = min(_CHUNK_STEPS, total - done)
        z = np.empty((len(indices), T, width))
        for i, g in enumerate(gens):
            z[i] = rng.normals(g, (T, width))
        steps = np.arange(done + 1, done + T + 1) - sim.burn_in
        record = np.where((steps > 0) & (steps % sim.thinning == 0), steps // sim.thinning - 1, -1).astype(np.int64)
        bad_r, bad_t = backend.sre_chunk(
            template.slot_matrices, template.slot_lags, template.chol, z, state, out, record, OVERFLOW_LIMIT
        )
        if bad_r >= 0:
            raise SimulationOverflow(step=done + bad_t + 1, replica=indices[bad_r])
        done += T


def simulate_ensemble(spec: ModelSpec, sim: SimConfig, workers: int = 1, backend: str | None = None) -> SimBatch:
    """Independent trajectories from V_0 = 0, each burned in and contributing n_samples/replicas draws.

    Replica r draws from its own stream keyed by (seed, r); rows are ordered by
    replica index.  Stationarity is not re-checked here.
    """
    t0 = time.perf_counter()
    kern = get_backend(backend)
    template = build_companion_template(spec)
    counts = _replica_counts(sim.n_samples, sim.replicas)
    offsets = np.concatenate([[0], np.cumsum(counts)])
    samples = np.empty((sim.n_samples, template.dim))

    jobs = []
    for n_keep in np.unique(counts):
        if n_keep == 0:
            continue
        members = np.flatnonzero(counts == n_keep)
        per_batch = max(1, _CHUNK_DOUBLES // (min(_CHUNK_STEPS, sim.burn_in + sim.thinning * n_keep)
                                             * (template.n_normals + 2 * template.dim)))
        for start in range(0, members.size, per_batch):
            jobs.append((members[start:start + per_batch], int(n_keep)))

    def run(job):
        idx, n_keep = job
        buf = np.empty((idx.size, n_keep, template.dim))
        _run_group(template, sim, [int(i) for i in idx], n_keep, buf, kern)
        # replicas within a job are contiguous
        samples[offsets[idx[0]]:offsets[idx[-1] + 1]] = buf.reshape(-1, template.dim)

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, jobs))
    else:
        for job in jobs:
            run(job)
    return SimBatch(samples=samples, spec_hash=spec.digest(), config=sim, wall_time=time.perf_counter() - t0)


def simulate_path(spec: ModelSpec, sim: SimConfig, backend: str | None = None) -> SimBatch:
    """Single trajectory: burn in, then record n_samples (thinned) states."""
    single = SimConfig(**{**asdict(sim), "replicas": 1})
    return simulate_ensemble(spec, single, backend=backend)


def write_states_csv(path, samples: np.ndarray) -> None:
    samples = np.atleast_2d(samples)
    header = "t," + ",".join(f"v{i + 1}" for i in range(samples.shape[1]))
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for t, row in enumerate(samples):
            fh.write(f"{t}," + ",".join(f"{v:.17g}" for v in row) + "\n")
