"""Finite-dimensional stress test of the averaged variational principle.

A model is a quadratic form Q (symmetric), an inner product given by an SPD
metric M, and a discrete family of trial vectors f_zeta with weights w_zeta.
With (omega_j, psi_j) the M-orthonormal generalized eigenpairs of (Q, M):

    sum_j (z - omega_j)_+ sum_zeta w_zeta <psi_j, f_zeta>_M^2
        >= sum_{zeta in m0} w_zeta (z <f, f>_M - Q(f, f))

for every z and every subset m0 of trial indices.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError
from .spectrum import BoundReport

SLACK = 1e-9


@dataclass(frozen=True)
class FiniteModel:
    form: np.ndarray
    metric: np.ndarray
    trials: np.ndarray   # shape (n_trials, dim)
    weights: np.ndarray
    m0: np.ndarray       # indices into trials

    def __post_init__(self):
        q = np.asarray(self.form, dtype=np.float64)
        m = np.asarray(self.metric, dtype=np.float64)
        f = np.atleast_2d(np.asarray(self.trials, dtype=np.float64))
        w = np.asarray(self.weights, dtype=np.float64)
        m0 = np.asarray(self.m0, dtype=np.int64).reshape(-1)
        n = q.shape[0]
        if q.shape != (n, n) or m.shape != (n, n):
            raise DomainError("form and metric must be square and of equal size")
        if not (np.allclose(q, q.T, rtol=0, atol=1e-12 * max(1.0, np.abs(q).max()))
                and np.allclose(m, m.T, rtol=0, atol=1e-12 * max(1.0, np.abs(m).max()))):
            raise DomainError("form and metric must be symmetric")
        if f.shape[1] != n or w.shape != (f.shape[0],):
            raise DomainError("trials must be (n_trials, dim) with one weight per trial")
        if np.any(w < 0):
            raise DomainError("weights must be non-negative")
        if m0.size and (m0.min() < 0 or m0.max() >= f.shape[0]):
            raise DomainError("m0 indices out of range")
        ev = np.linalg.eigvalsh(m)
        if ev[0] <= 1e-12 * max(1.0, ev[-1]):
            raise DomainError("metric is not positive definite")
        for name, val in (("form", q), ("metric", m), ("trials", f), ("weights", w), ("m0", m0)):
            object.__setattr__(self, name, val)

    @property
    def dim(self) -> int:
        return self.form.shape[0]


def solve_pairs(model: FiniteModel):
    """Generalized eigenpairs of (form, metric): ascending omegas, M-orthonormal columns."""
    try:
        w, v = scipy.linalg.eigh(model.form, model.metric)
    except np.linalg.LinAlgError as exc:
        raise DomainError(f"metric is not positive definite: {exc}") from None
    return w, v


def _sides(model: FiniteModel, omegas, psis, z):
    proj = psis.T @ model.metric @ model.trials.T          # (n_eig, n_trials)
    mass = (proj**2) @ model.weights                         # sum_zeta w |<psi_j, f>|^2
    lhs = math.fsum(np.clip(z - omegas, 0.0, None) * mass)
    f0 = model.trials[model.m0]
    w0 = model.weights[model.m0]
    norm = np.einsum("ij,jk,ik->i", f0, model.metric, f0)
    quad = np.einsum("ij,jk,ik->i", f0, model.form, f0)
    rhs = math.fsum(w0 * (z * norm - quad))
    fa = model.trials
    scale = math.fsum(model.weights * (abs(z) * np.einsum("ij,jk,ik->i", fa, model.metric, fa)
                                       + np.abs(np.einsum("ij,jk,ik->i", fa, model.form, fa))))
    return lhs, rhs, max(scale, 1e-300)


def avp_verify(model: FiniteModel, z: float, pairs=None, slack: float = SLACK) -> BoundReport:
    """lhs >= rhs - slack * scale, margin reported relative to scale."""
    omegas, psis = pairs if pairs is not None else solve_pairs(model)
    lhs, rhs, scale = _sides(model, omegas, psis, z)
    margin = (lhs - rhs) / scale
    return BoundReport("averaged_variational_principle", lhs, rhs, margin, margin >= -slack,
                       {"z": float(z), "dim": model.dim, "scale": scale})


def best_subset(model: FiniteModel, z: float) -> np.ndarray:
    """Indices with non-negative Rayleigh deficit z <f,f> - Q(f,f); maximises the rhs."""
    f = model.trials
    g = z * np.einsum("ij,jk,ik->i", f, model.metric, f) - np.einsum("ij,jk,ik->i", f, model.form, f)
    return np.flatnonzero(model.weights * g >= 0)


def random_model(rng: np.random.Generator, dim: int, n_trials: int | None = None,
                 shift: float = 0.0) -> FiniteModel:
    """form = A^T A + shift I, metric = B^T B + I, uniform(-1, 1) entries."""
    n_trials = dim if n_trials is None else n_trials
    a = rng.uniform(-1.0, 1.0, (dim, dim))
    b = rng.uniform(-1.0, 1.0, (dim, dim))
    form = a.T @ a + shift * np.eye(dim)
    metric = b.T @ b + np.eye(dim)
    trials = rng.uniform(-1.0, 1.0, (n_trials, dim))
    weights = rng.uniform(0.0, 1.0, n_trials)
    m0 = np.flatnonzero(rng.random(n_trials) < 0.5)
    return FiniteModel(form, metric, trials, weights, m0)


def _one(seed_seq, dim, n_trials):
    rng = np.random.default_rng(seed_seq)
    model = random_model(rng, dim, n_trials)
    omegas, psis = solve_pairs(model)
    z = rng.uniform(omegas[0], 2.0 * omegas[-1])
    return avp_verify(model, z, (omegas, psis))


def thread_count() -> int:
    env = os.environ.get("SPECBUCKLE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


@dataclass
class SuiteSummary:
    models: int
    failures: int
    worst_margin: float

    def as_dict(self):
        return {"models": self.models, "failures": self.failures, "worst_margin": self.worst_margin}


def run_suite(n_models: int = 1000, dim: int = 50, seed: int = 0, n_trials: int | None = None,
              threads: int | None = None) -> SuiteSummary:
    """Seeded batch of random models; each model gets its own spawned stream."""
    children = np.random.SeedSequence(seed).spawn(n_models)
    threads = threads or thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            reports = list(ex.map(lambda s: _one(s, dim, n_trials), children))
    else:
        reports = [_one(s, dim, n_trials) for s in children]
    failures = sum(not r.passed for r in reports)
    worst = min((r.margin for r in reports), default=math.inf)
    return SuiteSummary(n_models, failures, float(worst))
