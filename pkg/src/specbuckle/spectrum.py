"""Shared value types: problem kinds, multiplicity-weighted spectra, check reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError, EnumerationRangeError, InsufficientSpectrumError


class Kind(str, Enum):
    BUCKLING = "buckling"
    LAPLACIAN = "laplacian"
    BILAPLACIAN = "bilaplacian"

    @classmethod
    def parse(cls, s) -> "Kind":
        if isinstance(s, Kind):
            return s
        key = str(s).strip().lower()
        aliases = {"dirichletlaplacian": "laplacian", "dirichlet": "laplacian",
                   "dirichletbilaplacian": "bilaplacian", "clamped": "bilaplacian"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown problem kind {s!r}") from None


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with integer multiplicities.

    The multiplicity-expanded sequence sigma_1 <= sigma_2 <= ... is never
    materialised; index arithmetic goes through prefix sums.  ``z_max`` is the
    enumeration ceiling: every eigenvalue below it is present.
    """

    values: np.ndarray
    mults: np.ndarray
    z_max: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        m = np.ascontiguousarray(self.mults, dtype=np.int64)
        if v.shape != m.shape or v.ndim != 1:
            raise DomainError("values and mults must be 1-d arrays of equal length")
        if v.size and (np.any(np.diff(v) < 0) or v[0] <= 0):
            raise DomainError("values must be positive and ascending")
        if np.any(m < 1):
            raise DomainError("multiplicities must be >= 1")
        if v.size and v[-1] >= self.z_max:
            raise DomainError("all values must lie below z_max")
        v.setflags(write=False)
        m.setflags(write=False)
        cum = np.concatenate([[0], np.cumsum(m)])
        wsum = np.concatenate([[0.0], np.cumsum(v * m)])
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "mults", m)
        object.__setattr__(self, "_cum", cum)
        object.__setattr__(self, "_wsum", wsum)

    @classmethod
    def from_sequence(cls, seq, z_max: float, **meta) -> "Spectrum":
        """Build from an ascending list with repeats (equal values are merged)."""
        seq = np.asarray(seq, dtype=np.float64)
        if seq.size == 0:
            return cls(seq, np.zeros(0, dtype=np.int64), z_max, meta)
        vals, counts = np.unique(seq, return_counts=True)
        return cls(vals, counts, z_max, meta)

    @property
    def total(self) -> int:
        """Length of the multiplicity-expanded sequence."""
        return int(self._cum[-1])

    def __len__(self):
        return self.total

    def _check_z(self, z):
        if np.any(np.asarray(z) > self.z_max):
            raise EnumerationRangeError(f"query z={np.max(z)!r} beyond enumeration ceiling {self.z_max!r}")

    def count_below(self, z):
        """N(z): eigenvalues strictly below z, with multiplicity."""
        self._check_z(z)
        idx = np.searchsorted(self.values, z, side="left")
        out = self._cum[idx]
        return int(out) if np.ndim(out) == 0 else out

    def value(self, j):
        """sigma_j of the expanded sequence, j 1-based."""
        j = np.asarray(j)
        if np.any(j < 1) or np.any(j > self.total):
            raise InsufficientSpectrumError(f"index out of range 1..{self.total}")
        out = self.values[np.searchsorted(self._cum, j, side="left") - 1]
        return float(out) if out.ndim == 0 else out

    def head(self, k: int) -> np.ndarray:
        """First k entries of the expanded sequence (materialised)."""
        if k > self.total:
            raise InsufficientSpectrumError(f"need {k} eigenvalues, have {self.total}")
        return self.value(np.arange(1, k + 1)) if k else np.empty(0)

    def partial_sum(self, k):
        """sum_{j<=k} sigma_j; k may be fractional (linear in the last slot)."""
        k = np.asarray(k, dtype=np.float64)
        if np.any(k < 0) or np.any(k > self.total):
            raise InsufficientSpectrumError(f"partial sum index out of range 0..{self.total}")
        kf = np.floor(k).astype(np.int64)
        # cum[i] <= kf < cum[i + 1], so sigma_{kf+1} is entry i
        i = np.searchsorted(self._cum, kf, side="right") - 1
        vals = np.append(self.values, 0.0)
        out = self._wsum[i] + (k - self._cum[i]) * vals[i]
        return float(out) if out.ndim == 0 else out

    def restrict(self, z_max: float) -> "Spectrum":
        """Sub-spectrum with ceiling z_max (must not exceed the current one)."""
        self._check_z(z_max)
        n = np.searchsorted(self.values, z_max, side="left")
        return Spectrum(self.values[:n], self.mults[:n], z_max, dict(self.meta))

    def scaled(self, factor: float) -> "Spectrum":
        return Spectrum(self.values * factor, self.mults, self.z_max * factor, dict(self.meta))


@dataclass
class BoundReport:
    """Outcome of one inequality check; margin > 0 means it holds with room."""

    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    params: dict = field(default_factory=dict)
    parts: list = field(default_factory=list)

    def as_dict(self) -> dict:
        d = {"name": self.name, "params": self.params, "lhs": self.lhs, "rhs": self.rhs,
             "margin": self.margin, "pass": bool(self.passed)}
        if self.parts:
            d["parts"] = [p.as_dict() for p in self.parts]
        return d

    def __bool__(self):
        return bool(self.passed)


def leq_report(name, lhs, rhs, strict=False, slack=0.0, **params) -> BoundReport:
    """Report for lhs <= rhs (or lhs < rhs when strict), margin = rhs - lhs."""
    lhs, rhs = float(lhs), float(rhs)
    margin = rhs - lhs
    ok = margin >= -slack if not strict else margin > 0
    if math.isnan(margin):
        ok = False
    return BoundReport(name, lhs, rhs, margin, bool(ok), params)


def geq_report(name, lhs, rhs, strict=False, slack=0.0, **params) -> BoundReport:
    """Report for lhs >= rhs, margin = lhs - rhs."""
    lhs, rhs = float(lhs), float(rhs)
    margin = lhs - rhs
    ok = margin >= -slack if not strict else margin > 0
    if math.isnan(margin):
        ok = False
    return BoundReport(name, lhs, rhs, margin, bool(ok), params)
