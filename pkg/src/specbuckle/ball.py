"""Buckling and Dirichlet-Laplacian spectra of the unit ball in R^d.

Separation of variables gives radial eigenvalues indexed by angular momentum
l >= 0 and radial index n >= 1:

    buckling   sigma_{d,l,n}  = x_{l + d/2, n}^2
    Dirichlet  lambda_{d,l,n} = x_{l - 1 + d/2, n}^2

each with multiplicity M_{l,d} (dimension of degree-l spherical harmonics).
Both kinds read the same memoised zero tables, keyed by 2*nu, so
sigma_{d,l,n} and lambda_{d,l+1,n} are the same float.  A ball of radius R is
handled by dividing values by R^2 at the call site.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, RangeError, ResourceError
from .specfun import bessel_pair, default_cache, unit_ball_volume, gamma_half
from .specfun.zeros import ZeroCache
from .spectrum import Kind, Spectrum

_INT64_MAX = 2**63 - 1
DEFAULT_MODE_CAP = 20_000_000


def multiplicity(l: int, d: int) -> int:
    """M_{l,d} = C(l+d-1, d-1) - C(l+d-3, d-1), exact.

    d = 1 is accepted too (the two points of S^0): M_{0,1} = M_{1,1} = 1 and 0
    beyond, which makes the addition formula hold down to d = 2.
    """
    if l < 0 or d < 1:
        raise DomainError(f"multiplicity needs l >= 0, d >= 1 (got l={l}, d={d})")
    top = math.comb(l + d - 1, d - 1)
    low = math.comb(l + d - 3, d - 1) if l + d - 3 >= 0 else 0
    m = top - low
    if m > _INT64_MAX:
        raise RangeError(f"M_{{{l},{d}}} exceeds the 64-bit range")
    return m


def multiplicities(lmax: int, d: int) -> np.ndarray:
    """M_{l,d} for l = 0..lmax as int64."""
    return np.array([multiplicity(l, d) for l in range(lmax + 1)], dtype=np.int64)


def _twice_order(d: int, l, kind: Kind):
    kind = Kind.parse(kind)
    if kind is Kind.BUCKLING:
        return 2 * np.asarray(l) + d
    if kind is Kind.LAPLACIAN:
        return 2 * np.asarray(l) + d - 2
    raise DomainError("the ball module covers buckling and Dirichlet-Laplacian spectra only")


def _check_dl(d, l=0, n=1):
    if d < 2 or l < 0 or n < 1:
        raise DomainError(f"need d >= 2, l >= 0, n >= 1 (got d={d}, l={l}, n={n})")


def radial_eigenvalue(d: int, l: int, n: int, kind, cache: ZeroCache | None = None) -> float:
    _check_dl(d, l, n)
    cache = cache or default_cache()
    twice = int(_twice_order(d, l, kind))
    x = cache.first_n(twice, n)[n - 1]
    return float(x * x)


def buckling_eigenvalue(d: int, l: int, n: int, cache: ZeroCache | None = None) -> float:
    """sigma_{d,l,n} = x_{l+d/2,n}^2."""
    return radial_eigenvalue(d, l, n, Kind.BUCKLING, cache)


def dirichlet_eigenvalue(d: int, l: int, n: int, cache: ZeroCache | None = None) -> float:
    """lambda_{d,l,n} = x_{l-1+d/2,n}^2 (needs d/2 + l - 1 >= 0)."""
    return radial_eigenvalue(d, l, n, Kind.LAPLACIAN, cache)


def l_max(z: float) -> int:
    """Angular cutoff ceil(sqrt z); no mode with larger l lies below z."""
    return int(math.ceil(math.sqrt(z)))


def _radial_values(d: int, kind: Kind, z: float, cache: ZeroCache):
    """Per-l arrays of radial eigenvalues strictly below z, l = 0..l_max(z)."""
    lm = l_max(z)
    tw = _twice_order(d, np.arange(lm + 1), kind)
    # pad the abscissa ceiling so the final strict test happens on x*x
    xmax = math.sqrt(z) * (1 + 1e-12) + 1e-300
    cache.ensure(tw.tolist(), xmax)
    out = []
    for t in tw:
        x = cache.zeros_below(int(t), xmax)
        v = x * x
        out.append(v[v < z])
    return out


def radial_counts(d: int, kind, z: float, cache: ZeroCache | None = None) -> np.ndarray:
    """N_{d,l}(z) for l = 0..l_max(z) (+1 trailing zero for convenience)."""
    _check_dl(d)
    if not z > 0:
        raise DomainError("z must be positive")
    cache = cache or default_cache()
    per_l = _radial_values(d, Kind.parse(kind), z, cache)
    return np.array([v.size for v in per_l] + [0], dtype=np.int64)


def counting(d: int, kind, z: float, cache: ZeroCache | None = None) -> int:
    """N(z) = sum_l M_{l,d} #{n : value_{l,n} < z}, strict."""
    counts = radial_counts(d, kind, z, cache)
    mult = multiplicities(counts.size - 1, d)
    return int(sum(int(a) * int(b) for a, b in zip(mult, counts)))


class RadialMode(NamedTuple):
    d: int
    l: int
    n: int
    kind: Kind
    value: float
    multiplicity: int


@dataclass(frozen=True)
class BallSpectrum:
    """Every radial mode with value < z_max, sorted by value (ties by l, n).

    Stored column-wise; ``modes`` builds RadialMode records on demand.
    """

    d: int
    kind: Kind
    z_max: float
    l: np.ndarray
    n: np.ndarray
    values: np.ndarray
    mult: np.ndarray

    @property
    def modes(self) -> list[RadialMode]:
        return [RadialMode(self.d, int(a), int(b), self.kind, float(v), int(m))
                for a, b, v, m in zip(self.l, self.n, self.values, self.mult)]

    def __len__(self):
        return int(self.values.size)

    @property
    def count(self) -> int:
        """Total number of eigenvalues with multiplicity."""
        return int(sum(int(m) for m in self.mult))

    def to_spectrum(self) -> Spectrum:
        """Merge into a Spectrum; exactly coinciding values are combined."""
        if self.values.size == 0:
            return Spectrum(self.values, self.mult, self.z_max, self._meta())
        vals, inv = np.unique(self.values, return_inverse=True)
        mults = np.zeros(vals.size, dtype=np.int64)
        np.add.at(mults, inv, self.mult)
        return Spectrum(vals, mults, self.z_max, self._meta())

    def _meta(self):
        return {"domain": "ball", "d": self.d, "kind": self.kind.value, "z_max": self.z_max}

    def write_csv(self, path_or_fh):
        own = isinstance(path_or_fh, (str, bytes)) or hasattr(path_or_fh, "__fspath__")
        fh = open(path_or_fh, "w", newline="") if own else path_or_fh
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["d", "kind", "l", "n", "value", "multiplicity"])
            for a, b, v, m in zip(self.l, self.n, self.values, self.mult):
                w.writerow([self.d, self.kind.value, int(a), int(b), f"{v:.17g}", int(m)])
        finally:
            if own:
                fh.close()

    def summary(self) -> dict:
        return {"d": self.d, "kind": self.kind.value, "z_max": self.z_max, "count": self.count,
                "first_10_values": [float(v) for v in self.values[:10]]}

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2)


def enumerate_modes(d: int, kind, z_max: float, cache: ZeroCache | None = None,
                    max_modes: int = DEFAULT_MODE_CAP) -> BallSpectrum:
    """All radial modes of the unit ball with value < z_max."""
    _check_dl(d)
    kind = Kind.parse(kind)
    if not z_max > 0:
        raise DomainError("z_max must be positive")
    # roughly sqrt(z)/pi zeros for each of ~sqrt(z) orders
    projected = z_max / (2 * math.pi) + 2 * math.sqrt(z_max) + 1
    if projected > max_modes:
        raise ResourceError(f"about {projected:.3g} radial modes projected, cap is {max_modes}")
    cache = cache or default_cache()
    per_l = _radial_values(d, kind, z_max, cache)
    mult = multiplicities(len(per_l) - 1, d)
    ls = np.concatenate([np.full(v.size, l, dtype=np.int64) for l, v in enumerate(per_l)])
    ns = np.concatenate([np.arange(1, v.size + 1, dtype=np.int64) for v in per_l])
    vals = np.concatenate(per_l) if per_l else np.empty(0)
    order = np.lexsort((ns, ls, vals))
    return BallSpectrum(d, kind, float(z_max), ls[order], ns[order], vals[order],
                        mult[ls[order]] if ls.size else np.empty(0, dtype=np.int64))


def ball_spectrum(d: int, kind, z_max: float, cache: ZeroCache | None = None) -> Spectrum:
    """Convenience: the merged multiplicity-weighted spectrum below z_max."""
    return enumerate_modes(d, kind, z_max, cache).to_spectrum()


def counting_identity_gap(d: int, z: float, cache: ZeroCache | None = None) -> int:
    """N^B_d - N^D_d + sum_l M_{l,d-1} N^D_{d,l}; zero when the identity holds.

    For d = 2 this is N^B_2 - (N^D_2 - N^D_{2,0} - N^D_{2,1}).
    """
    if d < 2:
        raise DomainError("counting_identity_gap needs d >= 2")
    cache = cache or default_cache()
    nb = counting(d, Kind.BUCKLING, z, cache)
    nd_l = radial_counts(d, Kind.LAPLACIAN, z, cache)
    nd = sum(multiplicity(l, d) * int(c) for l, c in enumerate(nd_l))
    tail = sum(multiplicity(l, d - 1) * int(c) for l, c in enumerate(nd_l))
    return nb - nd + tail


def disc_identity_gap(z: float, cache: ZeroCache | None = None) -> int:
    """N^B_2 - (N^D_2 - N^D_{2,0} - N^D_{2,1}), spelled out for the disc."""
    cache = cache or default_cache()
    nb = counting(2, Kind.BUCKLING, z, cache)
    nd_l = radial_counts(2, Kind.LAPLACIAN, z, cache)
    nd = counting(2, Kind.LAPLACIAN, z, cache)
    return nb - (nd - int(nd_l[0]) - int(nd_l[1]))


@dataclass(frozen=True)
class DefectReport:
    total: int
    per_l: np.ndarray
    within_one: bool

    @property
    def signs(self) -> set:
        return set(int(v) for v in np.unique(self.per_l))


def cross_dimension_defect(d: int, z: float, cache: ZeroCache | None = None) -> DefectReport:
    """sum_l M_{l,d-1} (N^D_{d,l}(z) - N^D_{d-1,l}(z)).

    Interlacing of the zeros of J_nu and J_{nu+1/2} keeps every per-l
    difference within one; since the higher order has the later zeros the
    differences are in fact 0 or -1.
    """
    if d < 3:
        raise DomainError("cross_dimension_defect needs d >= 3")
    cache = cache or default_cache()
    a = radial_counts(d, Kind.LAPLACIAN, z, cache)
    b = radial_counts(d - 1, Kind.LAPLACIAN, z, cache)
    n = max(a.size, b.size)
    a = np.pad(a, (0, n - a.size))
    b = np.pad(b, (0, n - b.size))
    diff = a - b
    total = sum(multiplicity(l, d - 1) * int(v) for l, v in enumerate(diff))
    return DefectReport(total, diff, bool(np.all(np.abs(diff) <= 1)))


def dirichlet_two_term(d: int, z):
    """Two-term Weyl expansion of N^D_d on the unit ball.

    (z/4)^{d/2} / Gamma(d/2+1)^2 - d sqrt(pi) (z/4)^{(d-1)/2} / (4 Gamma(d/2+1) Gamma((d+1)/2)).
    """
    g1 = gamma_half(d + 2)
    g2 = gamma_half(d + 1)
    q = np.asarray(z, dtype=np.float64) / 4.0
    return q ** (d / 2) / g1**2 - d * math.sqrt(math.pi) / (4 * g1 * g2) * q ** ((d - 1) / 2)


class RadialResidual(NamedTuple):
    value_at_1: float
    slope_at_1: float
    scale: float
    sign_changes: int


def radial_profile(d: int, l: int, sigma: float, r):
    """R(r) = j_l(sqrt sigma) r^l - j_l(sqrt sigma r), j_l(z) = z^{1-d/2} J_{l+d/2-1}(z)."""
    k = math.sqrt(sigma)
    twice = 2 * l + d - 2
    r = np.asarray(r, dtype=np.float64)
    jk, _ = bessel_pair(twice, k)
    jl_k = k ** (1 - d / 2) * float(jk)
    kr = k * r
    with np.errstate(divide="ignore", invalid="ignore"):
        jr, _ = bessel_pair(twice, kr)
        jl_r = np.where(kr > 0, kr ** (1 - d / 2) * jr, 0.0)
    if l == 0:
        # j_0(0) limit: (1/2)^{nu} / Gamma(nu + 1) with nu = d/2 - 1
        lim = 0.5 ** ((d - 2) / 2) / gamma_half(d)
        jl_r = np.where(kr > 0, jl_r, lim)
    return jl_k * r**l - jl_r


def radial_residual(d: int, l: int, n: int, cache: ZeroCache | None = None,
                    samples: int | None = None) -> RadialResidual:
    """Boundary residuals R(1), R'(1) of the radial buckling profile, and its nodes.

    R'(1) = l j_l(k) - k j_l'(k) with k = sqrt(sigma_{d,l,n}); both should be
    tiny against max |R| on [0, 1].  Interior sign changes should equal n - 1.
    """
    _check_dl(d, l, n)
    sigma = buckling_eigenvalue(d, l, n, cache)
    k = math.sqrt(sigma)
    nu = l + d / 2 - 1
    twice = 2 * l + d - 2
    j0, j1 = bessel_pair(twice, k)
    j0, j1 = float(j0), float(j1)
    jl = k ** (1 - d / 2) * j0
    jprime = -j1 + nu / k * j0
    jl_prime = (1 - d / 2) * k ** (-d / 2) * j0 + k ** (1 - d / 2) * jprime
    slope = l * jl - k * jl_prime
    m = samples or (400 * n + 2000)
    r = np.linspace(0.0, 1.0, m + 1)
    prof = radial_profile(d, l, sigma, r)
    scale = float(np.max(np.abs(prof)))
    at1 = float(prof[-1])
    # ignore near-zero samples at the ends so rounding cannot fake a node
    inner = prof[1:-1]
    inner = inner[np.abs(inner) > 1e-8 * scale]
    changes = int(np.count_nonzero(np.signbit(inner[1:]) != np.signbit(inner[:-1])))
    return RadialResidual(at1, float(slope), scale, changes)


def unit_ball_geometry(d: int) -> tuple[float, float]:
    """(|B|, |dB|) of the unit ball in R^d."""
    vol = unit_ball_volume(d)
    return vol, d * vol
