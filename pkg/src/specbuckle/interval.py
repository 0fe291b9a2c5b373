"""Spectra of the buckling, Dirichlet-Laplacian and clamped bilaplacian problems on (0, L).

On (0, 1):

* Laplacian    lambda_j = pi^2 j^2
* buckling     sigma_j = gamma_j^2,  gamma_j = pi (j + 1) - t_j, with t_j = 0 for
  odd j and, for even j, t_j in (0, pi) the root of
  sin(t/2) (pi (j+1) - t) = 2 cos(t/2)   (equivalently tan(gamma/2) = gamma/2)
* bilaplacian  Lambda_j = x_j^4,  cos(x) cosh(x) = 1, x_j = pi (j + 1/2) - (-1)^j s_j
  with 0 < s_j < pi/2.  We solve sin(s) = sech(pi (j + 1/2) - (-1)^j s) for s
  directly, which never forms cosh and keeps s to full relative precision.

An interval of length L scales sigma, lambda by L^-2 and Lambda by L^-4.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConvergenceError, DomainError
from .spectrum import BoundReport, Kind, Spectrum, leq_report

_TOL = 1e-15


@dataclass(frozen=True)
class IntervalEigenvalue:
    j: int
    kind: Kind
    value: float
    aux: Optional[float] = None
    length: float = 1.0


def _sech(x):
    e = np.exp(-np.abs(x))
    return 2.0 * e / (1.0 + e * e)


def _newton_bisect(f, lo, hi, x0, tol=_TOL, max_iter=200):
    """Vectorised safeguarded Newton on brackets with f(lo) < 0 < f(hi).

    ``f`` returns (value, derivative).  Steps leaving the bracket become
    bisections; stops when |dx| <= tol * max(|x|, tiny) or the bracket closes.
    """
    a = np.array(lo, dtype=np.float64)
    b = np.array(hi, dtype=np.float64)
    x = np.array(x0, dtype=np.float64)
    a, b, x = (np.array(v) for v in np.broadcast_arrays(a, b, x))
    x = np.where((x > a) & (x < b), x, 0.5 * (a + b))
    out = x.copy()
    live = np.arange(x.size)
    for _ in range(max_iter):
        if live.size == 0:
            return out
        xl = x[live]
        fx, dfx = f(xl, live)
        neg = fx < 0
        a[live] = np.where(neg, xl, a[live])
        b[live] = np.where(neg, b[live], xl)
        al, bl = a[live], b[live]
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = xl - fx / dfx
        ok = ((xn > al) & (xn < bl)) | (xn == xl)
        small = np.abs(xn - xl) <= tol * np.maximum(np.abs(xl), 1e-300)
        done = (ok & small) | (fx == 0) | ((bl - al) <= 2 * np.spacing(np.abs(bl)))
        xn = np.where(ok, xn, 0.5 * (al + bl))
        x[live] = np.where(fx == 0, xl, xn)
        out[live[done]] = x[live[done]]
        live = live[~done]
    k = live[0]
    raise ConvergenceError("bracketed Newton did not converge", lo=float(a[k]), hi=float(b[k]),
                           iterate=float(x[k]))


def _check_j(j):
    j = np.asarray(j)
    if np.any(j < 1):
        raise DomainError("eigenvalue index j must be >= 1")
    return j


def lambda_1d(j, L: float = 1.0):
    """Dirichlet Laplacian eigenvalue pi^2 j^2 / L^2."""
    j = _check_j(j)
    _check_L(L)
    out = (math.pi * j) ** 2 / L**2
    return float(out) if np.ndim(out) == 0 else out


def _check_L(L):
    if not L > 0:
        raise DomainError("interval length must be positive")


def buckling_t(j):
    """t_j in (0, pi) for even j: root of sin(t/2)(pi(j+1) - t) - 2 cos(t/2)."""
    j = _check_j(j)
    if np.any(j % 2):
        raise DomainError("t_j is defined for even j only")
    c = math.pi * (np.atleast_1d(j).astype(np.float64) + 1.0)

    def f(t, idx):
        h = 0.5 * t
        cc = c[idx]
        return np.sin(h) * (cc - t) - 2.0 * np.cos(h), 0.5 * np.cos(h) * (cc - t)

    # t ~ 4 / (pi (j+1)) for large j
    t = _newton_bisect(f, np.zeros_like(c), np.full_like(c, math.pi), 4.0 / c)
    return float(t[0]) if np.ndim(j) == 0 else t


def _gamma(j):
    """gamma_j = sqrt(sigma_j) on the unit interval, plus t_j (0 for odd j)."""
    j = np.atleast_1d(_check_j(j)).astype(np.int64)
    t = np.zeros(j.size)
    even = j % 2 == 0
    if even.any():
        t[even] = buckling_t(j[even])
    return math.pi * (j + 1.0) - t, t


def sigma_1d(j, L: float = 1.0):
    """Buckling eigenvalue (pi(j+1) - t_j)^2 / L^2; returns IntervalEigenvalue for scalar j."""
    _check_L(L)
    g, t = _gamma(j)
    vals = g * g / L**2
    if np.ndim(j) == 0:
        aux = float(t[0]) if int(j) % 2 == 0 else None
        return IntervalEigenvalue(int(j), Kind.BUCKLING, float(vals[0]), aux, L)
    return vals


def bilaplacian_s(j):
    """s_j in (0, pi/2) with x_j = pi(j + 1/2) - (-1)^j s_j solving cos x cosh x = 1.

    Underflows to 0 once sech(x_j) does (j above roughly 236).
    """
    j = np.atleast_1d(_check_j(j)).astype(np.int64)
    c = math.pi * (j + 0.5)
    eps = np.where(j % 2 == 0, 1.0, -1.0)

    def f(s, idx):
        x = c[idx] - eps[idx] * s
        sh = _sech(x)
        # d/ds sech(x) = -sech tanh * dx/ds, dx/ds = -eps
        return np.sin(s) - sh, np.cos(s) - eps[idx] * sh * np.tanh(x)

    s0 = _sech(c)
    tiny = s0 == 0.0
    s = np.zeros(j.size)
    if (~tiny).any():
        idx = np.flatnonzero(~tiny)
        sub = lambda s_, k: f(s_, idx[k])  # noqa: E731
        s[idx] = _newton_bisect(sub, np.zeros(idx.size), np.full(idx.size, math.pi / 2), s0[idx])
    return s


def bilaplacian_root(j):
    """x_j = Lambda_j^{1/4} on the unit interval."""
    j = np.atleast_1d(_check_j(j)).astype(np.int64)
    s = bilaplacian_s(j)
    eps = np.where(j % 2 == 0, 1.0, -1.0)
    return math.pi * (j + 0.5) - eps * s


def biharmonic_1d(j, L: float = 1.0):
    """Clamped bilaplacian eigenvalue x_j^4 / L^4 (IntervalEigenvalue for scalar j, aux = s_j)."""
    _check_L(L)
    x = bilaplacian_root(j)
    vals = x**4 / L**4
    if np.ndim(j) == 0:
        return IntervalEigenvalue(int(j), Kind.BILAPLACIAN, float(vals[0]),
                                  float(bilaplacian_s(j)[0]), L)
    return vals


def first_n(kind, n: int, L: float = 1.0) -> np.ndarray:
    """The first n eigenvalues (j = 1..n) of the given kind on (0, L)."""
    kind = Kind.parse(kind)
    j = np.arange(1, n + 1)
    if n == 0:
        return np.empty(0)
    if kind is Kind.LAPLACIAN:
        return lambda_1d(j, L)
    if kind is Kind.BUCKLING:
        return sigma_1d(j, L)
    return biharmonic_1d(j, L)


def _count_guess(kind: Kind, z: float, L: float) -> int:
    # index bound from the leading behaviour; every kind is simple in 1D
    if kind is Kind.BILAPLACIAN:
        return int(z**0.25 * L / math.pi) + 2
    return int(math.sqrt(z) * L / math.pi) + 2


def interval_spectrum(kind, z_max: float, L: float = 1.0) -> Spectrum:
    """All eigenvalues below z_max as a Spectrum (all simple)."""
    kind = Kind.parse(kind)
    if not z_max > 0:
        raise DomainError("z_max must be positive")
    _check_L(L)
    vals = first_n(kind, _count_guess(kind, z_max, L), L)
    vals = vals[vals < z_max]
    return Spectrum(vals, np.ones(vals.size, dtype=np.int64), float(z_max),
                    {"domain": "interval", "d": 1, "kind": kind.value, "length": L, "z_max": float(z_max)})


def t_identity_residual(j) -> float:
    """|sin^2(t_j/2) - 4/(4 + sigma_j)| relative to the right side, over the even j given."""
    j = np.atleast_1d(j)
    g, t = _gamma(j[j % 2 == 0])
    rhs = 4.0 / (4.0 + g * g)
    return float(np.max(np.abs(np.sin(t / 2) ** 2 - rhs) / rhs))


def s_identity_residual(j) -> float:
    """|sin^2(s_j) - sech^2(x_j)| relative, where both are representable."""
    s = bilaplacian_s(j)
    x = bilaplacian_root(j)
    rhs = _sech(x) ** 2
    ok = rhs > 0
    if not ok.any():
        return 0.0
    return float(np.max(np.abs(np.sin(s[ok]) ** 2 - rhs[ok]) / rhs[ok]))


def sj_lt_half_tj(j: int) -> BoundReport:
    """s_j < t_j / 2 for even j, together with sigma_j <= 4 sqrt(Lambda_j)."""
    if j % 2:
        raise DomainError("sj_lt_half_tj needs even j")
    s = float(bilaplacian_s(j)[0])
    t = buckling_t(j)
    main = leq_report("s_j < t_j/2", s, t / 2, strict=True, j=j)
    sig = sigma_1d(j).value
    lam = biharmonic_1d(j).value
    enabling = leq_report("sigma_j <= 4 sqrt(Lambda_j)", sig, 4 * math.sqrt(lam), j=j)
    rep = BoundReport("s_j < t_j/2", main.lhs, main.rhs, main.margin,
                      main.passed and enabling.passed, {"j": j}, [main, enabling])
    return rep


def buckling_mode_residual(j: int, samples: int = 4001) -> tuple[float, float]:
    """(|u(1)|, |u'(1)|) of the unit-interval buckling eigenfunction, max|u| = 1.

    Even j: u = A (cos(g x) - 1) + sin(g x) - g x, A = (sin g - g) / (1 - cos g).
    Odd j (sin(g/2) = 0, A degenerate): u = 1 - cos(g x).
    """
    g = float(_gamma(j)[0][0])
    x = np.linspace(0.0, 1.0, samples)
    if j % 2:
        u = 1.0 - np.cos(g * x)
        u1, du1 = 1.0 - math.cos(g), g * math.sin(g)
    else:
        A = (math.sin(g) - g) / (1.0 - math.cos(g))
        u = A * (np.cos(g * x) - 1.0) + np.sin(g * x) - g * x
        u1 = A * (math.cos(g) - 1.0) + math.sin(g) - g
        du1 = -A * g * math.sin(g) + g * math.cos(g) - g
    scale = float(np.max(np.abs(u)))
    return abs(u1) / scale, abs(du1) / scale


def write_csv(path, kind, jmax: int, L: float = 1.0):
    """Dump the first jmax eigenvalues: columns j, kind, L, value, aux."""
    kind = Kind.parse(kind)
    vals = first_n(kind, jmax, L)
    j = np.arange(1, jmax + 1)
    if kind is Kind.BUCKLING:
        aux = np.where(j % 2 == 0, _gamma(j)[1], np.nan) if jmax else np.empty(0)
    elif kind is Kind.BILAPLACIAN:
        aux = bilaplacian_s(j) if jmax else np.empty(0)
    else:
        aux = np.full(jmax, np.nan)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["j", "kind", "L", "value", "aux"])
        for jj, v, a in zip(j, vals, aux):
            w.writerow([int(jj), kind.value, f"{L:.17g}", f"{v:.17g}", "" if np.isnan(a) else f"{a:.17g}"])
