"""Bessel functions of the first kind J_nu(x) for half-integer orders nu >= 0.

Evaluation is vectorised over points that may each carry their own order.
Three regimes are used:

* power series when ``x <= 4`` or ``x**2 <= 4 (nu + 1)`` (terms shrink from
  the first one on, so cancellation is mild);
* Hankel's asymptotic expansion when ``x >= 25`` and ``x >= (nu + 1)**2``
  (for half-integer orders the expansion terminates and is exact);
* Miller's backward recurrence otherwise, normalised with
  ``J_0 + 2 sum J_2k = 1`` for integer orders and with the closed forms of
  ``J_{1/2}``, ``J_{-1/2}`` for half-integer ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Real

import numpy as np

from ..errors import DomainError
from .gamma import gamma_half, log_gamma_half


@dataclass(frozen=True, order=True)
class HalfIntegerOrder:
    """Bessel order nu = twice_nu / 2, kept as an exact integer numerator."""

    twice_nu: int

    def __post_init__(self):
        if isinstance(self.twice_nu, bool) or not isinstance(self.twice_nu, Integral):
            raise DomainError(f"twice_nu must be an integer, got {self.twice_nu!r}")
        if self.twice_nu < 0:
            raise DomainError(f"negative orders are not supported (twice_nu={self.twice_nu})")
        object.__setattr__(self, "twice_nu", int(self.twice_nu))

    @classmethod
    def of(cls, nu) -> "HalfIntegerOrder":
        """Coerce an int, half-integer float, Fraction or order to an order."""
        if isinstance(nu, HalfIntegerOrder):
            return nu
        if isinstance(nu, Integral):
            return cls(2 * int(nu))
        if isinstance(nu, Fraction):
            twice = 2 * nu
            if twice.denominator != 1:
                raise DomainError(f"order {nu} is not a half-integer")
            return cls(int(twice))
        if isinstance(nu, Real):
            twice = 2.0 * float(nu)
            if not float(twice).is_integer():
                raise DomainError(f"order {nu} is not a half-integer")
            return cls(int(twice))
        raise DomainError(f"cannot interpret {nu!r} as a Bessel order")

    @property
    def value(self) -> float:
        return self.twice_nu / 2

    @property
    def is_integer(self) -> bool:
        return self.twice_nu % 2 == 0

    def shifted(self, twice_delta: int) -> "HalfIntegerOrder":
        """Order nu + twice_delta / 2."""
        return HalfIntegerOrder(self.twice_nu + twice_delta)

    def __str__(self):
        if self.is_integer:
            return str(self.twice_nu // 2)
        return f"{self.twice_nu}/2"


def as_twice_nu(nu) -> int:
    return HalfIntegerOrder.of(nu).twice_nu


_SERIES_X = 4.0
_HANKEL_X = 25.0
_RESCALE_EXP = 500
_RESCALE_AT = 2.0**_RESCALE_EXP

# cos and sin of m*pi/4, m = 0..7
_R = math.sqrt(0.5)
_COS_PI4 = np.array([1.0, _R, 0.0, -_R, -1.0, -_R, 0.0, _R])
_SIN_PI4 = np.array([0.0, _R, 1.0, _R, 0.0, -_R, -1.0, -_R])

_SMALL_GAMMA = np.array([np.nan] + [gamma_half(t) for t in range(1, 203)])


def _series(twice: np.ndarray, x: np.ndarray) -> np.ndarray:
    nu = twice / 2.0
    half = x / 2.0
    q = -(half * half)
    total = np.ones_like(x)
    comp = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 200):
        term = term * q / (k * (k + nu))
        # Neumaier summation
        t = total + term
        big = np.abs(total) >= np.abs(term)
        comp += np.where(big, (total - t) + term, (term - t) + total)
        total = t
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    total = total + comp
    with np.errstate(divide="ignore", under="ignore", over="ignore", invalid="ignore"):
        small = twice <= 200
        pref = np.empty_like(x)
        if np.any(small):
            pref[small] = half[small] ** nu[small] / _SMALL_GAMMA[twice[small] + 2]
        if np.any(~small):
            tb = twice[~small]
            pref[~small] = np.exp(nu[~small] * np.log(half[~small]) - log_gamma_half(tb + 2))
    return pref * total


def _hankel(twice: np.ndarray, x: np.ndarray) -> np.ndarray:
    mu = twice.astype(np.float64) ** 2  # 4 nu^2
    inv8x = 1.0 / (8.0 * x)
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 60):
        term = term * (mu - (2 * k - 1) ** 2) * inv8x / k
        if k % 2:
            q += term if (k // 2) % 2 == 0 else -term
        else:
            p += term if (k // 2) % 2 == 0 else -term
        if np.all(np.abs(term) < 1e-17):
            break
    m = (twice + 1) % 8
    cphi, sphi = _COS_PI4[m], _SIN_PI4[m]
    c, s = np.cos(x), np.sin(x)
    cos_chi = c * cphi + s * sphi
    sin_chi = s * cphi - c * sphi
    return np.sqrt(2.0 / (np.pi * x)) * (p * cos_chi - q * sin_chi)


def _miller_start(x: np.ndarray, k: np.ndarray) -> np.ndarray:
    top = np.maximum(x, k + 1.0)
    return np.ceil(top + 12.0 * np.cbrt(top) + 24.0).astype(np.int64)


def _miller_group(k: np.ndarray, x: np.ndarray, half: bool):
    """Backward recurrence for one parity class.

    ``k`` is the integer part of the order (nu = k or k + 1/2).  Returns
    J_nu and J_{nu+1} at every point.
    """
    n = x.size
    start = _miller_start(x, k)
    perm = np.argsort(-start, kind="stable")
    ks, xs, ss = k[perm], x[perm], start[perm]
    inv2x = 2.0 / xs
    by_k = np.argsort(ks, kind="stable")
    k_sorted = ks[by_k]
    neg_start = -ss  # ascending

    f_cur = np.zeros(n)
    f_next = np.zeros(n)
    expo = np.zeros(n, dtype=np.int64)
    norm = np.zeros(n)
    cap0 = np.zeros(n)
    cap1 = np.zeros(n)
    cap_e = np.zeros(n, dtype=np.int64)

    base = -1 if half else 0
    shift = 0.5 if half else 0.0
    active = 0
    m = int(ss[0])
    while True:
        now = int(np.searchsorted(neg_start, -m, side="right"))
        if now > active:
            f_cur[active:now] = 1.0
            active = now
        lo = np.searchsorted(k_sorted, m, side="left")
        hi = np.searchsorted(k_sorted, m, side="right")
        if hi > lo:
            idx = by_k[lo:hi]
            cap0[idx] = f_cur[idx]
            cap1[idx] = f_next[idx]
            cap_e[idx] = expo[idx]
        a = active
        if not half and m % 2 == 0:
            norm[:a] += f_cur[:a] if m == 0 else 2.0 * f_cur[:a]
        if m == base:
            break
        fc = f_cur[:a]
        prev = (m + shift) * inv2x[:a] * fc - f_next[:a]
        f_next[:a] = fc
        f_cur[:a] = prev
        if m % 8 == 0:
            big = np.flatnonzero(np.abs(prev) > _RESCALE_AT)
            if big.size:
                f_cur[big] = np.ldexp(f_cur[big], -_RESCALE_EXP)
                f_next[big] = np.ldexp(f_next[big], -_RESCALE_EXP)
                norm[big] = np.ldexp(norm[big], -_RESCALE_EXP)
                expo[big] += _RESCALE_EXP
        m -= 1

    if half:
        # f_cur ~ J_{-1/2}, f_next ~ J_{1/2}
        mag = np.hypot(f_cur, f_next)
        u, v = f_next / mag, f_cur / mag
        scale = np.sqrt(2.0 / (np.pi * xs)) * (np.sin(xs) * u + np.cos(xs) * v) / mag
    else:
        scale = 1.0 / norm
    shift_e = cap_e - expo
    j0 = np.ldexp(cap0 * scale, shift_e)
    j1 = np.ldexp(cap1 * scale, shift_e)
    out0 = np.empty(n)
    out1 = np.empty(n)
    out0[perm] = j0
    out1[perm] = j1
    return out0, out1


def order_table(x, kmax: int, half: bool) -> np.ndarray:
    """J_{k + s}(x) for k = 0..kmax (s = 1/2 if ``half``) at every column x.

    One backward recurrence per column yields every order at once, which is
    what a sign scan over many orders needs.  Returns shape (kmax + 1, len(x)).
    All x must be positive.
    """
    xs = np.asarray(x, dtype=np.float64).ravel()
    if np.any(~(xs > 0)):
        raise DomainError("order_table needs x > 0")
    ncol = xs.size
    out = np.zeros((kmax + 1, ncol))
    if ncol == 0:
        return out
    top = max(float(xs.max()), kmax + 1.0)
    start = int(math.ceil(top + 12.0 * top ** (1.0 / 3.0) + 24.0))
    inv2x = 2.0 / xs
    shift = 0.5 if half else 0.0
    base = -1 if half else 0
    rec_e = np.zeros((kmax + 1, ncol), dtype=np.int64)
    f_cur = np.ones(ncol)
    f_next = np.zeros(ncol)
    norm = np.zeros(ncol)
    expo = np.zeros(ncol, dtype=np.int64)
    for m in range(start, base - 1, -1):
        if 0 <= m <= kmax:
            out[m] = f_cur
            rec_e[m] = expo
        if not half and m % 2 == 0:
            norm += f_cur if m == 0 else 2.0 * f_cur
        if m == base:
            break
        prev = (m + shift) * inv2x * f_cur - f_next
        f_next = f_cur
        f_cur = prev
        if m % 8 == 0:
            big = np.abs(f_cur) > _RESCALE_AT
            if big.any():
                f_cur[big] = np.ldexp(f_cur[big], -_RESCALE_EXP)
                f_next[big] = np.ldexp(f_next[big], -_RESCALE_EXP)
                norm[big] = np.ldexp(norm[big], -_RESCALE_EXP)
                expo[big] += _RESCALE_EXP
    if half:
        mag = np.hypot(f_cur, f_next)
        u, v = f_next / mag, f_cur / mag
        scale = np.sqrt(2.0 / (np.pi * xs)) * (np.sin(xs) * u + np.cos(xs) * v) / mag
    else:
        scale = 1.0 / norm
    with np.errstate(under="ignore"):
        return np.ldexp(out * scale, rec_e - expo)


def _miller(twice: np.ndarray, x: np.ndarray):
    out0 = np.empty_like(x)
    out1 = np.empty_like(x)
    for parity in (0, 1):
        sel = np.flatnonzero(twice % 2 == parity)
        if sel.size:
            a, b = _miller_group(twice[sel] // 2, x[sel], half=bool(parity))
            out0[sel] = a
            out1[sel] = b
    return out0, out1


def bessel_pair(twice_nu, x):
    """Return (J_nu(x), J_{nu+1}(x)) for arrays of orders 2*nu and abscissae.

    ``twice_nu`` broadcasts against ``x``; all ``x`` must be non-negative.
    """
    twice, xx = np.broadcast_arrays(np.asarray(twice_nu, dtype=np.int64), np.asarray(x, dtype=np.float64))
    shape = xx.shape
    twice = twice.ravel().copy()
    xx = xx.ravel().copy()
    if np.any(twice < 0):
        raise DomainError("negative orders are not supported")
    if np.any(~(xx >= 0)):
        raise DomainError("bessel_j needs x >= 0")
    nu = twice / 2.0
    j0 = np.empty_like(xx)
    j1 = np.empty_like(xx)

    series = (xx <= _SERIES_X) | (xx * xx <= 4.0 * (nu + 1.0))
    hankel = ~series & (xx >= _HANKEL_X) & (xx >= (nu + 1.0) ** 2)
    miller = ~(series | hankel)
    for mask, fn in ((series, _series), (hankel, _hankel)):
        idx = np.flatnonzero(mask)
        if idx.size:
            j0[idx] = fn(twice[idx], xx[idx])
            j1[idx] = fn(twice[idx] + 2, xx[idx])
    idx = np.flatnonzero(miller)
    if idx.size:
        j0[idx], j1[idx] = _miller(twice[idx], xx[idx])
    return j0.reshape(shape), j1.reshape(shape)


def _maybe_scalar(arr, like):
    if np.ndim(like) == 0:
        return float(arr)
    return arr


def bessel_j(nu, x):
    """Bessel function J_nu(x) for half-integer nu >= 0 and x >= 0."""
    twice = as_twice_nu(nu)
    xa = np.asarray(x, dtype=np.float64)
    if np.any(~(xa >= 0)):
        raise DomainError("bessel_j is defined here for x >= 0 only")
    j0, _ = bessel_pair(twice, xa)
    return _maybe_scalar(j0, x)


def bessel_j_prime(nu, x):
    """Derivative J'_nu(x) = -J_{nu+1}(x) + (nu / x) J_nu(x), for x > 0."""
    twice = as_twice_nu(nu)
    xa = np.asarray(x, dtype=np.float64)
    if np.any(~(xa > 0)):
        raise DomainError("bessel_j_prime needs x > 0")
    j0, j1 = bessel_pair(twice, xa)
    return _maybe_scalar(-j1 + (twice / 2.0) / xa * j0, x)


def ultraspherical_j(d: int, l: int, z):
    """Ultraspherical Bessel function z**(1 - d/2) J_{d/2 - 1 + l}(z) in R^d."""
    if d < 2 or l < 0:
        raise DomainError(f"ultraspherical_j needs d >= 2 and l >= 0, got d={d}, l={l}")
    za = np.asarray(z, dtype=np.float64)
    if np.any(~(za > 0)):
        raise DomainError("ultraspherical_j needs z > 0")
    j0, _ = bessel_pair(d - 2 + 2 * l, za)
    return _maybe_scalar(za ** (1.0 - d / 2.0) * j0, z)
