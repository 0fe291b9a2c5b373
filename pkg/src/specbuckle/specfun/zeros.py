"""Positive zeros x_{nu,n} of J_nu for half-integer nu.

Zeros are located by a sign scan on the integer grid x = 1, 2, 3, ...
(consecutive zeros of J_nu are more than 3 apart, so every grid cell holds at
most one) and then polished with a bracketed Halley iteration that falls back
to bisection whenever a step leaves the bracket.  The scan starts at ceil(nu)
since J_nu has no zero in (0, nu].

Results are memoised per order in ascending tables.  A table is complete below
its ``limit``: every zero smaller than the limit is stored.
"""

from __future__ import annotations

import csv
import logging
import math
import threading
from dataclasses import dataclass

import numpy as np

from ..errors import ConvergenceError, DomainError
from .bessel import HalfIntegerOrder, as_twice_nu, bessel_pair, order_table

log = logging.getLogger(__name__)

_STEP_TOL = 1e-13
_MAX_ITER = 60
# above this many orders one all-orders recurrence per column beats per-order scans
_BULK_ORDERS = 12
_BLOCK_COLS = 256


@dataclass(frozen=True)
class BesselZero:
    order: HalfIntegerOrder
    index: int
    value: float
    residual: float


def mcmahon_guess(nu, n: int) -> float:
    """Two-term McMahon approximation beta - (4 nu^2 - 1) / (8 beta)."""
    if n < 1:
        raise DomainError(f"zero index must be >= 1, got {n}")
    twice = as_twice_nu(nu)
    beta = math.pi * (4 * n + twice - 1) / 4.0
    return beta - (twice * twice - 1) / (8.0 * beta)


def refine_zeros(twice, lo, hi, guess=None):
    """Polish one zero of J_nu inside each bracket [lo, hi].

    J_nu must change sign across every bracket.  Returns the abscissae; raises
    ConvergenceError if some bracket does not collapse.
    """
    twice = np.asarray(twice, dtype=np.int64)
    a = np.array(lo, dtype=np.float64)
    b = np.array(hi, dtype=np.float64)
    twice, a, b = (np.array(v) for v in np.broadcast_arrays(twice, a, b))
    if a.size == 0:
        return a.copy()
    fa, _ = bessel_pair(twice, a)
    fb, _ = bessel_pair(twice, b)
    if np.any((fa > 0) == (fb > 0)):
        bad = np.flatnonzero((fa > 0) == (fb > 0))[0]
        raise ConvergenceError("bracket without sign change", twice_nu=int(twice[bad]),
                               lo=float(a[bad]), hi=float(b[bad]))
    if guess is None:
        x = a - fa * (b - a) / (fb - fa)
    else:
        x = np.array(np.broadcast_to(guess, a.shape), dtype=np.float64)
    x = np.where((x > a) & (x < b), x, 0.5 * (a + b))
    pos_a = fa > 0
    nu = twice / 2.0
    out = np.empty_like(x)
    live = np.arange(x.size)
    for _ in range(_MAX_ITER):
        xl = x[live]
        j0, j1 = bessel_pair(twice[live], xl)
        nl = nu[live]
        fp = -j1 + nl / xl * j0
        fpp = -fp / xl - (1.0 - (nl / xl) ** 2) * j0
        same = (j0 > 0) == pos_a[live]
        al = np.where(same, xl, a[live])
        bl = np.where(same, b[live], xl)
        a[live], b[live] = al, bl
        with np.errstate(divide="ignore", invalid="ignore"):
            step = 2.0 * j0 * fp / (2.0 * fp * fp - j0 * fpp)
        xn = xl - step
        # a step that rounds back onto xl means xl is already the root
        ok = ((xn > al) & (xn < bl)) | (xn == xl)
        done = ok & (np.abs(xn - xl) <= _STEP_TOL * xl)
        xn[~ok] = 0.5 * (al[~ok] + bl[~ok])
        done |= (j0 == 0.0) | ((bl - al) <= 4.0 * np.spacing(bl))
        x[live] = np.where(j0 == 0.0, xl, xn)
        out[live[done]] = x[live[done]]
        live = live[~done]
        if live.size == 0:
            return out
    k = live[0]
    raise ConvergenceError("zero refinement did not converge", twice_nu=int(twice[k]),
                           lo=float(a[k]), hi=float(b[k]), iterate=float(x[k]))


def _scan_brackets(cols: np.ndarray, vals: np.ndarray):
    """Indices i with a sign change between cols[i] and cols[i + 1]."""
    pos = vals > 0
    return np.flatnonzero(pos[:-1] != pos[1:])


class ZeroCache:
    """Thread-safe memo of ascending zero tables keyed by twice_nu.

    Readers get immutable snapshots; extension is serialised by a lock.
    """

    def __init__(self):
        self._lock = threading.RLock()
        self._zeros: dict[int, np.ndarray] = {}
        self._limit: dict[int, int] = {}

    def clear(self):
        with self._lock:
            self._zeros.clear()
            self._limit.clear()

    def limit(self, twice: int) -> int:
        return self._limit.get(twice, 0)

    def table(self, twice: int) -> np.ndarray:
        return self._zeros.get(twice, np.empty(0))

    def ensure(self, twice_list, xmax: float):
        """Make every listed table complete below xmax."""
        target = max(int(math.ceil(xmax)), 1)
        with self._lock:
            todo = sorted({int(t) for t in twice_list if self.limit(int(t)) < target})
            if not todo:
                return
            for t in todo:
                if t < 0:
                    raise DomainError("negative orders are not supported")
            brackets = self._brackets(todo, target)
            tw = np.concatenate([np.full(len(lo), t, dtype=np.int64) for t, lo, _ in brackets]) \
                if brackets else np.empty(0, dtype=np.int64)
            lo = np.concatenate([b[1] for b in brackets]) if brackets else np.empty(0)
            hi = np.concatenate([b[2] for b in brackets]) if brackets else np.empty(0)
            # McMahon seeds are good once the index clears the order
            guess = None
            if tw.size:
                counts = np.concatenate([self.table(t).size + 1 + np.arange(len(b_lo))
                                         for t, b_lo, _ in brackets])
                beta = np.pi * (4 * counts + tw - 1) / 4.0
                mm = beta - (tw.astype(np.float64) ** 2 - 1) / (8.0 * beta)
                use = (counts > tw / 2.0) & (mm > lo) & (mm < hi)
                guess = np.where(use, mm, np.nan)
                fa, _ = bessel_pair(tw, lo)
                fb, _ = bessel_pair(tw, hi)
                secant = lo - fa * (hi - lo) / (fb - fa)
                guess = np.where(use, guess, secant)
            roots = refine_zeros(tw, lo, hi, guess) if tw.size else np.empty(0)
            pos = 0
            for t, b_lo, _ in brackets:
                new = roots[pos:pos + len(b_lo)]
                pos += len(b_lo)
                old = self.table(t)
                if old.size and new.size:
                    new = new[new > old[-1] + 1.0]
                merged = np.concatenate([old, new])
                merged.setflags(write=False)
                self._zeros[t] = merged
            for t in todo:
                self._limit[t] = target
                if t not in self._zeros:
                    empty = np.empty(0)
                    empty.setflags(write=False)
                    self._zeros[t] = empty

    def _first_col(self, t: int) -> int:
        lim = self.limit(t)
        return lim if lim > 0 else max(1, int(math.ceil(t / 2.0)))

    def _brackets(self, todo, target):
        """Sign-change brackets (twice, lo, hi) for each order in ``todo``."""
        out = []
        for parity in (0, 1):
            group = [t for t in todo if t % 2 == parity]
            if not group:
                continue
            if len(group) >= _BULK_ORDERS:
                out.extend(self._bulk_brackets(group, target, bool(parity)))
            else:
                for t in group:
                    c0 = self._first_col(t)
                    if c0 >= target:
                        continue
                    cols = np.arange(c0, target + 1, dtype=np.float64)
                    vals, _ = bessel_pair(t, cols)
                    idx = _scan_brackets(cols, vals)
                    out.append((t, cols[idx], cols[idx + 1]))
        return out

    def _bulk_brackets(self, group, target, half):
        kmax = max(group) // 2
        first = {t: self._first_col(t) for t in group}
        c_lo = min(first.values())
        found = {t: ([], []) for t in group}
        prev_vals = None
        prev_col = None
        for b0 in range(c_lo, target + 1, _BLOCK_COLS):
            cols = np.arange(b0, min(b0 + _BLOCK_COLS, target + 1), dtype=np.float64)
            tab = order_table(cols, kmax, half)
            if prev_vals is not None:
                cols_ext = np.concatenate([[prev_col], cols])
            else:
                cols_ext = cols
            for t in group:
                row = tab[t // 2]
                rv = np.concatenate([[prev_vals[t // 2]], row]) if prev_vals is not None else row
                keep = cols_ext >= first[t]
                cx, vx = cols_ext[keep], rv[keep]
                if cx.size < 2:
                    continue
                idx = _scan_brackets(cx, vx)
                found[t][0].append(cx[idx])
                found[t][1].append(cx[idx + 1])
            prev_vals = tab[:, -1].copy()
            prev_col = cols[-1]
        out = []
        for t in group:
            lo, hi = found[t]
            if lo:
                out.append((t, np.concatenate(lo), np.concatenate(hi)))
        return out

    def zeros_below(self, twice: int, xmax: float) -> np.ndarray:
        self.ensure([twice], xmax)
        tab = self.table(twice)
        return tab[: np.searchsorted(tab, xmax, side="left")]

    def first_n(self, twice: int, n: int) -> np.ndarray:
        if n < 1:
            raise DomainError(f"zero count must be >= 1, got {n}")
        xmax = mcmahon_guess(HalfIntegerOrder(twice), n) + 4.0
        while True:
            self.ensure([twice], xmax)
            tab = self.table(twice)
            if tab.size >= n:
                return tab[:n]
            xmax = xmax + math.pi * (n - tab.size) + 4.0


_CACHE = ZeroCache()


def default_cache() -> ZeroCache:
    return _CACHE


def bessel_zeros(nu, n: int, cache: ZeroCache | None = None) -> np.ndarray:
    """The first n positive zeros of J_nu, ascending."""
    return (cache or _CACHE).first_n(as_twice_nu(nu), n)


def bessel_zero(nu, n: int, cache: ZeroCache | None = None) -> BesselZero:
    """The n-th positive zero of J_nu (n is 1-based)."""
    order = HalfIntegerOrder.of(nu)
    value = float(bessel_zeros(order, n, cache)[n - 1])
    j0, _ = bessel_pair(order.twice_nu, value)
    return BesselZero(order=order, index=n, value=value, residual=abs(float(j0)))


def zeros_below(nu, xmax: float, cache: ZeroCache | None = None) -> np.ndarray:
    """All positive zeros of J_nu smaller than xmax."""
    return (cache or _CACHE).zeros_below(as_twice_nu(nu), xmax)


def dump_zero_table(path, twice_list, xmax: float, cache: ZeroCache | None = None):
    """Write zeros below xmax for the given orders as CSV (twice_nu, n, value, residual)."""
    cache = cache or _CACHE
    twice_list = [int(t) for t in twice_list]
    cache.ensure(twice_list, xmax)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["twice_nu", "n", "value", "residual"])
        for t in twice_list:
            z = cache.zeros_below(t, xmax)
            res, _ = bessel_pair(t, z) if z.size else (np.empty(0), None)
            for i, (v, r) in enumerate(zip(z, np.abs(res)), start=1):
                w.writerow([t, i, f"{v:.17g}", f"{r:.3e}"])
