"""Gamma function at half-integers and the volume of the unit ball."""

import math
import threading

import numpy as np

from ..errors import DomainError, RangeError

SQRT_PI = math.sqrt(math.pi)


def gamma_half(twice_a: int) -> float:
    """Return Gamma(twice_a / 2) for a positive integer ``twice_a``.

    Integer arguments use Gamma(n) = (n-1)!, half-integer ones
    Gamma(n + 1/2) = sqrt(pi) (2n)! / (4**n n!).  The rational part is
    formed exactly in integer arithmetic, so the only roundings are the
    final division and the multiplication by sqrt(pi).
    """
    twice_a = int(twice_a)
    if twice_a < 1:
        raise DomainError(f"gamma_half needs twice_a >= 1, got {twice_a}")
    try:
        if twice_a % 2 == 0:
            value = float(math.factorial(twice_a // 2 - 1))
        else:
            n = twice_a // 2
            value = (math.factorial(2 * n) / (4**n * math.factorial(n))) * SQRT_PI
    except OverflowError:
        raise RangeError(f"Gamma({twice_a}/2) overflows double precision") from None
    if math.isinf(value):
        raise RangeError(f"Gamma({twice_a}/2) overflows double precision")
    return value


class _LogGammaTable:
    # log Gamma(t/2) for t = 1..size, grown on demand by the recursion
    # log Gamma(a + 1) = log Gamma(a) + log a, run separately on both parities.
    def __init__(self):
        self._table = np.zeros(1)
        self._lock = threading.Lock()

    def get(self, twice_a):
        twice_a = np.asarray(twice_a, dtype=np.int64)
        top = int(twice_a.max(initial=1))
        if top >= self._table.size:
            self._grow(top)
        return self._table[twice_a]

    def _grow(self, top):
        with self._lock:
            if top < self._table.size:
                return
            size = max(2 * top, 256)
            t = np.arange(size + 1, dtype=np.float64)
            table = np.full(size + 1, np.nan)
            # even chain: Gamma(1)=1, odd chain: Gamma(1/2)=sqrt(pi)
            table[2::2] = np.concatenate(([0.0], np.cumsum(np.log(t[2:-1:2] / 2.0))))[: table[2::2].size]
            table[1::2] = math.log(SQRT_PI) + np.concatenate(
                ([0.0], np.cumsum(np.log(t[1:-1:2] / 2.0)))
            )[: table[1::2].size]
            self._table = table


_LOG_GAMMA = _LogGammaTable()


def log_gamma_half(twice_a):
    """Vectorised log Gamma(twice_a / 2) for positive integer ``twice_a``."""
    arr = np.asarray(twice_a)
    if np.any(arr < 1):
        raise DomainError("log_gamma_half needs twice_a >= 1")
    return _LOG_GAMMA.get(arr)


def unit_ball_volume(d: int) -> float:
    """Lebesgue measure B_d of the unit ball in R^d (B_0 = 1)."""
    d = int(d)
    if d < 0:
        raise DomainError(f"dimension must be non-negative, got {d}")
    if d == 0:
        return 1.0
    return math.pi ** (d / 2) / gamma_half(d + 2)
