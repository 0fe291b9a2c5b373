"""Counting functions, Riesz means and the inequality / asymptotics verifiers.

Everything here reads an immutable ``Spectrum``; the multiplicity-expanded
sequence sigma_1 <= sigma_2 <= ... is addressed through prefix sums.
Conventions: ``margin > 0`` means the inequality holds with room to spare, and
``passed`` is the inequality itself (with the tolerance stated per check).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError, InsufficientSpectrumError
from .specfun import gamma_half, unit_ball_volume
from .spectrum import BoundReport, Spectrum, geq_report, leq_report

TWO_PI = 2.0 * math.pi
GRID_OFFSET = math.pi * 1e-3


@dataclass(frozen=True)
class WeylModel:
    """Geometry (d, |Omega|, |dOmega|) and the Weyl / two-term coefficients."""

    d: int
    volume: float
    surface: float = 0.0

    def __post_init__(self):
        if self.d < 1:
            raise DomainError("dimension must be >= 1")
        if not self.volume > 0:
            raise DomainError("volume must be positive")
        if self.surface < 0:
            raise DomainError("surface measure must be non-negative")

    @classmethod
    def interval(cls, length: float = 1.0) -> "WeylModel":
        return cls(1, float(length), 2.0)

    @classmethod
    def unit_ball(cls, d: int) -> "WeylModel":
        vol = unit_ball_volume(d)
        return cls(d, vol, d * vol)

    @property
    def c0(self) -> float:
        """(2 pi)^-d B_d |Omega|."""
        return TWO_PI ** (-self.d) * unit_ball_volume(self.d) * self.volume

    @property
    def boundary_factor(self) -> float:
        """1/4 + Gamma(d/2) / (2 sqrt(pi) Gamma(d/2 + 1/2))."""
        d = self.d
        return 0.25 + gamma_half(d) / (2.0 * math.sqrt(math.pi) * gamma_half(d + 1))

    @property
    def c1(self) -> float:
        """Second-term coefficient of N: (2 pi)^{1-d} B_{d-1} |dOmega| (1/4 + ...)."""
        d = self.d
        return TWO_PI ** (1 - d) * unit_ball_volume(d - 1) * self.surface * self.boundary_factor

    @property
    def sum_constant(self) -> float:
        """C_d = 4 pi^2 / B_d^{2/d}."""
        return 4.0 * math.pi**2 / unit_ball_volume(self.d) ** (2.0 / self.d)

    def riesz_leading(self, p: float) -> float:
        """Leading coefficient of R_p: c0 Gamma(p+1) Gamma(d/2+1) / Gamma(p+d/2+1)."""
        h = self.d / 2.0
        return self.c0 * math.exp(math.lgamma(p + 1) + math.lgamma(h + 1) - math.lgamma(p + h + 1))


def weyl_two_term_model(model: WeylModel, z):
    """(N_model, R1_model) from the two-term expansions."""
    d = model.d
    z = np.asarray(z, dtype=np.float64)
    n = model.c0 * z ** (d / 2) - model.c1 * z ** ((d - 1) / 2)
    r1 = 2.0 / (d + 2) * model.c0 * z ** (d / 2 + 1) - 2.0 / (d + 1) * model.c1 * z ** ((d + 1) / 2)
    if n.ndim == 0:
        return float(n), float(r1)
    return n, r1


def weyl_leading(model: WeylModel, z):
    return model.c0 * np.asarray(z, dtype=np.float64) ** (model.d / 2)


def counting_function(spec: Spectrum, z):
    """N(z) = #{j : sigma_j < z}."""
    return spec.count_below(z)


def riesz_mean(spec: Spectrum, p: float, z):
    """R_p(z) = sum_j (z - sigma_j)_+^p, compensated summation; z may be an array."""
    if not p > 0:
        raise DomainError("Riesz order p must be positive")
    zs = np.asarray(z, dtype=np.float64)
    spec._check_z(zs)
    out = np.empty(zs.shape)
    flat = out.reshape(-1)
    for i, zz in enumerate(zs.reshape(-1)):
        n = np.searchsorted(spec.values, zz, side="left")
        terms = spec.mults[:n] * (zz - spec.values[:n]) ** p
        flat[i] = math.fsum(terms)
    return float(out) if zs.ndim == 0 else out


def riesz_weighted(spec: Spectrum, z: float, power: float = 1.0):
    """sum_j (z - sigma_j)_+^power sigma_j."""
    spec._check_z(z)
    n = np.searchsorted(spec.values, z, side="left")
    v = spec.values[:n]
    return math.fsum(spec.mults[:n] * (z - v) ** power * v)


def legendre_transform_R1(spec: Spectrum, w):
    """L[R_1](w) = (w - [w]) sigma_{[w]+1} + sum_{j <= [w]} sigma_j."""
    w = np.asarray(w, dtype=np.float64)
    if np.any(w < 0):
        raise DomainError("Legendre variable w must be >= 0")
    return spec.partial_sum(w)


def legendre_numeric(spec: Spectrum, w: float, z_grid) -> float:
    """Direct sup over a z grid of (z w - R_1(z))."""
    z_grid = np.asarray(z_grid, dtype=np.float64)
    return float(np.max(z_grid * w - riesz_mean(spec, 1.0, z_grid)))


def bly_upper_check(spec: Spectrum, model: WeylModel, z: float) -> BoundReport:
    """R_1(z) <= 2/(d+2) (2 pi)^-d B_d |Omega| z^{1 + d/2}."""
    lhs = riesz_mean(spec, 1.0, z)
    rhs = 2.0 / (model.d + 2) * model.c0 * z ** (1 + model.d / 2)
    return leq_report("berezin_li_yau_R1", lhs, rhs, z=float(z), d=model.d)


def sum_lower_check(spec: Spectrum, model: WeylModel, k: int) -> BoundReport:
    """(d+2)/d (1/k) sum_{j<=k} sigma_j >= C_d (k / |Omega|)^{2/d}."""
    if k < 1 or k > spec.total:
        raise InsufficientSpectrumError(f"k={k} outside 1..{spec.total}")
    d = model.d
    lhs = (d + 2) / d * spec.partial_sum(k) / k
    rhs = model.sum_constant * (k / model.volume) ** (2.0 / d)
    return geq_report("eigenvalue_sum_lower", lhs, rhs, k=int(k), d=d)


def legendre_dual_check(spec: Spectrum, model: WeylModel, w: float) -> BoundReport:
    """L[R_1](w) >= L[g](w) = d/(d+2) C_d w (w/|Omega|)^{2/d}."""
    d = model.d
    lhs = legendre_transform_R1(spec, w)
    rhs = d / (d + 2) * model.sum_constant * w * (w / model.volume) ** (2.0 / d)
    return geq_report("legendre_dual", lhs, rhs, w=float(w), d=d)


def dyadic_grid(z_lo: float, z_hi: float, offset: float = GRID_OFFSET) -> np.ndarray:
    """Powers of two in [z_lo, z_hi], nudged by an irrational offset to dodge eigenvalues."""
    k0 = math.ceil(math.log2(z_lo))
    k1 = math.floor(math.log2(z_hi))
    z = 2.0 ** np.arange(k0, k1 + 1) + offset
    return z[z <= z_hi]


@dataclass
class AsymptoticFit:
    c0_hat: float
    c1_hat: float
    window: tuple
    residual_rms: float
    target: str = "N"
    centers: np.ndarray = field(default_factory=lambda: np.empty(0))
    means: np.ndarray = field(default_factory=lambda: np.empty(0))


def _target_values(spec, target, z):
    if target == "N":
        return spec.count_below(z).astype(np.float64)
    return riesz_mean_fast(spec, 1.0, z)


def riesz_mean_fast(spec: Spectrum, p: float, z):
    """R_1 / R_2 on a grid through prefix sums (exact-ish, for dense sampling)."""
    z = np.asarray(z, dtype=np.float64)
    spec._check_z(z)
    idx = np.searchsorted(spec.values, z, side="left")
    m = spec.mults.astype(np.float64)
    c0 = np.concatenate([[0.0], np.cumsum(m)])
    c1 = np.concatenate([[0.0], np.cumsum(m * spec.values)])
    if p == 1:
        return c0[idx] * z - c1[idx]
    if p == 2:
        c2 = np.concatenate([[0.0], np.cumsum(m * spec.values**2)])
        return c0[idx] * z * z - 2 * z * c1[idx] + c2[idx]
    return riesz_mean(spec, p, z)


def asymptotic_fit(spec: Spectrum, model: WeylModel, z_lo: float, z_hi: float,
                   n_windows: int = 8, target: str = "N", samples: int = 2000) -> AsymptoticFit:
    """Estimate the second-term coefficient of N (or R_1) by window averaging.

    The remainder (F(z) - leading(z)) / z^{s} (s the second-term exponent) is
    averaged over ``n_windows`` geometric windows, which damps the
    oscillation of the counting function; the window means are then fitted by
    a + b z^{-1/2} and ``c1_hat = a`` is the signed second coefficient.  c0_hat
    comes from the same procedure applied to F(z) / z^{leading exponent}.
    """
    if n_windows < 4:
        raise DomainError("need at least 4 windows")
    if not (0 < z_lo < z_hi):
        raise DomainError("degenerate fitting window")
    if z_hi > spec.z_max:
        raise InsufficientSpectrumError("fitting window exceeds the enumeration ceiling")
    target = target.upper() if target.upper() == "N" else "R1"
    d = model.d
    if target == "N":
        lead_exp, lead_coef, sec_exp = d / 2, model.c0, (d - 1) / 2
    else:
        lead_exp, lead_coef, sec_exp = d / 2 + 1, 2.0 / (d + 2) * model.c0, (d + 1) / 2
    edges = np.geomspace(z_lo, z_hi, n_windows + 1)
    centers, rem_means, lead_means = [], [], []
    for a, b in zip(edges[:-1], edges[1:]):
        z = np.geomspace(a, b, samples, endpoint=False) + GRID_OFFSET
        z = z[z <= z_hi]
        F = _target_values(spec, target, z)
        rem_means.append(np.mean((F - lead_coef * z**lead_exp) / z**sec_exp))
        lead_means.append(np.mean(F / z**lead_exp))
        centers.append(math.sqrt(a * b))
    centers = np.array(centers)
    rem_means = np.array(rem_means)
    X = np.column_stack([np.ones_like(centers), centers**-0.5])
    coef, *_ = np.linalg.lstsq(X, rem_means, rcond=None)
    resid = rem_means - X @ coef
    # leading term: F/z^a = c0 + c1 z^{-1/2} + ...
    coef0, *_ = np.linalg.lstsq(X, np.array(lead_means), rcond=None)
    return AsymptoticFit(float(coef0[0]), float(coef[0]), (float(z_lo), float(z_hi)),
                         float(np.sqrt(np.mean(resid**2))), target, centers, rem_means)


class Relation(str, Enum):
    CHAIN = "chain"                          # lambda_j <= sqrt(Lambda_j) <= sigma_j
    DIRICHLET_BELOW_BUCKLING = "lambda_le_sigma"
    PAYNE = "payne"                          # Lambda_1 >= lambda_1 sigma_1
    GENERALIZED_PAYNE = "generalized_payne"  # Lambda_j >= max(lambda_1 sigma_j, lambda_j sigma_1)
    PAYNE2 = "payne2"                        # lambda_2 <= sigma_1
    STRICT_PRODUCT = "strict_product"        # Lambda_j > lambda_j sigma_j
    SHIFTED_DIRICHLET = "shifted_dirichlet"  # lambda_{j+1} vs sigma_j (1D)
    PARTIAL_SUMS = "partial_sums"            # sum sigma_j <= sum lambda_{j+1}, equal at k = 1 in 1D


_NEEDS_LAMBDA = {Relation.CHAIN, Relation.PAYNE, Relation.GENERALIZED_PAYNE, Relation.STRICT_PRODUCT}


def chain_and_payne_checks(sigma: Spectrum, lam: Spectrum, Lam: Spectrum | None, relation,
                           j: int = 1, strict: bool = False, rel_tol: float = 1e-10) -> BoundReport:
    """Evaluate one Payne-family relation at index j (or k for partial sums).

    For SHIFTED_DIRICHLET, odd j must give equality to ``rel_tol`` and even j
    strict inequality lambda_{j+1} > sigma_j.
    """
    try:
        rel = Relation(relation)
    except ValueError:
        raise DomainError(f"unknown relation {relation!r}") from None
    if rel in _NEEDS_LAMBDA and Lam is None:
        raise InsufficientSpectrumError(f"relation {rel.value} needs the bilaplacian spectrum")
    if j < 1:
        raise DomainError("index must be >= 1")
    s = sigma.value
    l = lam.value
    name = rel.value
    if rel is Relation.CHAIN:
        a, b, c = l(j), math.sqrt(Lam.value(j)), s(j)
        r1 = leq_report("lambda_j <= sqrt(Lambda_j)", a, b, strict=strict, j=j)
        r2 = leq_report("sqrt(Lambda_j) <= sigma_j", b, c, strict=strict, j=j)
        return BoundReport(name, a, c, min(r1.margin, r2.margin), r1.passed and r2.passed,
                           {"j": j, "strict": strict}, [r1, r2])
    if rel is Relation.DIRICHLET_BELOW_BUCKLING:
        return leq_report(name, l(j), s(j), strict=strict, j=j)
    if rel is Relation.PAYNE:
        return geq_report(name, Lam.value(1), l(1) * s(1), strict=strict)
    if rel is Relation.GENERALIZED_PAYNE:
        rhs = max(l(1) * s(j), l(j) * s(1))
        return geq_report(name, Lam.value(j), rhs, strict=strict, j=j)
    if rel is Relation.PAYNE2:
        # equality on balls: allow rounding-level slack unless strict
        a, b = l(2), s(1)
        return leq_report(name, a, b, strict=strict, slack=rel_tol * abs(b), j=2)
    if rel is Relation.STRICT_PRODUCT:
        return geq_report(name, Lam.value(j), l(j) * s(j), strict=True, j=j)
    if rel is Relation.SHIFTED_DIRICHLET:
        a, b = l(j + 1), s(j)
        if j % 2:
            err = abs(a - b) / b
            return BoundReport(name, a, b, rel_tol - err, err <= rel_tol, {"j": j, "expect": "equal"})
        return geq_report(name, a, b, strict=True, j=j, expect="greater")
    if rel is Relation.PARTIAL_SUMS:
        lhs = sigma.partial_sum(j)
        rhs = math.fsum(l(np.arange(2, j + 2)))
        return leq_report(name, lhs, rhs, strict=strict, k=j)
    raise DomainError(f"unknown relation {relation!r}")


def corollary_checks(sigma: Spectrum, lam: Spectrum, Lam: Spectrum, z: float, k: int) -> BoundReport:
    """The three consequences of the averaged variational principle.

    * sum_j (z - sigma_j)_+ sigma_j >= sum_{j<=k} (z lambda_j - Lambda_j)
    * (1/k) sum_{j<=k} (sigma_j^2 - Lambda_j) <= sigma_{k+1} (1/k) sum_{j<=k} (sigma_j - lambda_j)
    * sum_j (z - sigma_j)_+^2 >= sum_j lambda_j^2/Lambda_j (z - Lambda_j/lambda_j)_+^2

    The last sum runs over every j with Lambda_j / lambda_j < z; since
    Lambda_j / lambda_j >= sqrt(Lambda_j) only j with Lambda_j < z^2 contribute.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    for sp, need, what in ((sigma, k + 1, "sigma"), (lam, k, "lambda"), (Lam, k, "Lambda")):
        if sp.total < need:
            raise InsufficientSpectrumError(f"{what} spectrum has {sp.total} entries, need {need}")
    if Lam.z_max < z * z:
        raise InsufficientSpectrumError("Lambda spectrum must be enumerated up to z^2")
    sig_k = sigma.head(k + 1)
    lam_k = lam.head(k)
    Lam_k = Lam.head(k)

    lhs1 = riesz_weighted(sigma, z)
    rhs1 = math.fsum(z * lam_k - Lam_k)
    r1 = geq_report("riesz_dirichlet", lhs1, rhs1, z=z, k=k)

    lhs2 = math.fsum(sig_k[:k] ** 2 - Lam_k) / k
    rhs2 = sig_k[k] * math.fsum(sig_k[:k] - lam_k) / k
    r2 = leq_report("avp_dirichlet", lhs2, rhs2, k=k)

    lhs3 = riesz_mean(sigma, 2.0, z)
    n = Lam.count_below(z * z)
    if lam.total < n:
        raise InsufficientSpectrumError("lambda spectrum too short for the squared Riesz sum")
    Lj = Lam.head(n)
    lj = lam.head(n)
    ratio = Lj / lj
    terms = np.where(ratio < z, lj**2 / Lj * np.clip(z - ratio, 0.0, None) ** 2, 0.0)
    rhs3 = math.fsum(terms)
    r3 = geq_report("squared_riesz", lhs3, rhs3, z=z)

    parts = [r1, r2, r3]
    return BoundReport("corollary", lhs1, rhs1, min(p.margin for p in parts),
                       all(p.passed for p in parts), {"z": z, "k": k}, parts)


def phi_bound_check(sigma: Spectrum, model: WeylModel, z: float, sup: float, l2sq: float,
                    grad_l2sq: float, lap_l2sq: float = 1.0) -> BoundReport:
    """||phi||_inf^2 sum_j (z - sigma_j)_+ sigma_j >= rhs(phi, z).

    rhs = 2 d B_d ||phi||_2^2 / ((d+2)(d+4)) (2 pi)^-d z^{2+d/2}
          - B_d (2 pi)^-d ||grad phi||_2^2 z^{1+d/2} - B_d (2 pi)^-d lap_l2sq z^{d/2}.

    ``lap_l2sq`` multiplies the last term; 1.0 gives the bound as usually
    quoted, passing ||Laplacian phi||_2^2 gives the form that comes out of the
    trial-function computation.
    """
    if not (sup > 0 and l2sq > 0 and grad_l2sq >= 0):
        raise DomainError("phi norms must be positive")
    d = model.d
    bd = unit_ball_volume(d) * TWO_PI ** (-d)
    lhs = sup**2 * riesz_weighted(sigma, z)
    rhs = (2 * d * bd * l2sq / ((d + 2) * (d + 4)) * z ** (2 + d / 2)
           - bd * grad_l2sq * z ** (1 + d / 2) - bd * lap_l2sq * z ** (d / 2))
    return geq_report("phi_bound", lhs, rhs, z=z, sup=sup, l2sq=l2sq, grad_l2sq=grad_l2sq,
                      lap_l2sq=lap_l2sq)


@dataclass
class TauberianRow:
    z: float
    integral_ratio: float
    derivative_ratio: float


def tauberian_diagnostic(spec: Spectrum, model: WeylModel, z_grid, order: int = 0) -> list:
    """Side-by-side ratios for the integrate / differentiate Tauberian step.

    order 0: F = R_1, f = N, p = d/2.  order 1: F = R_2 / 2, f = R_1, p = d/2 + 1.
    Reports z^{-1-p} F / c and z^{-p} f / ((p+1) c), with c the Weyl
    coefficient of F; both columns tend to 1.
    """
    d = model.d
    z = np.asarray(z_grid, dtype=np.float64)
    if order == 0:
        p = d / 2
        F = riesz_mean_fast(spec, 1, z)
        f = spec.count_below(z).astype(np.float64)
        c = model.riesz_leading(1.0)
    elif order == 1:
        p = d / 2 + 1
        F = riesz_mean_fast(spec, 2, z) / 2
        f = riesz_mean_fast(spec, 1, z)
        c = model.riesz_leading(2.0) / 2
    else:
        raise DomainError("order must be 0 or 1")
    a = z ** (-1 - p) * F / c
    b = z ** (-p) * f / ((p + 1) * c)
    return [TauberianRow(float(zz), float(x), float(y)) for zz, x, y in zip(z, a, b)]


def bilaplacian_riesz_1d_check(Lam: Spectrum, z: float, length: float = 1.0,
                               rel_tol: float = 0.01) -> BoundReport:
    """z^{-5/2} sum_j (z^2 - Lambda_j)_+ against 4/(5 pi) |Omega|, within rel_tol."""
    if Lam.z_max < z * z:
        raise InsufficientSpectrumError("bilaplacian spectrum must be enumerated up to z^2")
    ratio = riesz_mean(Lam, 1.0, z * z) * z**-2.5
    target = 4.0 / (5.0 * math.pi) * length
    err = abs(ratio / target - 1.0)
    return BoundReport("bilaplacian_riesz_1d", ratio, target, rel_tol - err, err <= rel_tol,
                       {"z": z, "rel_err": err, "rel_tol": rel_tol})


def riesz_by_quadrature(spec: Spectrum, p: float, z: float, panels: int = 10_000) -> float:
    """p int_0^z (z - t)^{p-1} N(t) dt by composite Simpson.

    Panels are aligned with the eigenvalues below z, where N jumps, and each is
    mapped by t = z - s^2 so the integrand 2 s^{2p-1} stays smooth at t = z.
    Needs p >= 1.
    """
    if p < 1:
        raise DomainError("quadrature route supports p >= 1")
    spec._check_z(z)
    n = np.searchsorted(spec.values, z, side="left")
    brk = np.concatenate([[0.0], spec.values[:n], [z]])
    counts = np.concatenate([[0], np.cumsum(spec.mults[:n])]).astype(np.float64)
    lens = np.diff(brk)
    per = np.maximum(2, 2 * np.ceil(panels * lens / z / 2)).astype(np.int64)
    total = []
    for a, b, m, c in zip(brk[:-1], brk[1:], per, counts):
        if b <= a or c == 0:
            continue
        s = np.linspace(math.sqrt(z - b), math.sqrt(z - a), m + 1)
        g = 2.0 * s ** (2 * p - 1)
        h = (s[-1] - s[0]) / m
        total.append(c * h / 3 * (g[0] + g[-1] + 4 * g[1:-1:2].sum() + 2 * g[2:-1:2].sum()))
    return p * math.fsum(total)


def r2_by_quadrature(spec: Spectrum, z: float, panels: int = 10_000) -> float:
    """2 int_0^z R_1(t) dt by Simpson on eigenvalue-aligned panels."""
    spec._check_z(z)
    n = np.searchsorted(spec.values, z, side="left")
    brk = np.concatenate([[0.0], spec.values[:n], [z]])
    lens = np.diff(brk)
    per = np.maximum(2, 2 * np.ceil(panels * lens / z / 2)).astype(np.int64)
    total = []
    for a, b, m in zip(brk[:-1], brk[1:], per):
        if b <= a:
            continue
        t = np.linspace(a, b, m + 1)
        g = riesz_mean_fast(spec, 1, t)
        h = (b - a) / m
        total.append(h / 3 * (g[0] + g[-1] + 4 * g[1:-1:2].sum() + 2 * g[2:-1:2].sum()))
    return 2 * math.fsum(total)
