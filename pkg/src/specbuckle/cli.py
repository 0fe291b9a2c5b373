"""Command-line front end: spectra tables, N / R_p grids, verification battery, fits, AVP suite.

Exit status: 0 success, 1 some check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import logging
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import ball, interval, riesz
from .avp import run_suite
from .errors import SpecbuckleError
from .spectrum import BoundReport, Kind, Spectrum

log = logging.getLogger("specbuckle")

SCHEMA = 1


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def to_json(obj, indent: int = 2, level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_quote(str(k))}: {to_json(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) for v in seq):
            return "[" + ", ".join(_fmt(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, level + 1) for v in seq) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return _quote(obj)
    if isinstance(obj, (bool, np.bool_, int, float, np.integer, np.floating)):
        return _fmt(obj)
    return _quote(str(obj))


def _quote(s: str) -> str:
    import json
    return json.dumps(s)


@dataclass
class RunConfig:
    command: str
    domain: str = "ball"
    d: int = 2
    length: float = 1.0
    kind: Kind = Kind.BUCKLING
    z_max: float = 1e4
    p: float = 1.0
    j_max: int = 500
    seed: int = 0
    windows: int = 8
    output: str = "csv"
    out_path: str | None = None
    points: int = 64
    n_models: int = 1000
    n_trials: int | None = None
    require_margin: float = 0.0

    def validate(self):
        if self.domain not in ("ball", "interval"):
            raise UsageError(f"unknown domain {self.domain!r}")
        if self.domain == "ball" and self.d < 2:
            raise UsageError("ball domain needs --dim >= 2")
        if self.domain == "ball" and self.kind is Kind.BILAPLACIAN:
            raise UsageError("bilaplacian spectra are available on the interval only")
        if not self.z_max > 0:
            raise UsageError("--z-max must be positive")
        if not self.length > 0:
            raise UsageError("--length must be positive")
        if self.j_max < 1:
            raise UsageError("--j-max must be >= 1")
        if not self.p > 0:
            raise UsageError("--p must be positive")
        if self.windows < 4:
            raise UsageError("--windows must be >= 4")


def _spectrum(cfg: RunConfig, kind: Kind, z_max: float) -> Spectrum:
    if cfg.domain == "ball":
        return ball.enumerate_modes(cfg.d, kind, z_max).to_spectrum().scaled(1.0 / cfg.length**2)
    return interval.interval_spectrum(kind, z_max, cfg.length)


def _model(cfg: RunConfig) -> riesz.WeylModel:
    if cfg.domain == "interval":
        return riesz.WeylModel.interval(cfg.length)
    m = riesz.WeylModel.unit_ball(cfg.d)
    r = cfg.length
    return riesz.WeylModel(cfg.d, m.volume * r**cfg.d, m.surface * r ** (cfg.d - 1))


def cmd_spectrum(cfg: RunConfig, out) -> int:
    if cfg.domain == "ball":
        bs = ball.enumerate_modes(cfg.d, cfg.kind, cfg.z_max * cfg.length**2)
        if cfg.output == "csv":
            bs.write_csv(out)
        elif cfg.output == "json":
            summ = {"schema": SCHEMA, "domain": "ball", **bs.summary()}
            out.write(to_json(summ) + "\n")
        else:
            cum = np.cumsum(bs.mult)
            for v, c in zip(bs.values, cum):
                out.write(f"{_fmt(v / cfg.length**2)} {int(c)}\n")
        return 0
    j = np.arange(1, cfg.j_max + 1)
    vals = interval.first_n(cfg.kind, cfg.j_max, cfg.length)
    if cfg.output == "csv":
        buf = io.StringIO()
        w = __import__("csv").writer(buf, lineterminator="\n")
        w.writerow(["j", "kind", "L", "value", "aux"])
        aux = _interval_aux(cfg.kind, j)
        for jj, v, a in zip(j, vals, aux):
            w.writerow([int(jj), cfg.kind.value, _fmt(cfg.length), _fmt(v), "" if np.isnan(a) else _fmt(a)])
        out.write(buf.getvalue())
    elif cfg.output == "json":
        out.write(to_json({"schema": SCHEMA, "domain": "interval", "kind": cfg.kind.value,
                           "length": cfg.length, "count": int(vals.size),
                           "values": vals}) + "\n")
    else:
        for jj, v in zip(j, vals):
            out.write(f"{int(jj)} {_fmt(v)}\n")
    return 0


def _interval_aux(kind: Kind, j):
    if kind is Kind.BUCKLING:
        return np.where(j % 2 == 0, interval._gamma(j)[1], np.nan)
    if kind is Kind.BILAPLACIAN:
        return interval.bilaplacian_s(j)
    return np.full(j.size, np.nan)


def _grid(cfg: RunConfig) -> np.ndarray:
    lo = max(1.0, cfg.z_max / 1e4)
    return np.geomspace(lo, cfg.z_max, cfg.points) * (1 - 1e-9)


def _emit_table(cfg, out, header, cols):
    if cfg.output == "csv":
        out.write(",".join(header) + "\n")
        for row in zip(*cols):
            out.write(",".join(_fmt(v) for v in row) + "\n")
    elif cfg.output == "json":
        out.write(to_json({"schema": SCHEMA, "columns": header,
                           "rows": [list(r) for r in zip(*cols)]}) + "\n")
    else:
        for row in zip(cols[0], cols[1]):
            out.write(f"{_fmt(row[0])} {_fmt(row[1])}\n")


def cmd_counting(cfg: RunConfig, out) -> int:
    spec = _spectrum(cfg, cfg.kind, cfg.z_max)
    z = _grid(cfg)
    n = spec.count_below(z)
    cols = [z, n]
    header = ["z", "N"]
    if cfg.kind is Kind.BUCKLING:
        cols.append(riesz.weyl_two_term_model(_model(cfg), z)[0])
        header.append("N_model")
    _emit_table(cfg, out, header, cols)
    return 0


def cmd_riesz(cfg: RunConfig, out) -> int:
    spec = _spectrum(cfg, cfg.kind, cfg.z_max)
    z = _grid(cfg)
    r = riesz.riesz_mean(spec, cfg.p, z)
    cols, header = [z, r], ["z", f"R_{_fmt(cfg.p)}"]
    if cfg.kind is Kind.BUCKLING and cfg.p == 1:
        cols.append(riesz.weyl_two_term_model(_model(cfg), z)[1])
        header.append("R1_model")
    _emit_table(cfg, out, header, cols)
    return 0


def _require(rep: BoundReport, rel: float) -> BoundReport:
    """Tighten a report: pass only with margin >= rel * max(|lhs|, |rhs|)."""
    if rel <= 0:
        return rep
    need = rel * max(abs(rep.lhs), abs(rep.rhs))
    rep.passed = rep.passed and rep.margin >= need
    return rep


def interval_battery(j_max: int, length: float = 1.0) -> list[BoundReport]:
    """Payne family, chain, 1D equality cases, corollaries, BLY and sum bounds on (0, L)."""
    n = j_max + 1
    sig = Spectrum(interval.first_n(Kind.BUCKLING, n, length), np.ones(n, dtype=np.int64), math.inf)
    lam = Spectrum(interval.first_n(Kind.LAPLACIAN, n + 1, length), np.ones(n + 1, dtype=np.int64), math.inf)
    lam_all = Spectrum(interval.first_n(Kind.BILAPLACIAN, n, length), np.ones(n, dtype=np.int64), math.inf)
    R = riesz.Relation
    reps = []
    reps.append(riesz.chain_and_payne_checks(sig, lam, lam_all, R.PAYNE))
    reps.append(riesz.chain_and_payne_checks(sig, lam, lam_all, R.PAYNE2))
    for j in range(1, j_max + 1):
        reps.append(riesz.chain_and_payne_checks(sig, lam, lam_all, R.CHAIN, j, strict=True))
        reps.append(riesz.chain_and_payne_checks(sig, lam, lam_all, R.STRICT_PRODUCT, j))
        reps.append(riesz.chain_and_payne_checks(sig, lam, lam_all, R.GENERALIZED_PAYNE, j))
        reps.append(riesz.chain_and_payne_checks(sig, lam, lam_all, R.SHIFTED_DIRICHLET, j))
        # sigma_1 = lambda_2 exactly in 1D, so only k >= 2 is strict
        reps.append(riesz.chain_and_payne_checks(sig, lam, lam_all, R.PARTIAL_SUMS, j, strict=j >= 2))
        if j % 2 == 0:
            reps.append(interval.sj_lt_half_tj(j))
    model = riesz.WeylModel.interval(length)
    # corollaries need every sigma below z and Lambda below z^2
    zc = [z for z in (1e2, 1e3, 1e4) if z < sig.values[-1] and z * z < lam_all.values[-1]]
    sig_c = sig.restrict(sig.values[-1])
    lam_c = lam.restrict(lam.values[-1])
    big_c = lam_all.restrict(lam_all.values[-1])
    for z in zc:
        for k in (1, 5, 25, 100):
            if k + 1 <= sig_c.total and k <= big_c.total:
                reps.append(riesz.corollary_checks(sig_c, lam_c, big_c, z, k))
    z_top = sig.values[-1]
    for z in riesz.dyadic_grid(1.0, z_top):
        reps.append(riesz.bly_upper_check(sig_c, model, z))
    for k in range(1, sig.total + 1):
        reps.append(riesz.sum_lower_check(sig, model, k))
    return reps


def ball_battery(d: int, z_max: float) -> list[BoundReport]:
    """BLY, sum bound, lambda_j <= sigma_j, Payne equality and counting identities on the ball."""
    sig = ball.ball_spectrum(d, Kind.BUCKLING, z_max)
    lam = ball.ball_spectrum(d, Kind.LAPLACIAN, z_max)
    model = riesz.WeylModel.unit_ball(d)
    R = riesz.Relation
    reps = [riesz.bly_upper_check(sig, model, z) for z in riesz.dyadic_grid(1.0, z_max)]
    for k in range(1, min(10_000, sig.total) + 1):
        reps.append(riesz.sum_lower_check(sig, model, k))
    reps.append(riesz.chain_and_payne_checks(sig, lam, None, R.PAYNE2, rel_tol=1e-12))
    for j in range(1, min(sig.total, lam.total) + 1):
        reps.append(riesz.chain_and_payne_checks(sig, lam, None, R.DIRICHLET_BELOW_BUCKLING, j))
    for z in np.geomspace(10.0, z_max, 16) * (1 - 1e-9):
        gap = ball.counting_identity_gap(d, z)
        reps.append(BoundReport("counting_identity", float(gap), 0.0, -abs(gap), gap == 0, {"z": float(z), "d": d}))
    return reps


def cmd_verify(cfg: RunConfig, out) -> int:
    if cfg.domain == "interval":
        reps = interval_battery(cfg.j_max, cfg.length)
    else:
        reps = ball_battery(cfg.d, cfg.z_max)
    reps = [_require(r, cfg.require_margin) for r in reps]
    failed = [r for r in reps if not r.passed]
    doc = {"schema": SCHEMA, "domain": cfg.domain, "checks": len(reps), "failures": len(failed),
           "reports": [r.as_dict() for r in reps]}
    out.write(to_json(doc) + "\n")
    log.info("%d checks, %d failures", len(reps), len(failed))
    return 1 if failed else 0


def cmd_asymptotics(cfg: RunConfig, out) -> int:
    model = _model(cfg)
    spec = _spectrum(cfg, Kind.BUCKLING, cfg.z_max * (1 + 1e-9) + 1)
    target = "R1" if cfg.domain == "interval" else "N"
    z_lo = cfg.z_max / 100
    fit = riesz.asymptotic_fit(spec, model, z_lo, cfg.z_max, cfg.windows, target)
    second = -model.c1 if target == "N" else -2.0 / (model.d + 1) * model.c1
    print(f"c1_hat = {fit.c1_hat:.8f} (model {second:.8f}) over [{z_lo:g}, {cfg.z_max:g}]", file=sys.stderr)
    z = riesz.dyadic_grid(1.0, cfg.z_max)
    n = spec.count_below(z)
    r1 = riesz.riesz_mean_fast(spec, 1, z)
    n_mod, r1_mod = riesz.weyl_two_term_model(model, z)
    if cfg.output == "json":
        out.write(to_json({"schema": SCHEMA, "domain": cfg.domain, "d": model.d, "target": target,
                           "c0": model.c0, "c0_hat": fit.c0_hat, "c1_model": second,
                           "c1_hat": fit.c1_hat, "window": list(fit.window),
                           "residual_rms": fit.residual_rms}) + "\n")
    elif cfg.output == "csv":
        _emit_table(cfg, out, ["z", "N", "N_model", "R1", "R1_model", "N_remainder", "R1_remainder"],
                    [z, n, n_mod, r1, r1_mod, n - n_mod, r1 - r1_mod])
    else:
        for a, b in zip(fit.centers, fit.means):
            out.write(f"{_fmt(a)} {_fmt(b)}\n")
    return 0


def cmd_avp(cfg: RunConfig, out) -> int:
    summ = run_suite(cfg.n_models, cfg.d, cfg.seed, cfg.n_trials)
    out.write(to_json({"schema": SCHEMA, **summ.as_dict()}) + "\n")
    return 1 if summ.failures else 0


COMMANDS = {"spectrum": cmd_spectrum, "counting": cmd_counting, "riesz": cmd_riesz,
            "verify": cmd_verify, "asymptotics": cmd_asymptotics, "avp": cmd_avp}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="specbuckle", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--domain", choices=["ball", "interval"], default="ball")
    common.add_argument("--dim", type=int, default=None)
    common.add_argument("--kind", choices=["buckling", "laplacian", "bilaplacian"], default="buckling")
    common.add_argument("--length", type=float, default=1.0, help="interval length or ball radius")
    common.add_argument("--z-max", type=float, default=1e4)
    common.add_argument("--p", type=float, default=1.0)
    common.add_argument("--j-max", "--jmax", dest="j_max", type=int, default=500)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--windows", type=int, default=8)
    common.add_argument("--points", type=int, default=64)
    common.add_argument("--format", choices=["csv", "json", "plotdata"], default=None)
    common.add_argument("--out", default=None)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "avp":
            sp.add_argument("--n-models", type=int, default=1000)
            sp.add_argument("--n-trials", type=int, default=None)
        if name == "verify":
            sp.add_argument("--require-margin", type=float, default=0.0,
                            help="demand margin >= X * max(|lhs|, |rhs|) for every check")
    return p


def config_from_args(ns) -> RunConfig:
    default_fmt = "json" if ns.command in ("verify", "avp") else "csv"
    d = ns.dim
    if d is None:
        d = 50 if ns.command == "avp" else (1 if ns.domain == "interval" else 2)
    cfg = RunConfig(command=ns.command, domain=ns.domain, d=d, length=ns.length,
                    kind=Kind.parse(ns.kind), z_max=ns.z_max, p=ns.p, j_max=ns.j_max, seed=ns.seed,
                    windows=ns.windows, output=ns.format or default_fmt, out_path=ns.out,
                    points=ns.points, n_models=getattr(ns, "n_models", 1000),
                    n_trials=getattr(ns, "n_trials", None),
                    require_margin=getattr(ns, "require_margin", 0.0))
    if ns.domain == "interval" and ns.dim not in (None, 1) and ns.command != "avp":
        raise UsageError("interval domain is one-dimensional")
    if ns.command != "avp":
        cfg.validate()
    elif cfg.d < 1 or cfg.n_models < 1:
        raise UsageError("--dim and --n-models must be positive")
    return cfg


def run(cfg: RunConfig) -> int:
    fn = COMMANDS[cfg.command]
    if cfg.out_path:
        with open(cfg.out_path, "w", newline="") as fh:
            return fn(cfg, fh)
    return fn(cfg, sys.stdout)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
        return run(cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"specbuckle: error: {exc}", file=sys.stderr)
        return 2
    except SpecbuckleError as exc:
        print(f"specbuckle: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
