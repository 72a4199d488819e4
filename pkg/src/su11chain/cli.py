"""Command-line front end: every subcommand writes one deterministic table."""

from __future__ import annotations

import functools
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import __version__
from . import density as dens
from . import ed_oracle as ed
from . import entanglement as ent
from . import special_fns as sf
from . import thermo
from .errors import (
    ClassificationAmbiguous,
    DegenerateGroundState,
    DomainError,
    EigensolverFailure,
    ExpansionOrderUndetected,
    NonMonotoneDispersion,
    OracleMismatch,
    PoleError,
    QuadratureNonConvergence,
    SizeCapExceeded,
)
from .model import HS, XX, ChainSpec, Elliptic, Regime, critical_point, dispersion
from .sweep import SweepResult

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_ORACLE = 4

CACHE_ENV = "SU11CHAIN_CACHE_DIR"
CALIBRATION_NAME = "calibration.txt"

_NUMERIC = (QuadratureNonConvergence, EigensolverFailure, ExpansionOrderUndetected, NonMonotoneDispersion,
            ClassificationAmbiguous, DegenerateGroundState)
_VALIDATION = (DomainError, PoleError, SizeCapExceeded, ValueError)


class GridType(click.ParamType):
    """``start:stop:count[:log|lin]`` (linear spacing by default)."""

    name = "grid"

    def convert(self, value, param, ctx):
        if isinstance(value, np.ndarray):
            return value
        parts = str(value).split(":")
        try:
            if len(parts) not in (3, 4):
                raise ValueError
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            spacing = parts[3] if len(parts) == 4 else "lin"
        except ValueError:
            self.fail(f"{value!r} is not of the form start:stop:count[:log|lin]", param, ctx)
        if count < 1:
            self.fail("grid count must be at least 1", param, ctx)
        if spacing == "log":
            if start <= 0 or stop <= 0:
                self.fail("log grids need positive endpoints", param, ctx)
            return np.geomspace(start, stop, count)
        if spacing != "lin":
            self.fail(f"unknown spacing {spacing!r}", param, ctx)
        return np.linspace(start, stop, count)


GRID = GridType()


def _interaction(model, alpha):
    if model == "elliptic":
        if alpha is None:
            raise click.UsageError("--alpha is required for the elliptic model")
        if not alpha > 0:
            raise click.BadParameter("alpha must be positive", param_hint="--alpha")
        return Elliptic(alpha)
    if alpha is not None:
        raise click.UsageError("--alpha applies only to the elliptic model")
    return XX() if model == "xx" else HS()


def _one_of(scalar, grid, name, required=True):
    if scalar is not None and grid is not None:
        raise click.UsageError(f"--{name} and --{name}-grid are mutually exclusive")
    if scalar is None and grid is None:
        if required:
            raise click.UsageError(f"one of --{name} or --{name}-grid is required")
        return None
    return np.atleast_1d(np.asarray(scalar if grid is None else grid, dtype=float))


def _emit(result: SweepResult, ctx):
    obj = ctx.find_root().obj
    text = result.render(obj["format"])
    out = obj["out"]
    if out is None or out == "-":
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


def _base_meta(ctx, **extra):
    meta = {"version": __version__, "command": ctx.info_name}
    for k, v in ctx.params.items():
        if v is None:
            continue
        if isinstance(v, np.ndarray):
            v = ";".join("%.17g" % x for x in v)
        meta[f"option.{k}"] = v
    meta.update(extra)
    return meta


def _guarded(fn):
    """Map library exceptions onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except OracleMismatch as exc:
            click.echo(f"oracle mismatch: {exc}", err=True)
            sys.exit(EXIT_ORACLE)
        except _NUMERIC as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(EXIT_NUMERIC)
        except _VALIDATION as exc:
            click.echo(f"invalid input: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)

    return wrapper


def model_options(fn):
    fn = click.option("--alpha", type=float, default=None, help="Elliptic range parameter (alpha > 0).")(fn)
    fn = click.option("--model", type=click.Choice(["elliptic", "xx", "hs"]), required=True,
                      help="Interaction: elliptic, xx (alpha -> 0) or hs (alpha -> infinity).")(fn)
    return fn


def _threads(ctx):
    return ctx.find_root().obj["threads"]


def cache_dir():
    path = os.environ.get(CACHE_ENV)
    return Path(path) if path else None


def _calibration_table(path):
    if path is None:
        cdir = cache_dir()
        if cdir is None or not (cdir / CALIBRATION_NAME).exists():
            return None
        path = cdir / CALIBRATION_NAME
    return ent.read_calibration(path)


@click.group()
@click.option("--out", "-o", default=None, help="Output file (default: stdout).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True,
              help="Worker threads for grid sweeps; output order is unaffected.")
@click.version_option(__version__, prog_name="su11chain")
@click.pass_context
def main(ctx, out, fmt, threads):
    """Dispersion, thermodynamics, entanglement and density of su(1|1) chains."""
    ctx.obj = {"out": out, "format": fmt, "threads": threads}


@main.command("dispersion")
@model_options
@click.option("--points", type=click.IntRange(min=2), default=513, show_default=True,
              help="Number of momenta on [0, 2 pi].")
@click.pass_context
@_guarded
def cmd_dispersion(ctx, model, alpha, points):
    """Tabulate p, E(p), E'(p) on [0, 2 pi]."""
    disp = dispersion(_interaction(model, alpha))
    res = SweepResult(("p", "E", "dE_dp"), metadata=_base_meta(
        ctx, e_pi=disp.e_pi, kappa=disp.kappa, a=disp.a_coef, nu=disp.nu, b=disp.b_coef))
    p = np.linspace(0.0, 2.0 * math.pi, points)
    for pi_, e, d in zip(p, disp(p), disp.deriv(p)):
        res.add(pi_, e, d)
    _emit(res, ctx)


@main.command("free-energy")
@model_options
@click.option("--lambda", "lam", type=float, required=True, help="Chemical potential.")
@click.option("--temp", type=float, default=None, help="Single temperature.")
@click.option("--temp-grid", type=GRID, default=None, help="start:stop:count[:log|lin].")
@click.option("--fit-c", is_flag=True, help="Also fit the central charge on the low-T window.")
@click.option("--fit-window", type=float, default=thermo.FIT_WINDOW, show_default=True,
              help="Upper end of the fit window in units of E(pi).")
@click.pass_context
@_guarded
def cmd_free_energy(ctx, model, alpha, lam, temp, temp_grid, fit_c, fit_window):
    """Free energy per site f(T) with its decomposition f0 + f1 + f2."""
    temps = _one_of(temp, temp_grid, "temp")
    if np.any(temps <= 0):
        raise click.BadParameter("temperatures must be positive", param_hint="--temp")
    inter = _interaction(model, alpha)
    disp = dispersion(inter)
    spec = ChainSpec(inter, None, lam)
    extra = {"regime": critical_point(spec, disp).regime.value}
    if fit_c:
        top = fit_window * disp.e_pi
        fit = thermo.fit_central_charge(spec, disp, np.geomspace(top / 10.0, top, 8), threads=_threads(ctx))
        extra.update(c_hat=fit.c_hat, c_fit_residual=fit.residual, v_used=fit.v_used)
    res = SweepResult(("T", "f", "f0", "f1", "f2"), metadata=_base_meta(ctx, **extra))
    for r in thermo.free_energy_sweep(spec, disp, temps, threads=_threads(ctx)):
        res.add(r.temperature, r.f, r.f0, r.f1, r.f2)
    _emit(res, ctx)


@main.command("entropy")
@model_options
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--lambda-grid", type=GRID, default=None)
@click.option("--block-size", type=click.IntRange(min=1), default=None, help="Block length L.")
@click.option("--block-grid", type=GRID, default=None, help="Block lengths (rounded to integers).")
@click.option("--renyi", type=click.FloatRange(min=0, min_open=True), default=1.0, show_default=True)
@click.option("--calibration", type=click.Path(exists=True, dir_okay=False), default=None,
              help="File of gamma1[q]=value lines for the asymptotic intercept.")
@click.pass_context
@_guarded
def cmd_entropy(ctx, model, alpha, lam, lambda_grid, block_size, block_grid, renyi, calibration):
    """Exact and asymptotic block entropies versus L or lambda."""
    lams = _one_of(lam, lambda_grid, "lambda")
    if block_grid is not None:
        block_grid = np.unique(np.rint(block_grid).astype(int))
    Ls = _one_of(block_size, block_grid, "block")
    if len(lams) > 1 and len(Ls) > 1:
        raise click.UsageError("sweep either lambda or the block length, not both")
    if np.any(Ls < 1) or np.any(Ls > ent.L_CAP):
        raise click.BadParameter(f"block lengths must lie in 1..{ent.L_CAP}", param_hint="--block-size")
    inter = _interaction(model, alpha)
    disp = dispersion(inter)
    gamma1 = ent.lookup_gamma1(_calibration_table(calibration), renyi)
    res = SweepResult(("lambda", "L", "p0", "S_exact", "S_asymptotic"),
                      metadata=_base_meta(ctx, gamma1=gamma1 if gamma1 is not None else "uncalibrated"))
    jobs = [(float(l), int(L)) for l in lams for L in Ls]

    def run(job):
        lam_, L = job
        cp = critical_point(ChainSpec(inter, None, lam_), disp)
        if cp.regime is not Regime.CRITICAL:
            return lam_, L, float("nan") if cp.p0 is None else cp.p0, 0.0, float("nan")
        r = ent.block_entropy(cp.p0, L, renyi, gamma1)
        return lam_, L, cp.p0, r.S_exact, r.S_asymptotic

    for row in _map(run, jobs, _threads(ctx)):
        res.add(*row)
    _emit(res, ctx)


def _map(fn, jobs, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


@main.command("density")
@model_options
@click.option("--lambda", "lam", type=float, default=None)
@click.option("--lambda-grid", type=GRID, default=None)
@click.option("--temp", type=float, default=None)
@click.option("--temp-grid", type=GRID, default=None)
@click.pass_context
@_guarded
def cmd_density(ctx, model, alpha, lam, lambda_grid, temp, temp_grid):
    """Fermion density n_f and dn_f/dT on a (lambda, T) grid."""
    lams = _one_of(lam, lambda_grid, "lambda")
    temps = _one_of(temp, temp_grid, "temp")
    if np.any(temps < 0):
        raise click.BadParameter("temperatures must be nonnegative", param_hint="--temp")
    inter = _interaction(model, alpha)
    disp = dispersion(inter)
    pts = dens.density_grid(ChainSpec(inter, None, 0.0), disp, lams, temps, threads=_threads(ctx))
    res = SweepResult(("lambda", "T", "n_f", "dn_dT"), metadata=_base_meta(ctx, e_pi=disp.e_pi))
    for p in pts:
        res.add(p.lam, p.T, p.n_f, float("nan") if p.dn_dT is None else p.dn_dT)
    _emit(res, ctx)


@main.command("phase-map")
@model_options
@click.option("--t-max", type=float, default=None, help="Upper temperature (default 10 E(pi)).")
@click.option("--lambda-points", type=click.IntRange(min=4), default=400, show_default=True)
@click.option("--classes", "show_classes", is_flag=True, help="Emit the class of every lambda instead of the curve.")
@click.pass_context
@_guarded
def cmd_phase_map(ctx, model, alpha, t_max, lambda_points, show_classes):
    """lambda_1..3 and samples of the curve dn_f/dT = 0."""
    inter = _interaction(model, alpha)
    disp = dispersion(inter)
    em = dens.extrema_map(ChainSpec(inter, None, 0.0), disp, T_max=t_max, n_lambda=lambda_points,
                          threads=_threads(ctx), curve=not show_classes)
    meta = _base_meta(ctx, lambda1=em.lambda1, lambda2=em.lambda2, lambda3=em.lambda3, e_pi=em.e_pi,
                      class_sequence="-".join(c.roman for c in em.class_sequence))
    if show_classes:
        res = SweepResult(("lambda", "class"), metadata=meta)
        for l, c in zip(em.lambdas, em.classes):
            res.add(l, c.roman)
    else:
        res = SweepResult(("lambda", "T_extremum"), metadata=meta)
        for l, t in em.curve:
            res.add(l, t)
    _emit(res, ctx)


@main.command("verify")
@click.option("--sites", type=click.IntRange(2, ed.MAX_SITES), default=6, show_default=True,
              help="Largest chain for the fermionization checks.")
@click.option("--tol", type=float, default=1e-10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
@_guarded
def cmd_verify(ctx, sites, tol, seed):
    """Cross-check independent routes; exit code 4 if any check fails."""
    rng = np.random.default_rng(seed)
    res = SweepResult(("check", "case", "value", "tolerance", "pass"), metadata=_base_meta(ctx))
    failed = []

    def record(check, case, value, tolerance):
        ok = bool(value <= tolerance)
        res.add(check, case, value, tolerance, ok)
        if not ok:
            failed.append(f"{check}[{case}]")

    for n in range(2, sites + 1):
        alpha = float(rng.uniform(0.5, 5.0))
        spec = ChainSpec(Elliptic(alpha), n, float(rng.uniform(-0.5, 1.2)) * dispersion(Elliptic(alpha)).e_pi)
        rep = ed.fermionization_report(spec)
        record("fermionization", f"N={n} alpha={alpha:.6f} lambda={spec.lam:.6f}",
               max(rep.entrywise, rep.spin_vs_modes, rep.fermion_vs_modes, rep.commutator), tol)
    for alpha in (0.5, 1.0, 5.0, 20.0):
        lat = sf.Lattice.from_alpha(alpha)
        resid = abs(lat.eta1 * lat.omega3_imag + lat.omega1 * sf.imag_axis_zeta(lat) - math.pi / 2)
        record("legendre", f"alpha={alpha:g}", resid, 1e-12)
    for p0, L in ((0.3, 40), (math.pi / 2, 101), (2.9, 64)):
        mu = ent.correlation_spectrum(p0, L)
        record("trace", f"p0={p0:.6f} L={L}", abs(mu.trace - L * p0 / math.pi), 1e-8)
    _emit(res, ctx)
    if failed:
        raise OracleMismatch("failed checks: " + ", ".join(failed))


@main.command("calibrate")
@click.option("--renyi", "qs", type=float, multiple=True, default=(0.5, 1.0, 2.0, 3.0), show_default=True)
@click.option("--block-grid", type=GRID, default="500:2000:3:log", show_default=True)
@click.option("--write", "write_path", type=click.Path(dir_okay=False), default=None,
              help=f"Calibration file to write (default: ${CACHE_ENV}/{CALIBRATION_NAME} if set).")
@click.pass_context
@_guarded
def cmd_calibrate(ctx, qs, block_grid, write_path):
    """Fit the entropy intercept gamma1[q] from exact spectra at p0 = pi/2."""
    Ls = tuple(int(L) for L in np.unique(np.rint(block_grid).astype(int)))
    res = SweepResult(("q", "gamma1", "spread"), metadata=_base_meta(ctx))
    entries = {}
    for q in sorted(set(qs)):
        cal = ent.calibrate_gamma1(q, Ls)
        entries[q] = cal.gamma1
        res.add(q, cal.gamma1, cal.spread)
    target = write_path
    if target is None and cache_dir() is not None:
        cache_dir().mkdir(parents=True, exist_ok=True)
        target = cache_dir() / CALIBRATION_NAME
    if target is not None:
        ent.write_calibration(target, entries)
    _emit(res, ctx)


if __name__ == "__main__":
    main()
