"""Free energy per site, its low-temperature asymptotics, and central-charge fits."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad

from . import special_fns as sf
from .errors import QuadratureNonConvergence
from .model import ChainSpec, CriticalPoint, Dispersion, Regime, critical_point, fermi_momentum, mode_energies

QUAD_EPSABS = 1e-12
QUAD_LIMIT = 400
FIT_WINDOW = 0.05


def softplus_neg(x):
    """``log(1 + exp(-x))`` without overflow."""
    x = np.asarray(x, dtype=float)
    return np.maximum(0.0, -x) + np.log1p(np.exp(-np.abs(x)))


def fermi_breakpoints(disp: Dispersion, lam, T, p0=None):
    """Momenta where ``|E(p) - lam|`` equals ``0, T, 4T, 16T, 64T``.

    Splitting the integration range there keeps the adaptive rule from
    missing the width-``T`` feature around the Fermi point.
    """
    pts = set()
    if p0 is not None and 0.0 < p0 < math.pi:
        pts.add(p0)
    for k in (1.0, 4.0, 16.0, 64.0):
        for level in (lam - k * T, lam + k * T):
            if 0.0 < level < disp.e_pi:
                pts.add(fermi_momentum(disp, level))
    return sorted(pts)


def integrate(fn, a, b, points=(), epsabs=QUAD_EPSABS, what="integral"):
    """Adaptive Gauss-Kronrod on ``[a, b]`` split at ``points``; raises on failure."""
    edges = [a] + [p for p in points if a < p < b] + [b]
    total = 0.0
    err = 0.0
    share = epsabs / max(1, len(edges) - 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        out = quad(fn, lo, hi, epsabs=share, epsrel=1e-13, limit=QUAD_LIMIT, full_output=1)
        val, e, info = out[0], out[1], out[2]
        if len(out) > 3 and e > share:
            raise QuadratureNonConvergence(e, share, f"{what} on [{lo:.6g}, {hi:.6g}]: {out[3][:80]}")
        total += val
        err += e
    return total, err


@dataclass(frozen=True)
class FreeEnergyResult:
    temperature: float
    f: float
    f0: float
    f1: float
    f2: float
    error: float = 0.0


def ground_state_energy(disp: Dispersion, cp: CriticalPoint, lam):
    """``f0 = (1/pi) int_0^p0 (E - lam) dp`` (zero when nothing is filled)."""
    p0 = _filled_momentum(cp)
    if p0 == 0.0:
        return 0.0
    val, _ = integrate(lambda p: disp(p) - lam, 0.0, p0, what="f0")
    return val / math.pi


def _filled_momentum(cp: CriticalPoint):
    if cp.regime in (Regime.BELOW, Regime.LOWER_ENDPOINT):
        return 0.0
    if cp.regime in (Regime.ABOVE, Regime.UPPER_ENDPOINT):
        return math.pi
    return cp.p0


def free_energy(spec: ChainSpec, disp: Dispersion, T, cp: Optional[CriticalPoint] = None) -> FreeEnergyResult:
    """Free energy per site in the thermodynamic limit at temperature ``T``.

    ``f`` is integrated directly; ``f0``, ``f1`` (holes below the Fermi point)
    and ``f2`` (particles above it) are integrated separately so their sum
    doubles as an accuracy check.
    """
    if not T > 0:
        raise ValueError(f"temperature must be positive, got {T}")
    lam = spec.lam
    cp = cp or critical_point(spec, disp)
    p0 = _filled_momentum(cp)
    beta = 1.0 / T
    pts = fermi_breakpoints(disp, lam, T, p0)

    f_int, e_f = integrate(lambda p: softplus_neg(beta * (disp(p) - lam)), 0.0, math.pi, pts, what="f")
    f0 = ground_state_energy(disp, cp, lam)
    f1 = f2 = 0.0
    err = e_f
    if p0 > 0.0:
        v, e = integrate(lambda p: softplus_neg(beta * (lam - disp(p))), 0.0, p0, pts, what="f1")
        f1 = -T * v / math.pi
        err += e
    if p0 < math.pi:
        v, e = integrate(lambda p: softplus_neg(beta * (disp(p) - lam)), p0, math.pi, pts, what="f2")
        f2 = -T * v / math.pi
        err += e
    return FreeEnergyResult(T, -T * f_int / math.pi, f0, f1, f2, T * err / math.pi)


def free_energy_sweep(spec, disp, temps: Sequence[float], threads: int = 1):
    """``free_energy`` over a temperature grid; order of results follows ``temps``."""
    cp = critical_point(spec, disp)
    run = lambda T: free_energy(spec, disp, float(T), cp)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(run, temps))
    return [run(T) for T in temps]


def finite_chain_free_energy(spec: ChainSpec, T):
    """``-(T/N) sum_l log(1 + exp(-(eps_N(l) - lam)/T))`` from the mode energies."""
    eps = mode_energies(spec)
    return float(-T * np.mean(softplus_neg((eps - spec.lam) / T)))


# --------------------------------------------------------------------------
# low-temperature asymptotics
# --------------------------------------------------------------------------


def endpoint_coefficient(order, scale):
    """``(scale/pi)(1 - 2^(-1/order)) Gamma(1 + 1/order) zeta(1 + 1/order)``."""
    s = 1.0 / order
    return scale / math.pi * (1.0 - 2.0**-s) * sf.gamma_fn(1.0 + s) * sf.riemann_zeta(1.0 + s)


@dataclass(frozen=True)
class LowTPrediction:
    """``f(T) ~ f0 - coefficient * T**exponent`` as ``T -> 0``."""

    regime: Regime
    exponent: float
    coefficient: float
    f0: float
    critical: bool

    def __call__(self, T):
        return self.f0 - self.coefficient * np.asarray(T, dtype=float) ** self.exponent


def low_T_expansion(spec: ChainSpec, disp: Dispersion) -> LowTPrediction:
    cp = critical_point(spec, disp)
    f0 = ground_state_energy(disp, cp, spec.lam)
    if cp.regime is Regime.CRITICAL:
        return LowTPrediction(cp.regime, 2.0, math.pi / (6.0 * cp.v), f0, True)
    if cp.regime is Regime.LOWER_ENDPOINT:
        k = disp.kappa
        return LowTPrediction(cp.regime, 1.0 + 1.0 / k, endpoint_coefficient(k, disp.a_coef), f0, k == 1)
    if cp.regime is Regime.UPPER_ENDPOINT:
        n = disp.nu
        return LowTPrediction(cp.regime, 1.0 + 1.0 / n, endpoint_coefficient(n, disp.b_coef), f0, False)
    raise ValueError(f"no power-law expansion in the gapped regime {cp.regime.value}")


@dataclass(frozen=True)
class CentralChargeFit:
    c_hat: float
    v_used: float
    T_grid: tuple
    residual: float
    slope_correction: float


def default_fit_grid(disp: Dispersion, n=8):
    top = FIT_WINDOW * disp.e_pi
    return tuple(np.geomspace(top / 10.0, top, n))


def fit_central_charge(spec: ChainSpec, disp: Dispersion, T_grid=None, threads: int = 1) -> CentralChargeFit:
    """Fit ``(f - f0)/T^2 = -pi c/(6 v) + d T`` by least squares.

    At the lower endpoint of a chain with ``E'(0) != 0`` the same form applies
    with ``v = E'(0)``.
    """
    cp = critical_point(spec, disp)
    if cp.regime is Regime.CRITICAL:
        v = cp.v
    elif cp.regime is Regime.LOWER_ENDPOINT and disp.kappa == 1:
        v = float(disp.deriv(0.0))
    else:
        raise ValueError(f"central charge is defined only at critical points, got {cp.regime.value}")
    temps = tuple(float(t) for t in (T_grid if T_grid is not None else default_fit_grid(disp)))
    if len(temps) < 6 or min(temps) <= 0:
        raise ValueError("central-charge fit needs at least 6 positive temperatures")
    res = free_energy_sweep(spec, disp, temps, threads)
    T = np.array(temps)
    y = np.array([(r.f - r.f0) / r.temperature**2 for r in res])
    design = np.column_stack([np.full_like(T, -math.pi / (6.0 * v)), T])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.sqrt(np.mean((design @ coef - y) ** 2)))
    return CentralChargeFit(float(coef[0]), v, temps, resid, float(coef[1]))


def fit_power_law(T, values):
    """Least-squares ``log|values| = log(coef) + exponent * log T``; returns ``(exponent, coef)``."""
    x = np.log(np.asarray(T, dtype=float))
    y = np.log(np.abs(np.asarray(values, dtype=float)))
    slope, icpt = np.polyfit(x, y, 1)
    return float(slope), float(math.exp(icpt))
