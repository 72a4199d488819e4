"""Fermion density at zero and finite temperature, and the extremum structure of n_f(T)."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import expit

from . import special_fns as sf
from .errors import ClassificationAmbiguous
from .model import ChainSpec, Dispersion, Regime, critical_point, fermi_momentum, occupied_fraction
from .thermo import fermi_breakpoints, fit_power_law, integrate


@dataclass(frozen=True)
class DensityPoint:
    lam: float
    T: float
    n_f: float
    dn_dT: Optional[float] = None


def density(spec: ChainSpec, disp: Dispersion, T, with_derivative=False) -> DensityPoint:
    """Mean occupation per site; ``T = 0`` uses the filled fraction of the Fermi sea."""
    lam = spec.lam
    if T < 0:
        raise ValueError(f"temperature must be nonnegative, got {T}")
    if T == 0:
        return DensityPoint(lam, 0.0, occupied_fraction(critical_point(spec, disp)))
    beta = 1.0 / T
    cp = critical_point(spec, disp)
    pts = fermi_breakpoints(disp, lam, T, cp.p0)
    val, _ = integrate(lambda p: expit(-beta * (disp(p) - lam)), 0.0, math.pi, pts, what="n_f")
    n = min(max(val / math.pi, 0.0), 1.0)
    d = density_T_derivative(spec, disp, T) if with_derivative else None
    return DensityPoint(lam, float(T), n, d)


def _sech2_half(x):
    """``sech^2(x/2)`` without overflow."""
    e = np.exp(-np.abs(x))
    return 4.0 * e / (1.0 + e) ** 2


def density_T_derivative(spec: ChainSpec, disp: Dispersion, T):
    """``dn_f/dT = (1/(4 pi T)) int_0^pi x sech^2(x/2) dp`` with ``x = (E - lam)/T``."""
    if not T > 0:
        raise ValueError(f"temperature must be positive, got {T}")
    lam = spec.lam
    beta = 1.0 / T
    cp = critical_point(spec, disp)
    pts = fermi_breakpoints(disp, lam, T, cp.p0)

    def f(p):
        x = beta * (disp(p) - lam)
        return x * _sech2_half(x)

    val, _ = integrate(f, 0.0, math.pi, pts, epsabs=1e-12 * T, what="dn_f/dT")
    return beta * val / (4.0 * math.pi)


# --------------------------------------------------------------------------
# zero- and low-temperature closed forms
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityExpansion:
    """``n_f ~ constant + coefficient * T**exponent * exp(-gap / T)``."""

    regime: Regime
    constant: float
    coefficient: float
    exponent: float
    gap: float = 0.0

    def __call__(self, T):
        T = np.asarray(T, dtype=float)
        return self.constant + self.coefficient * T**self.exponent * np.exp(-self.gap / T)


def endpoint_density_coefficient(order, scale):
    """``(scale/pi) Gamma(1 + 1/order) eta(1/order)``.

    For ``order = 1`` this is ``log 2 * scale / pi``; for larger orders
    ``eta(1/order) = (1 - 2^(1 - 1/order)) zeta(1/order)``.
    """
    s = 1.0 / order
    return scale / math.pi * sf.gamma_fn(1.0 + s) * sf.dirichlet_eta(s)


def t2_coefficient(disp: Dispersion, p0):
    """Coefficient ``-pi E''(p0) / (6 v^3)`` of the ``T^2`` term inside the critical interval."""
    v = disp.deriv(p0)
    return -math.pi * disp.second_deriv(p0) / (6.0 * v**3)


def low_T_density(spec: ChainSpec, disp: Dispersion) -> DensityExpansion:
    cp = critical_point(spec, disp)
    lam = spec.lam
    k, a, nu, b = disp.kappa, disp.a_coef, disp.nu, disp.b_coef
    if cp.regime is Regime.CRITICAL:
        return DensityExpansion(cp.regime, cp.p0 / math.pi, t2_coefficient(disp, cp.p0), 2.0)
    if cp.regime is Regime.BELOW:
        return DensityExpansion(cp.regime, 0.0, a / math.pi * sf.gamma_fn(1.0 + 1.0 / k), 1.0 / k, -lam)
    if cp.regime is Regime.ABOVE:
        coef = -b / math.pi * sf.gamma_fn(1.0 + 1.0 / nu)
        return DensityExpansion(cp.regime, 1.0, coef, 1.0 / nu, lam - disp.e_pi)
    if cp.regime is Regime.LOWER_ENDPOINT:
        return DensityExpansion(cp.regime, 0.0, endpoint_density_coefficient(k, a), 1.0 / k)
    return DensityExpansion(cp.regime, 1.0, -endpoint_density_coefficient(nu, b), 1.0 / nu)


def xx_zero_T_density(lam):
    return 2.0 / math.pi * math.asin(math.sqrt(lam) / 2.0)


def hs_zero_T_density(lam):
    return 1.0 - math.sqrt(1.0 - 2.0 * lam / math.pi**2)


def xx_t2_coefficient(lam):
    """``T^2`` coefficient of the XX density, ``-pi (2 - lam) / (6 (lam (4 - lam))^(3/2))``."""
    return -math.pi * (2.0 - lam) / (6.0 * (lam * (4.0 - lam)) ** 1.5)


def hs_t2_coefficient(lam):
    return math.pi / (6.0 * (math.pi**2 - 2.0 * lam) ** 1.5)


def fitted_t2_coefficient(spec: ChainSpec, disp: Dispersion, rel_temps=(0.01, 0.02, 0.04)):
    """Finite-difference estimate of the ``T^2`` coefficient of ``n_f``.

    ``(n_f(T) - p0/pi) / T^2`` is evaluated at ``T = rel_temps * E(pi)`` and
    extrapolated to ``T = 0`` assuming corrections in even powers of ``T``.
    """
    cp = critical_point(spec, disp)
    if cp.regime is not Regime.CRITICAL:
        raise ValueError("the T^2 law holds only inside the critical interval")
    n0 = cp.p0 / math.pi
    temps = [r * disp.e_pi for r in rel_temps]
    table = [(density(spec, disp, T).n_f - n0) / T**2 for T in temps]
    ratio = rel_temps[1] / rel_temps[0]
    order = 2
    while len(table) > 1:
        fac = ratio**order
        table = [(fac * table[i] - table[i + 1]) / (fac - 1.0) for i in range(len(table) - 1)]
        order += 2
    return table[0]


def zero_T_exponents(disp: Dispersion, rel_window=(1e-7, 1e-5), n=9):
    """Log-log slopes of ``n_f`` as ``lam -> 0+`` and of ``1 - n_f`` as ``lam -> E(pi)-``."""
    offsets = np.geomspace(*rel_window, n) * disp.e_pi
    low = [fermi_momentum(disp, d) / math.pi for d in offsets]
    high = [1.0 - fermi_momentum(disp, disp.e_pi - d) / math.pi for d in offsets]
    return fit_power_law(offsets, low)[0], fit_power_law(offsets, high)[0]


# --------------------------------------------------------------------------
# extremum structure
# --------------------------------------------------------------------------


class DensityClass(enum.IntEnum):
    MIN_ONLY = 1
    MAX_THEN_MIN = 2
    MONOTONE = 3
    MAX_ONLY = 4

    @property
    def roman(self):
        return ("i", "ii", "iii", "iv")[self.value - 1]


_PATTERNS = {
    (-1, 1): DensityClass.MIN_ONLY,
    (1, -1, 1): DensityClass.MAX_THEN_MIN,
    (1,): DensityClass.MONOTONE,
    (): DensityClass.MONOTONE,
    (1, -1): DensityClass.MAX_ONLY,
}


class DerivativeTable:
    """``dn_f/dT`` on fixed composite Gauss-Legendre rules, vectorised over ``T``.

    The dispersion is tabulated once per resolution level.  Level ``k`` is
    used for ``T >= t_min * 4**k`` and its panels span about one thermal
    width ``t_min * 4**k / max E'``, so every temperature sees a rule that
    resolves the ``sech^2`` peak without paying for the finest grid.
    """

    MIN_PANELS = 400

    def __init__(self, disp: Dispersion, t_min, order=10, max_panels=20000):
        vmax = float(np.max(np.abs(disp.deriv(np.linspace(0.0, math.pi, 513)))))
        x, w = np.polynomial.legendre.leggauss(order)
        self.levels = []
        t = float(t_min)
        while True:
            panels = int(min(max_panels, max(self.MIN_PANELS, math.ceil(math.pi * vmax / t))))
            edges = np.linspace(0.0, math.pi, panels + 1)
            half = 0.5 * np.diff(edges)
            mid = 0.5 * (edges[1:] + edges[:-1])
            nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
            weights = (half[:, None] * w[None, :]).ravel()
            self.levels.append((t, weights, disp(nodes)))
            if panels == self.MIN_PANELS:
                break
            t *= 4.0

    def __call__(self, lam, temps):
        temps = np.atleast_1d(np.asarray(temps, dtype=float))
        out = np.empty(temps.shape)
        starts = np.array([lev[0] for lev in self.levels])
        which = np.clip(np.searchsorted(starts, temps, side="right") - 1, 0, len(self.levels) - 1)
        for k in np.unique(which):
            sel = which == k
            _, weights, energy = self.levels[k]
            t = temps[sel]
            x = (energy - lam)[None, :] / t[:, None]
            out[sel] = (x * _sech2_half(x)) @ weights / (4.0 * math.pi * t)
        return out


def _collapse(seq):
    out = []
    for s in seq:
        if s and (not out or out[-1] != s):
            out.append(s)
    return out


@dataclass
class _Classifier:
    disp: Dispersion
    table: DerivativeTable
    fine_temps: np.ndarray
    mean_energy: float

    def ends(self, lam):
        p0 = fermi_momentum(self.disp, lam)
        curv = self.disp.second_deriv(p0)
        scale = self.disp.e_pi
        low = 0 if abs(curv) < 1e-9 * scale else (-1 if curv > 0 else 1)
        gap = self.mean_energy - lam
        high = 0 if abs(gap) < 1e-12 * scale else (1 if gap > 0 else -1)
        return low, high

    def _dip(self, lam, t_lo, t_hi, sign):
        """Extreme value of ``sign * dn/dT`` between two samples, located adaptively."""
        g = lambda lt: sign * float(self.table(lam, [math.exp(lt)])[0])
        res = minimize_scalar(g, bounds=(math.log(t_lo), math.log(t_hi)), method="bounded",
                              options={"xatol": 1e-10})
        return res.fun

    def pattern(self, lam, temps, vals, ends):
        """Sign pattern of ``dn/dT``: sampled signs plus adaptively found hidden root pairs."""
        tol = 1e-13 * max(1.0, float(np.max(np.abs(vals))))
        sg = np.where(vals > tol, 1, np.where(vals < -tol, -1, 0))
        seq = [ends[0]]
        for i, s in enumerate(sg):
            if 0 < i < len(sg) - 1 and s and sg[i - 1] == s == sg[i + 1] \
                    and abs(vals[i]) < abs(vals[i - 1]) and abs(vals[i]) < abs(vals[i + 1]):
                if self._dip(lam, temps[i - 1], temps[i + 1], s) < -tol:
                    seq.extend([s, -s])
            seq.append(int(s))
        seq.append(ends[1])
        return tuple(_collapse(seq))

    def classify(self, lam):
        ends = self.ends(lam)
        vals = self.table(lam, self.fine_temps)
        coarse = self.pattern(lam, self.fine_temps[::2], vals[::2], ends)
        fine = self.pattern(lam, self.fine_temps, vals, ends)
        if coarse != fine:
            raise ClassificationAmbiguous(f"lambda={lam:.17g}: sign pattern {coarse} changes to {fine} under refinement")
        cls = _PATTERNS.get(coarse)
        if cls is None:
            raise ClassificationAmbiguous(f"lambda={lam:.17g}: sign pattern {coarse} fits no class")
        return cls


@dataclass(frozen=True)
class ExtremaMap:
    label: str
    lambda1: float
    lambda2: float
    lambda3: float
    e_pi: float
    lambdas: Tuple[float, ...] = field(repr=False)
    classes: Tuple[DensityClass, ...] = field(repr=False)
    curve: Tuple[Tuple[float, float], ...] = field(repr=False, default=())

    @property
    def class_sequence(self):
        return tuple(_collapse(list(self.classes)))


def mean_energy(disp: Dispersion):
    """Band average of ``E``; ``dn_f/dT`` at high ``T`` has the sign of ``mean - lam``."""
    return disp.mean()


def _bisect_boundary(clf, lo, hi, below, tol):
    """Shrink ``[lo, hi]`` around the first ``lam`` whose class exceeds ``below``."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if clf.classify(mid) <= below:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def extrema_map(spec: ChainSpec, disp: Dispersion, T_max=None, n_lambda=400, n_temps=200,
                boundary_tol=1e-6, threads: int = 1, curve=True) -> ExtremaMap:
    """Classify ``n_f(T)`` across the critical interval and locate ``lambda_1..3``.

    For each ``lam`` the sign sequence of ``dn_f/dT`` is read on a log grid
    of temperatures and completed with the signs known analytically at
    both ends: ``-sign E''(p0)`` as ``T -> 0`` and ``sign(<E> - lam)`` as
    ``T -> infinity``.  Patterns ``(-,+)``, ``(+,-,+)``, ``(+)``, ``(+,-)``
    are classes i to iv; any other pattern, or one that changes when the
    temperature grid is refined to twice the density, raises ``ClassificationAmbiguous``.
    """
    e_pi = disp.e_pi
    T_max = 10.0 * e_pi if T_max is None else float(T_max)
    t_min = 1e-3 * e_pi
    if not T_max > t_min:
        raise ValueError(f"T_max must exceed {t_min:g}")
    fine = np.geomspace(t_min, T_max, 2 * n_temps - 1)
    temps = fine[::2]
    clf = _Classifier(disp, DerivativeTable(disp, t_min), fine, mean_energy(disp))

    lams = e_pi * (np.arange(n_lambda) + 0.5) / n_lambda
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            classes = list(pool.map(clf.classify, lams))
    else:
        classes = [clf.classify(l) for l in lams]
    for a, b in zip(classes[:-1], classes[1:]):
        if b < a:
            raise ClassificationAmbiguous(f"class order {a.roman} -> {b.roman} decreases with lambda")

    tol = boundary_tol * e_pi

    def boundary(below):
        idx = [i for i, c in enumerate(classes) if c <= below]
        if not idx:
            return 0.0
        i = idx[-1]
        if i == len(classes) - 1:
            return e_pi
        return _bisect_boundary(clf, lams[i], lams[i + 1], below, tol)

    lam1 = boundary(DensityClass.MIN_ONLY)
    lam2 = boundary(DensityClass.MAX_THEN_MIN)
    lam3 = boundary(DensityClass.MONOTONE)
    pts = extremum_curve(clf, lams, temps) if curve else ()
    return ExtremaMap(disp.label, lam1, lam2, lam3, e_pi, tuple(float(l) for l in lams), tuple(classes), pts)


def extremum_curve(clf: _Classifier, lams, temps) -> Tuple[Tuple[float, float], ...]:
    """Points ``(lam, T)`` on the curve ``dn_f/dT = 0`` inside the temperature window."""
    out: List[Tuple[float, float]] = []
    for lam in lams:
        vals = clf.table(lam, temps)
        for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
            f = lambda lt: float(clf.table(lam, [math.exp(lt)])[0])
            lt = brentq(f, math.log(temps[i]), math.log(temps[i + 1]), xtol=1e-12)
            out.append((float(lam), math.exp(lt)))
    return tuple(out)


def density_grid(spec: ChainSpec, disp: Dispersion, lams: Sequence[float], temps: Sequence[float],
                 with_derivative=True, threads: int = 1) -> List[DensityPoint]:
    """``density`` at every ``(lam, T)``, ordered lambda-major."""
    jobs = [(float(l), float(T)) for l in lams for T in temps]

    def run(job):
        lam, T = job
        s = spec.with_lambda(lam)
        return density(s, disp, T, with_derivative=with_derivative and T > 0)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(run, jobs))
    return [run(j) for j in jobs]
