"""Interactions, mode energies, dispersion relations and Fermi-point data.

The elliptic dispersion is evaluated from series in which the O(1)
Weierstrass contributions have been cancelled analytically.  Feeding
``wp``/``zeta`` values straight into the closed formula loses every digit
for small ``alpha``: the prefactor ``2 sinh^2(pi/alpha)`` is exponentially
large while the bracket is exponentially small.  The direct formula is
kept as :func:`elliptic_dispersion_weierstrass` for cross-checks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import zeta

from . import special_fns as sf
from .errors import ExpansionOrderUndetected, NonMonotoneDispersion

TWO_PI = 2.0 * math.pi


# --------------------------------------------------------------------------
# chain definition
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Elliptic:
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"elliptic alpha must be positive, got {self.alpha}")

    @property
    def label(self):
        return f"elliptic(alpha={self.alpha:g})"


@dataclass(frozen=True)
class XX:
    label = "xx"


@dataclass(frozen=True)
class HS:
    label = "hs"


@dataclass(frozen=True)
class Tabulated:
    """User-supplied couplings ``h(1), ..., h(N-1)``."""

    h: tuple

    def __post_init__(self):
        h = tuple(float(v) for v in self.h)
        object.__setattr__(self, "h", h)
        if any(v < 0 for v in h):
            raise ValueError("tabulated couplings must be nonnegative")
        n = len(h) + 1
        for j in range(1, n):
            if abs(h[j - 1] - h[n - j - 1]) > 1e-12 * max(1.0, abs(h[j - 1])):
                raise ValueError("tabulated couplings must satisfy h(j) = h(N-j)")

    label = "tabulated"


Interaction = Union[Elliptic, XX, HS, Tabulated]


@dataclass(frozen=True)
class ChainSpec:
    """Which chain, how many sites (``None`` = thermodynamic limit), and lambda."""

    interaction: Interaction
    n_sites: Optional[int] = None
    lam: float = 0.0

    def __post_init__(self):
        if self.n_sites is not None:
            if int(self.n_sites) != self.n_sites or self.n_sites < 2:
                raise ValueError(f"n_sites must be an integer >= 2, got {self.n_sites}")
            object.__setattr__(self, "n_sites", int(self.n_sites))
        if isinstance(self.interaction, Tabulated):
            n = len(self.interaction.h) + 1
            if self.n_sites is None:
                object.__setattr__(self, "n_sites", n)
            elif self.n_sites != n:
                raise ValueError(f"tabulated h has length {n - 1}, expected {self.n_sites - 1}")
        if not math.isfinite(self.lam):
            raise ValueError("lambda must be finite")

    @property
    def finite(self):
        return self.n_sites is not None

    def with_lambda(self, lam):
        return ChainSpec(self.interaction, self.n_sites, float(lam))

    def with_sites(self, n_sites):
        return ChainSpec(self.interaction, n_sites, self.lam)


def _require_finite(spec):
    if spec.n_sites is None:
        raise ValueError("operation requires a finite number of sites")
    return spec.n_sites


# --------------------------------------------------------------------------
# finite-N interactions and mode energies
# --------------------------------------------------------------------------


def _h_elliptic_series(alpha, n_sites, x):
    """Image-sum form ``sinh^2(pi/alpha) sum_k csch^2(pi (x + kN)/alpha)``.

    Written as a q-series in ``exp(-2 pi N / alpha)`` and summed in log space.
    Accurate for all ``alpha``; convergence slows once ``alpha >> N``.
    """
    x = np.asarray(x, dtype=float)
    c = math.pi / alpha
    ls = float(_log_sinh_scalar(c))
    main = np.exp(2.0 * (ls - _log_sinh_arr(c * x)))
    rate = TWO_PI * np.min(n_sites - x) / alpha
    nmax = int(math.ceil(46.0 / rate)) + 6
    n = np.arange(1, nmax + 1, dtype=float)[:, None]
    big = TWO_PI * n * n_sites / alpha
    log_den = np.log(-np.expm1(-big))
    y = 2.0 * c * n * x
    log_cosh = y + np.log1p(np.exp(-2.0 * y)) - math.log(2.0)
    terms = np.exp(2.0 * ls - big - log_den + log_cosh)
    return main + 8.0 * np.sum(n * terms, axis=0)


def _log_sinh_scalar(y):
    return y + math.log1p(-math.exp(-2.0 * y)) - math.log(2.0)


def _log_sinh_arr(y):
    return y + np.log1p(-np.exp(-2.0 * y)) - math.log(2.0)


def _h_elliptic_weierstrass(alpha, n_sites, x):
    """Defining formula ``(alpha/pi)^2 sinh^2(pi/alpha) (wp_N(x) - 2 eta_hat / alpha^2)``."""
    lat_n = sf.Lattice(n_sites / 2.0, alpha / 2.0)
    eta_hat = sf.Lattice(0.5, n_sites / (2.0 * alpha)).eta1
    pref = (alpha / math.pi) ** 2 * math.sinh(math.pi / alpha) ** 2
    return pref * (sf.wp(lat_n, np.asarray(x, dtype=float)) - 2.0 * eta_hat / alpha**2)


def interaction_h(spec: ChainSpec, x):
    """Coupling ``h_N(x)`` for integer ``x`` in ``1..N-1`` (array-friendly)."""
    n_sites = _require_finite(spec)
    xa = np.asarray(x)
    if np.any((xa < 1) | (xa > n_sites - 1)) or np.any(xa != np.round(xa)):
        raise ValueError(f"x must be an integer in 1..{n_sites - 1}")
    xf = xa.astype(float)
    inter = spec.interaction
    if isinstance(inter, XX):
        out = (xa == 1).astype(float) + (xa == n_sites - 1).astype(float)
    elif isinstance(inter, HS):
        out = (math.pi / n_sites) ** 2 / np.sin(math.pi * xf / n_sites) ** 2
    elif isinstance(inter, Elliptic):
        if inter.alpha <= n_sites:
            out = _h_elliptic_series(inter.alpha, n_sites, np.atleast_1d(xf)).reshape(xf.shape)
        else:
            out = _h_elliptic_weierstrass(inter.alpha, n_sites, xf)
    else:
        out = np.asarray(inter.h)[xa.astype(int) - 1]
    return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)


def couplings(spec: ChainSpec):
    """All couplings ``h_N(1..N-1)`` as an array."""
    n_sites = _require_finite(spec)
    return np.atleast_1d(interaction_h(spec, np.arange(1, n_sites)))


def mode_energy(spec: ChainSpec, l):
    """``eps_N(l) = sum_j [1 - cos(2 pi j l / N)] h_N(j)`` by direct summation."""
    n_sites = _require_finite(spec)
    j = np.arange(1, n_sites)
    return float(np.sum((1.0 - np.cos(TWO_PI * j * l / n_sites)) * couplings(spec)))


def mode_energies(spec: ChainSpec):
    """All ``eps_N(l)``, ``l = 0..N-1``, via FFT of the couplings."""
    n_sites = _require_finite(spec)
    h = np.zeros(n_sites)
    h[1:] = couplings(spec)
    eps = h.sum() - np.fft.fft(h).real
    eps[0] = 0.0
    return eps


# --------------------------------------------------------------------------
# continuum dispersion
# --------------------------------------------------------------------------


def _fold(p):
    """Map ``p`` into ``[0, pi]`` using periodicity and ``E(p) = E(2 pi - p)``."""
    p = np.mod(np.asarray(p, dtype=float), TWO_PI)
    flip = p > math.pi
    return np.where(flip, TWO_PI - p, p), np.where(flip, -1.0, 1.0)


def _sinh_minus_x(x):
    """``sinh(x) - x`` without cancellation for small ``x``."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    term = x * x2 / 6.0
    small = term.copy()
    for k in range(2, 10):
        term = term * x2 / ((2 * k) * (2 * k + 1))
        small = small + term
    with np.errstate(over="ignore"):
        return np.where(np.abs(x) < 1.0, small, np.sinh(x) - x)


# y coth(y) - 1 = 2 sum_k (-1)^(k+1) zeta(2k) (y/pi)^(2k)
_YCOTH = [(-1) ** (k + 1) * 2.0 * float(zeta(2 * k)) / math.pi ** (2 * k) for k in range(1, 13)]


def _ycoth_minus_one(y):
    """``y coth(y) - 1`` for ``|y| <= 1/2`` to full relative precision."""
    y2 = np.asarray(y, dtype=float) ** 2
    acc = np.zeros_like(y2)
    for c in reversed(_YCOTH):
        acc = (acc + c) * y2
    return acc


class _EllipticSeries:
    """Cancellation-free series for the elliptic dispersion on ``[0, pi]``.

    Both branches subtract the ``p = 0`` value analytically so that ``E`` and
    ``E'`` keep full relative precision as ``p -> 0``.
    """

    def __init__(self, alpha):
        self.alpha = alpha
        self.small = alpha < 1.0
        if self.small:
            rate = TWO_PI / alpha
            n = np.arange(1, int(math.ceil(46.0 / rate)) + 7, dtype=float)
            self.q2 = math.exp(-rate)
            # Q_n / q^2, finite as alpha -> 0
            self.Qh = np.exp(-rate * (n - 1.0)) / -np.expm1(-rate * n)
            self.n = n
            self.pref = 0.5 * (-math.expm1(-rate)) ** 2
        else:
            a = alpha
            n = np.arange(1, int(math.ceil(46.0 / (math.pi * a))) + 7, dtype=float)
            self.n = n
            self.log_den = np.log(-np.expm1(-TWO_PI * a * n))
            self.w = np.exp(-TWO_PI * a * n - self.log_den)
            self.S1 = float(np.sum(n * self.w))
            self.pref = 2.0 * math.sinh(math.pi / a) ** 2

    # alpha < 1 ---------------------------------------------------------

    def _small_value(self, p):
        n = self.n[:, None]
        Qh = self.Qh[:, None]
        s2 = np.sin(n * p / 2.0) ** 2
        # sum_{k<n} sin^2(k p / 2), the Dirichlet-kernel remainder
        below = np.cumsum(s2, axis=0) - s2
        B = np.sum(Qh * np.sin(n * p), axis=0)
        br = 4.0 * np.sum((n + 1.0) * Qh * s2, axis=0) + 8.0 * np.sum(Qh * below, axis=0)
        return self.pref * (br - 4.0 * self.q2 * B * B)

    def _small_deriv(self, p):
        n = self.n[:, None]
        Qh = self.Qh[:, None]
        sn = np.sin(n * p)
        below = np.cumsum(n * sn, axis=0) - n * sn
        A = np.sum(n * Qh * np.cos(n * p), axis=0)
        B = np.sum(Qh * sn, axis=0)
        br = 2.0 * np.sum((n * n + n) * Qh * sn, axis=0) + 4.0 * np.sum(Qh * below, axis=0)
        return self.pref * (br - 8.0 * self.q2 * A * B)

    # alpha >= 1 --------------------------------------------------------

    def _hyp(self, p):
        a = self.alpha
        n = self.n[:, None]
        up = np.exp(-n * a * (TWO_PI - p) - self.log_den[:, None])
        dn = np.exp(-n * a * (TWO_PI + p) - self.log_den[:, None])
        return n, 0.5 * (up + dn), 0.5 * (up - dn)

    def _near_value(self, y):
        """Bracket ``E / (pref a^2)`` at ``y = a p / 2 <= 1/2``, expanded about ``y = 0``."""
        a = self.alpha
        n = self.n[:, None]
        w = self.w[:, None]
        f = _ycoth_minus_one(y)
        sh2 = np.sinh(2.0 * n * y)
        eps = 4.0 * np.sum(w * sh2, axis=0) + 2.0 * y / (math.pi * a)
        with np.errstate(divide="ignore", invalid="ignore"):
            rest = np.where(y > 0, np.sum(w * (sh2 * f + _sinh_minus_x(2.0 * n * y)), axis=0) / y, 0.0)
        return f / (math.pi * a) + 2.0 * rest - 0.25 * eps * eps + 4.0 * np.sum(n * w * np.sinh(n * y) ** 2, axis=0)

    def _near_deriv(self, y):
        """``d/dy`` of :meth:`_near_value`."""
        a = self.alpha
        n = self.n[:, None]
        w = self.w[:, None]
        f = _ycoth_minus_one(y)
        with np.errstate(divide="ignore", invalid="ignore"):
            fp = np.where(y > 0, _sinh_minus_x(2.0 * y) / (2.0 * np.sinh(y) ** 2), 0.0)
        sh2 = np.sinh(2.0 * n * y)
        ch2 = np.cosh(2.0 * n * y)
        H = sh2 * f + _sinh_minus_x(2.0 * n * y)
        dH = 2.0 * n * ch2 * f + sh2 * fp + 4.0 * n * np.sinh(n * y) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            dT = np.where(y > 0, np.sum(w * (dH / y - H / (y * y)), axis=0), 0.0)
        eps = 4.0 * np.sum(w * sh2, axis=0) + 2.0 * y / (math.pi * a)
        deps = 8.0 * np.sum(n * w * ch2, axis=0) + 2.0 / (math.pi * a)
        return fp / (math.pi * a) + 2.0 * dT - 0.5 * eps * deps + 4.0 * np.sum(n * n * w * sh2, axis=0)

    def _far_value(self, p):
        a = self.alpha
        n, ch, sh = self._hyp(p)
        eps = 4.0 * np.sum(sh, axis=0) + p / math.pi
        ec = eps / np.tanh(a * p / 2.0)
        return a * a * (0.5 * ec - 0.25 * eps * eps - 6.0 * self.S1 + 2.0 * np.sum(n * ch, axis=0)) - a / math.pi

    def _far_deriv(self, p):
        a = self.alpha
        n, ch, sh = self._hyp(p)
        eps = 4.0 * np.sum(sh, axis=0) + p / math.pi
        deps = 4.0 * a * np.sum(n * ch, axis=0) + 1.0 / math.pi
        y = a * p / 2.0
        with np.errstate(over="ignore"):
            cross = deps / np.tanh(y) - 0.5 * a * eps * sf._csch2(y)
        return a * a * (0.5 * cross - 0.5 * eps * deps + 2.0 * a * np.sum(n * n * sh, axis=0))

    def _split(self, p, near, far, near_scale):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        y = self.alpha * p / 2.0
        out = np.empty_like(p)
        m = y <= 0.5
        if m.any():
            out[m] = near_scale * near(y[m])
        if (~m).any():
            out[~m] = far(p[~m])
        return self.pref * out

    def value(self, p):
        if self.small:
            return self._small_value(np.atleast_1d(p))
        a = self.alpha
        return self._split(p, self._near_value, self._far_value, a * a)

    def deriv(self, p):
        if self.small:
            return self._small_deriv(np.atleast_1d(p))
        a = self.alpha
        return self._split(p, self._near_deriv, self._far_deriv, a**3 / 2.0)


def elliptic_dispersion_weierstrass(alpha, p):
    """Closed formula ``2 sinh^2(pi/alpha)[wp - (zeta - eta1 p/pi)^2 - 2 eta1/pi]``.

    Numerically usable for ``alpha`` of order one and above only.
    """
    lat = sf.Lattice.from_alpha(alpha)
    p = np.asarray(p, dtype=float)
    eta1 = lat.eta1
    z = sf.wzeta(lat, p) - eta1 * p / math.pi
    return 2.0 * math.sinh(math.pi / alpha) ** 2 * (sf.wp(lat, p) - z * z - 2.0 * eta1 / math.pi)


def elliptic_a_b_closed_form(alpha):
    """Endpoint coefficients ``(a, b)`` of the elliptic chain from ``eta1, e1, g2``."""
    lat = sf.Lattice.from_alpha(alpha)
    eta1, e1, g2 = sf.lattice_constants(lat)
    pi = math.pi
    pre = pi / math.sinh(pi / alpha)
    a = pre * (pi**2 * g2 / 6.0 - 2.0 * eta1**2) ** -0.5
    b = pre * (pi**2 * (g2 / 2.0 - 4.0 * e1**2) + 2.0 * eta1 * (eta1 + 2.0 * pi * e1)) ** -0.5
    return a, b


def elliptic_e_pi_closed_form(alpha):
    lat = sf.Lattice.from_alpha(alpha)
    return 2.0 * math.sinh(math.pi / alpha) ** 2 * (lat.e1 - 2.0 * lat.eta1 / math.pi)


def _base_curve(inter):
    if isinstance(inter, XX):
        return (lambda p: 4.0 * np.sin(p / 2.0) ** 2), (lambda p: 2.0 * np.sin(p))
    if isinstance(inter, HS):
        return (lambda p: 0.5 * p * (TWO_PI - p)), (lambda p: math.pi - p)
    if isinstance(inter, Elliptic):
        ser = _EllipticSeries(inter.alpha)
        return ser.value, ser.deriv
    raise ValueError("a continuum dispersion exists only for elliptic, xx and hs interactions")


@dataclass(frozen=True, eq=False)
class Dispersion:
    """Dispersion relation ``E(p)`` with endpoint expansion data.

    ``E(p) ~ (p/a)^kappa`` near 0 and ``E(pi) - E(p) ~ ((pi-p)/b)^nu`` near pi.
    """

    interaction: Interaction
    _value: Callable = field(repr=False)
    _deriv: Callable = field(repr=False)
    e_pi: float = float("nan")
    kappa: int = 0
    a_coef: float = float("nan")
    nu: int = 0
    b_coef: float = float("nan")
    monotone: bool = True

    def __call__(self, p):
        x, _ = _fold(p)
        out = self._value(np.atleast_1d(x))
        return float(out[0]) if np.ndim(p) == 0 else out.reshape(np.shape(p))

    def deriv(self, p):
        x, s = _fold(p)
        out = s * self._deriv(np.atleast_1d(x)).reshape(np.shape(x))
        return float(out) if np.ndim(p) == 0 else out

    def second_deriv(self, p, h=1e-3):
        """``E''(p)`` from a 5-point central stencil applied to ``E'``."""
        d = self.deriv
        return (-d(p + 2 * h) + 8 * d(p + h) - 8 * d(p - h) + d(p - 2 * h)) / (12.0 * h)

    def mean(self):
        """Average of ``E`` over ``[0, pi]``."""
        val, _ = quad(lambda p: self(p), 0.0, math.pi, epsabs=1e-13, epsrel=1e-13, limit=200)
        return val / math.pi

    @property
    def label(self):
        return self.interaction.label


def _richardson(estimates, ratio, start_order):
    """Neville-style elimination of error terms ``h^start_order, h^(start_order+step)...``."""
    table = list(estimates)
    order = start_order
    step = 1 if ratio == 2.0 else 2
    base = 2.0
    while len(table) > 1:
        fac = base**order
        table = [(fac * table[i + 1] - table[i]) / (fac - 1.0) for i in range(len(table) - 1)]
        order += step
    return table[0]


def _forward_derivative(f, x0, k, h, levels=4):
    coeffs = [(-1) ** (k - i) * math.comb(k, i) for i in range(k + 1)]
    ests = []
    for lev in range(levels):
        hh = h / 2**lev
        vals = f(x0 + hh * np.arange(k + 1))
        ests.append(float(np.dot(coeffs, vals)) / hh**k)
    return _richardson(ests, 2.0, 1)


_CENTRAL = {
    2: (np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0),
    4: (np.array([1.0, -4.0, 6.0, -4.0, 1.0])),
}


def _central_even_derivative(f, x0, k, h, levels=3):
    stencil = _CENTRAL[k]
    offs = np.arange(-2, 3, dtype=float)
    err0 = 4 if k == 2 else 2
    ests = []
    for lev in range(levels):
        hh = h / 2**lev
        ests.append(float(np.dot(stencil, f(x0 + hh * offs))) / hh**k)
    table = ests
    order = err0
    while len(table) > 1:
        fac = 2.0**order
        table = [(fac * table[i + 1] - table[i]) / (fac - 1.0) for i in range(len(table) - 1)]
        order += 2
    return table[0]


def endpoint_expansions(disp, *, h=1e-3, h_top=2e-2, threshold=1e-6, max_order=4):
    """Detect ``(kappa, a, nu, b)`` from numerical derivatives of ``disp``.

    ``disp`` is any callable ``E(p)``.  At ``p = 0`` one-sided differences are
    used, since the even continuation of ``E`` may have a kink there (the HS
    chain has ``E'(0) = pi``).  At ``p = pi`` the curve is smooth and even, so
    only even orders are probed with central stencils; their larger step
    ``h_top`` keeps roundoff on the O(1) values of ``E`` below the truncation
    error left after extrapolation.  A derivative counts
    as nonvanishing when it exceeds ``threshold * E(pi)``.
    """
    f = lambda p: np.asarray(disp(np.asarray(p, dtype=float)), dtype=float)
    e_pi = float(f(np.array([math.pi]))[0])
    scale = threshold * max(abs(e_pi), 1e-300)

    kappa = a_coef = None
    for k in range(1, max_order + 1):
        dk = _forward_derivative(f, 0.0, k, h * k)
        if abs(dk) > scale:
            kappa, a_coef = k, (math.factorial(k) / dk) ** (1.0 / k)
            break
    nu = b_coef = None
    for k in range(2, max_order + 1, 2):
        dk = _central_even_derivative(f, math.pi, k, h_top * k)
        if abs(dk) > scale:
            nu, b_coef = k, (-math.factorial(k) / dk) ** (1.0 / k)
            break
    if kappa is None or nu is None:
        where = "p=0" if kappa is None else "p=pi"
        raise ExpansionOrderUndetected(f"no derivative up to order {max_order} exceeds threshold at {where}")
    return kappa, a_coef, nu, b_coef


def _check_monotone(value, n_grid=4097):
    grid = np.linspace(0.0, math.pi, n_grid)
    return bool(np.all(np.diff(value(grid)) > 0))


def dispersion(spec_or_interaction) -> Dispersion:
    """Build the continuum :class:`Dispersion` for an elliptic, XX or HS chain."""
    inter = getattr(spec_or_interaction, "interaction", spec_or_interaction)
    value, deriv = _base_curve(inter)
    kappa, a_coef, nu, b_coef = endpoint_expansions(value)
    return Dispersion(
        interaction=inter,
        _value=value,
        _deriv=deriv,
        e_pi=float(value(np.array([math.pi]))[0]),
        kappa=kappa,
        a_coef=a_coef,
        nu=nu,
        b_coef=b_coef,
        monotone=_check_monotone(value),
    )


# --------------------------------------------------------------------------
# Fermi point
# --------------------------------------------------------------------------


class Regime(enum.Enum):
    BELOW = "below_interval"
    LOWER_ENDPOINT = "lower_endpoint"
    CRITICAL = "critical"
    UPPER_ENDPOINT = "upper_endpoint"
    ABOVE = "above_interval"


@dataclass(frozen=True)
class CriticalPoint:
    regime: Regime
    p0: Optional[float] = None
    v: Optional[float] = None


def classify(lam, e_pi, rtol=1e-12):
    tol = rtol * max(1.0, abs(e_pi))
    if lam < 0 and abs(lam) > tol:
        return Regime.BELOW
    if abs(lam) <= tol:
        return Regime.LOWER_ENDPOINT
    if abs(lam - e_pi) <= tol:
        return Regime.UPPER_ENDPOINT
    if lam > e_pi:
        return Regime.ABOVE
    return Regime.CRITICAL


def fermi_momentum(disp: Dispersion, lam):
    """Solve ``E(p0) = lam`` on ``[0, pi]`` for ``0 < lam < E(pi)``."""
    return brentq(lambda p: disp(p) - lam, 0.0, math.pi, xtol=1e-15, rtol=1e-15, maxiter=200)


def critical_point(spec: ChainSpec, disp: Dispersion) -> CriticalPoint:
    if not disp.monotone:
        raise NonMonotoneDispersion(f"{disp.label}: E(p) is not increasing on (0, pi)")
    lam = spec.lam
    regime = classify(lam, disp.e_pi)
    if regime is Regime.CRITICAL:
        p0 = fermi_momentum(disp, lam)
        return CriticalPoint(regime, p0, disp.deriv(p0))
    if regime is Regime.LOWER_ENDPOINT:
        return CriticalPoint(regime, 0.0)
    if regime is Regime.UPPER_ENDPOINT:
        return CriticalPoint(regime, math.pi)
    return CriticalPoint(regime)


def occupied_fraction(cp: CriticalPoint):
    """Zero-temperature filling ``p0 / pi`` (0 or 1 outside the critical interval)."""
    if cp.regime in (Regime.BELOW, Regime.LOWER_ENDPOINT):
        return 0.0
    if cp.regime in (Regime.ABOVE, Regime.UPPER_ENDPOINT):
        return 1.0
    return cp.p0 / math.pi
