"""Weierstrass functions on rectangular lattices, plus Gamma / zeta / eta.

All Weierstrass evaluations are restricted to the real axis of a lattice
with real half-period ``omega1`` and purely imaginary half-period
``i * omega3_imag``.  Internally the lattice is rescaled to ``omega1 = pi``
so that the nome is ``q = exp(-pi * r)`` with ``r = omega3_imag / omega1``.

Two trigonometric/hyperbolic q-series are used:

* ``r >= 1`` (``q <= e^{-pi}``): the classical Fourier series in ``x``.
* ``r < 1``: the lattice is rotated by ``-i`` (``tau -> -1/tau``), which turns
  the real axis into the imaginary axis of a lattice with nome
  ``exp(-pi / r)``.  The resulting hyperbolic series is summed in a
  log-safe form so that no intermediate ``cosh`` overflows.

The crossover sits at the self-dual point ``r = 1`` where both nomes equal
``e^{-pi} ~ 0.043``, so every series converges at least that fast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import special as _sp

from .errors import DomainError, PoleError

POLE_GUARD = 1e-8

__all__ = [
    "Lattice",
    "wp",
    "wp_prime",
    "wzeta",
    "lattice_constants",
    "invariants",
    "imag_axis_zeta",
    "g2_theta",
    "gamma_fn",
    "riemann_zeta",
    "dirichlet_eta",
]


def _n_terms(decay_rate):
    # terms fall like exp(-decay_rate * n); the polynomial weights (up to n^5)
    # are covered by the additive margin
    return int(math.ceil(46.0 / decay_rate)) + 6


def _log_sinh(y):
    return y + np.log1p(-np.exp(-2.0 * y)) - math.log(2.0)


def _csch2(y):
    return 4.0 * np.exp(-2.0 * y) / np.expm1(-2.0 * y) ** 2


@dataclass(frozen=True)
class Lattice:
    """Rectangular period lattice ``2*omega1*Z + 2i*omega3_imag*Z``.

    Instances are immutable; derived constants are computed lazily and
    cached on first use, which is safe to share across threads.
    """

    omega1: float
    omega3_imag: float

    def __post_init__(self):
        if not (self.omega1 > 0 and self.omega3_imag > 0):
            raise DomainError(
                f"half-periods must be positive, got {self.omega1}, {self.omega3_imag}"
            )
        object.__setattr__(self, "omega1", float(self.omega1))
        object.__setattr__(self, "omega3_imag", float(self.omega3_imag))

    @classmethod
    def from_alpha(cls, alpha):
        """Lattice with half-periods ``(pi, i*pi/alpha)`` used by the elliptic chain."""
        return cls(math.pi, math.pi / alpha)

    @property
    def ratio(self):
        return self.omega3_imag / self.omega1

    @property
    def nome(self):
        return math.exp(-math.pi * self.ratio)

    @property
    def rotated(self):
        """The same lattice rotated by ``-i``: half-periods swap roles."""
        return Lattice(self.omega3_imag, self.omega1)

    @property
    def _scale(self):
        return math.pi / self.omega1

    @cached_property
    def _series(self):
        return _NormalizedSeries(self.ratio)

    @cached_property
    def eta1(self):
        return self._scale * self._series.eta1

    @cached_property
    def e1(self):
        return self._scale**2 * self._series.wp(np.array([math.pi]))[0]

    @cached_property
    def g2(self):
        return self._scale**4 * self._series.g2

    @cached_property
    def g3(self):
        return self._scale**6 * self._series.g3


class _NormalizedSeries:
    """q-series for the lattice ``(pi, i*pi*r)``; arguments lie in ``(0, pi]``."""

    def __init__(self, r):
        self.r = r
        self.direct = r >= 1.0
        if self.direct:
            rate = 2.0 * math.pi * r
            n = np.arange(1, _n_terms(rate) + 1, dtype=float)
            q2n = np.exp(-rate * n)
            self.n = n
            self.Q = q2n / -np.expm1(-rate * n)
            s1 = np.sum(n * self.Q)
            self.eta1 = math.pi / 12.0 * (1.0 - 24.0 * s1)
            self.g2 = (1.0 + 240.0 * np.sum(n**3 * self.Q)) / 12.0
            self.g3 = (1.0 - 504.0 * np.sum(n**5 * self.Q)) / 216.0
        else:
            a = 1.0 / r
            self.a = a
            # hyperbolic terms Q_n cosh(n a x) decay at least like exp(-n a pi)
            n = np.arange(1, _n_terms(math.pi * a) + 1, dtype=float)
            self.n = n
            self.log_den = np.log(-np.expm1(-2.0 * math.pi * a * n))
            Q = np.exp(-2.0 * math.pi * a * n - self.log_den)
            s1 = np.sum(n * Q)
            self.shift = a * a / 12.0 - 2.0 * a * a * s1
            self.eta1 = -math.pi * self.shift + a / 2.0
            self.g2 = a**4 / 12.0 * (1.0 + 240.0 * np.sum(n**3 * Q))
            self.g3 = -(a**6) / 216.0 * (1.0 - 504.0 * np.sum(n**5 * Q))

    def _hyp(self, x, sign):
        # sum_n n^k Q_n [e^{n a x} +/- e^{-n a x}] / 2 without overflow
        a = self.a
        n = self.n[:, None]
        up = np.exp(-n * a * (2.0 * math.pi - x) - self.log_den[:, None])
        dn = np.exp(-n * a * (2.0 * math.pi + x) - self.log_den[:, None])
        return n, 0.5 * (up + sign * dn)

    def wp(self, x):
        if self.direct:
            n = self.n[:, None]
            trig = np.sum(n * self.Q[:, None] * np.cos(n * x), axis=0)
            return -self.eta1 / math.pi + 0.25 / np.sin(x / 2.0) ** 2 - 2.0 * trig
        a = self.a
        n, ch = self._hyp(x, +1.0)
        return self.shift + 0.25 * a * a * _csch2(a * x / 2.0) + 2.0 * a * a * np.sum(n * ch, axis=0)

    def zeta(self, x):
        if self.direct:
            n = self.n[:, None]
            trig = np.sum(self.Q[:, None] * np.sin(n * x), axis=0)
            return self.eta1 * x / math.pi + 0.5 / np.tan(x / 2.0) + 2.0 * trig
        a = self.a
        n, sh = self._hyp(x, -1.0)
        return -self.shift * x + 0.5 * a / np.tanh(a * x / 2.0) - 2.0 * a * np.sum(sh, axis=0)

    def wp_prime(self, x):
        if self.direct:
            n = self.n[:, None]
            trig = np.sum(n * n * self.Q[:, None] * np.sin(n * x), axis=0)
            return -0.25 / (np.sin(x / 2.0) ** 2 * np.tan(x / 2.0)) + 2.0 * trig
        a = self.a
        n, sh = self._hyp(x, -1.0)
        y = a * x / 2.0
        return -0.25 * a**3 * _csch2(y) / np.tanh(y) + 2.0 * a**3 * np.sum(n * n * sh, axis=0)


def _reduce(lat, x):
    """Split ``x = x_r + 2 m omega1`` with ``x_r`` in ``[-omega1, omega1)``."""
    x = np.asarray(x, dtype=float)
    period = 2.0 * lat.omega1
    m = np.floor((x + lat.omega1) / period)
    xr = x - m * period
    if np.any(np.abs(xr) / period < POLE_GUARD):
        bad = np.atleast_1d(x)[np.atleast_1d(np.abs(xr) / period < POLE_GUARD)]
        raise PoleError(float(bad[0]))
    return xr, m


def _apply(lat, x, kind):
    xr, m = _reduce(lat, x)
    s = lat._scale
    t = np.atleast_1d(np.abs(xr) * s)
    sign = np.atleast_1d(np.sign(xr))
    ser = lat._series
    if kind == "wp":
        out = s * s * ser.wp(t)
    elif kind == "wp_prime":
        out = sign * s**3 * ser.wp_prime(t)
    else:
        out = sign * s * ser.zeta(t) + 2.0 * np.atleast_1d(m) * lat.eta1
    return out.reshape(np.shape(xr)) if np.ndim(xr) else float(out[0])


def wp(lat: Lattice, x):
    """Weierstrass ``wp(x)`` on the real axis.

    Raises
    ------
    PoleError
        If ``x`` is within ``POLE_GUARD * 2 * omega1`` of a lattice point.
    """
    return _apply(lat, x, "wp")


def wp_prime(lat: Lattice, x):
    """Derivative ``wp'(x)`` on the real axis."""
    return _apply(lat, x, "wp_prime")


def wzeta(lat: Lattice, x):
    """Weierstrass zeta on the real axis, quasi-periodic with ``2 * eta1``."""
    return _apply(lat, x, "zeta")


def lattice_constants(lat: Lattice):
    """Return ``(eta1, e1, g2)`` with ``eta1 = zeta(omega1)`` and ``e1 = wp(omega1)``."""
    return lat.eta1, lat.e1, lat.g2


def invariants(lat: Lattice):
    """Return the lattice invariants ``(g2, g3)``."""
    return lat.g2, lat.g3


def imag_axis_zeta(lat: Lattice):
    """Real number ``i * zeta(i * omega3_imag)``.

    Computed on the rotated lattice, whose q-series lives in the opposite
    convergence regime, so Legendre's relation
    ``eta1 * omega3_imag + omega1 * imag_axis_zeta = pi / 2``
    is a genuine cross-check between the two representations.
    """
    return lat.rotated.eta1


def _theta_constants(q):
    n = np.arange(1, 60, dtype=float)
    qn2 = q ** (n * n)
    th3 = 1.0 + 2.0 * np.sum(qn2)
    th4 = 1.0 + 2.0 * np.sum((-1.0) ** n * qn2)
    m = np.arange(0, 60, dtype=float)
    th2 = 2.0 * np.sum(q ** ((m + 0.5) ** 2))
    return th2, th3, th4


def g2_theta(lat: Lattice):
    """``g2`` from Jacobi theta constants, independent of the Eisenstein series."""
    if lat.ratio < 1.0:
        return g2_theta(lat.rotated)
    th2, th3, th4 = _theta_constants(lat.nome)
    return (2.0 / 3.0) * (math.pi / (2.0 * lat.omega1)) ** 4 * (th2**8 + th3**8 + th4**8)


def gamma_fn(x):
    if x <= 0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def riemann_zeta(x):
    if x <= 0 or x == 1:
        raise DomainError(f"riemann_zeta requires x > 0 and x != 1, got {x}")
    return float(_sp.zeta(x))


def _borwein_d(n):
    d = np.empty(n + 1)
    acc = 0.0
    for i in range(n + 1):
        acc += math.factorial(n + i - 1) * 4.0**i / (math.factorial(n - i) * math.factorial(2 * i))
        d[i] = n * acc
    return d


_BORWEIN_N = 30
_BORWEIN_D = _borwein_d(_BORWEIN_N)


def dirichlet_eta(x):
    """Dirichlet eta ``sum (-1)^(k-1) / k^x`` via Borwein's acceleration.

    Finite at ``x = 1`` (``log 2``), where the zeta-based product is singular.
    """
    if x <= 0:
        raise DomainError(f"dirichlet_eta requires x > 0, got {x}")
    n = _BORWEIN_N
    d = _BORWEIN_D
    k = np.arange(n, dtype=float)
    terms = (-1.0) ** k * (d[:n] - d[n]) / (k + 1.0) ** x
    return float(-np.sum(terms) / d[n])
