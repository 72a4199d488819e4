"""Block entanglement of the free-fermion ground state.

Entropies come from the eigenvalues of the block correlation matrix
``A_L``; the asymptotic log law and its small-block limits are provided
for comparison.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, eigvalsh, toeplitz

from .errors import DegenerateGroundState, EigensolverFailure, SizeCapExceeded
from .model import ChainSpec, mode_energies

CLAMP_BAND = 1e-10
L_CAP = 4096
Q_VN_BAND = 1e-6
DEGENERACY_RTOL = 1e-10


# --------------------------------------------------------------------------
# correlation matrices
# --------------------------------------------------------------------------


def sine_kernel_row(p0, L):
    k = np.arange(1, L, dtype=float)
    row = np.empty(L)
    row[0] = p0 / math.pi
    row[1:] = np.sin(p0 * k) / (math.pi * k)
    return row


def correlation_matrix(p0, L):
    """Thermodynamic-limit block correlation matrix (sine kernel, Toeplitz)."""
    if not 0.0 <= p0 <= math.pi:
        raise ValueError(f"p0 must lie in [0, pi], got {p0}")
    if L < 1:
        raise ValueError("block length must be at least 1")
    return toeplitz(sine_kernel_row(p0, int(L)))


def occupied_modes(spec: ChainSpec):
    """Indices ``l`` with ``eps_N(l) < lam``; raises if some mode sits at ``lam``."""
    eps = mode_energies(spec)
    scale = max(1.0, float(np.max(np.abs(eps))), abs(spec.lam))
    gap = np.abs(eps - spec.lam)
    worst = int(np.argmin(gap))
    if gap[worst] < DEGENERACY_RTOL * scale:
        raise DegenerateGroundState(worst, float(gap[worst]))
    return np.flatnonzero(eps < spec.lam)


def correlation_matrix_finite_N(spec: ChainSpec, L):
    """``<a_m^dag a_n>`` in the finite-``N`` ground state, restricted to ``L`` sites.

    Computed as ``(1/N) sum_{l occupied} cos(2 pi (m - n) l / N)``; the sine
    parts cancel because the filled set is symmetric under ``l -> N - l``.
    """
    n_sites = spec.n_sites
    if n_sites is None:
        raise ValueError("finite-N correlation matrix requires n_sites")
    if not 1 <= L <= n_sites:
        raise ValueError(f"block length must be in 1..{n_sites}")
    occ = occupied_modes(spec)
    d = np.arange(L)
    row = np.cos(2.0 * math.pi * np.outer(d, occ) / n_sites).sum(axis=1) / n_sites
    return toeplitz(row)


# --------------------------------------------------------------------------
# spectra
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CorrelationSpectrum:
    L: int
    p0: Optional[float]
    mu: np.ndarray

    @property
    def trace(self):
        return float(np.sum(self.mu))


def spectrum_of(matrix, p0=None) -> CorrelationSpectrum:
    """Eigenvalues of a correlation matrix, validated and clamped to ``[0, 1]``."""
    m = np.asarray(matrix, dtype=float)
    try:
        mu = eigvalsh(m)
    except (LinAlgError, ValueError) as exc:
        raise EigensolverFailure(str(exc), condition=_condition(m)) from exc
    bad = mu[(mu < -CLAMP_BAND) | (mu > 1.0 + CLAMP_BAND) | ~np.isfinite(mu)]
    if bad.size:
        raise EigensolverFailure("eigenvalues outside [0, 1]", condition=_condition(m), bad_values=bad.tolist())
    return CorrelationSpectrum(m.shape[0], p0, np.clip(mu, 0.0, 1.0))


def _condition(m):
    try:
        return float(np.linalg.cond(m))
    except LinAlgError:
        return float("inf")


class SpectrumCache:
    """Thread-safe memo of sine-kernel spectra keyed by ``(p0, L)``."""

    def __init__(self, l_cap=L_CAP):
        self.l_cap = l_cap
        self._data: Dict[tuple, CorrelationSpectrum] = {}
        self._lock = threading.Lock()

    def get(self, p0, L):
        if L > self.l_cap:
            raise SizeCapExceeded(f"block length {L} exceeds cap {self.l_cap}")
        key = (round(float(p0), 12), int(L))
        with self._lock:
            hit = self._data.get(key)
        if hit is not None:
            return hit
        spec = spectrum_of(correlation_matrix(p0, L), p0)
        with self._lock:
            return self._data.setdefault(key, spec)

    def clear(self):
        with self._lock:
            self._data.clear()

    def __len__(self):
        return len(self._data)


SPECTRA = SpectrumCache()


def correlation_spectrum(p0, L, cache: Optional[SpectrumCache] = SPECTRA) -> CorrelationSpectrum:
    if cache is None:
        return spectrum_of(correlation_matrix(p0, L), p0)
    return cache.get(p0, L)


# --------------------------------------------------------------------------
# entropies
# --------------------------------------------------------------------------


def binary_entropy(x):
    """``-x log x - (1-x) log(1-x)`` with ``s(0) = s(1) = 0``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(x > 0, -x * np.log(x), 0.0)
        b = np.where(x < 1, -(1.0 - x) * np.log1p(-x), 0.0)
    return a + b


def renyi_mode_entropy(x, q):
    """``log(x^q + (1-x)^q) / (1 - q)``, von Neumann within ``1e-6`` of ``q = 1``."""
    if not q > 0:
        raise ValueError(f"Renyi index must be positive, got {q}")
    if abs(q - 1.0) < Q_VN_BAND:
        return binary_entropy(x)
    x = np.asarray(x, dtype=float)
    return np.log(x**q + (1.0 - x) ** q) / (1.0 - q)


@dataclass(frozen=True)
class EntropyResult:
    L: int
    q: float
    S_exact: float
    S_asymptotic: Optional[float] = None
    gamma1_q: Optional[float] = None


def entropy(mus_or_matrix, q=1.0) -> EntropyResult:
    """Entropy ``sum_k s_q(mu_k)`` from a spectrum, eigenvalue list, or matrix."""
    if isinstance(mus_or_matrix, CorrelationSpectrum):
        mu = mus_or_matrix.mu
    else:
        arr = np.asarray(mus_or_matrix, dtype=float)
        mu = spectrum_of(arr).mu if arr.ndim == 2 else np.clip(arr, 0.0, 1.0)
    s = float(np.sum(renyi_mode_entropy(mu, q)))
    return EntropyResult(len(mu), float(q), max(s, 0.0))


def asymptotic_slope(q):
    return (q + 1.0) / (6.0 * q)


def entropy_asymptotic(p0, L, q=1.0, gamma1_q=None):
    """``(q+1)/(6q) log(L sin p0) + gamma1_q``; slope term only without calibration."""
    arg = L * math.sin(p0)
    if arg < 20.0:
        warnings.warn(f"L sin p0 = {arg:.3g} is too small for the asymptotic law", RuntimeWarning, stacklevel=2)
    val = asymptotic_slope(q) * math.log(arg)
    return val if gamma1_q is None else val + gamma1_q


def block_entropy(p0, L, q=1.0, gamma1_q=None, cache: Optional[SpectrumCache] = SPECTRA) -> EntropyResult:
    """Exact entropy of ``L`` contiguous sites, with the asymptote alongside.

    Without ``gamma1_q`` the asymptote is the slope term alone.
    """
    if p0 <= 0.0 or p0 >= math.pi:
        return EntropyResult(int(L), float(q), 0.0, None, gamma1_q)
    exact = entropy(correlation_spectrum(p0, L, cache), q).S_exact
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        asym = entropy_asymptotic(p0, L, q, gamma1_q)
    return EntropyResult(int(L), float(q), exact, asym, gamma1_q)


def finite_chain_entropy(spec: ChainSpec, L, q=1.0):
    return entropy(correlation_matrix_finite_N(spec, L), q).S_exact


def endpoint_entropy_limits(filling, L=None, q=1.0):
    """Leading small-block entropy when almost every (or no) mode is filled.

    ``filling`` is ``L p0 / pi`` when ``L`` is omitted, otherwise ``p0``
    (lower endpoint) or ``pi - p0`` (upper endpoint) and it is multiplied
    by ``L / pi``.
    """
    x = filling if L is None else L * filling / math.pi
    if not x > 0:
        return 0.0
    if abs(q - 1.0) < Q_VN_BAND:
        return -x * math.log(x)
    if q < 1.0:
        return x**q / (1.0 - q)
    return q / (q - 1.0) * x


# --------------------------------------------------------------------------
# calibration of the additive constant
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Calibration:
    q: float
    gamma1: float
    spread: float
    L_grid: tuple
    p0: float


def calibrate_gamma1(q=1.0, L_grid: Sequence[int] = (500, 1000, 2000), p0=math.pi / 2,
                     cache: Optional[SpectrumCache] = SPECTRA) -> Calibration:
    """Fit the additive constant of the log law by subtracting the slope term.

    Returns the mean offset over ``L_grid`` and its spread, which measures
    how far the grid is from the asymptotic regime.
    """
    Ls = sorted(int(L) for L in L_grid)
    offsets = np.array([
        block_entropy(p0, L, q, cache=cache).S_exact - asymptotic_slope(q) * math.log(L * math.sin(p0))
        for L in Ls
    ])
    return Calibration(float(q), float(np.mean(offsets)), float(np.ptp(offsets)), tuple(Ls), float(p0))


def _q_key(q):
    return f"{float(q):.12g}"


def read_calibration(path) -> Dict[str, float]:
    """Parse ``gamma1[q]=value`` lines; blank lines and ``#`` comments are skipped."""
    table = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        key = key.strip()
        if not sep or not (key.startswith("gamma1[") and key.endswith("]")):
            raise ValueError(f"{path}:{n}: expected gamma1[q]=value")
        table[_q_key(float(key[7:-1]))] = float(val)
    return table


def write_calibration(path, entries: Dict[float, float]):
    lines = [f"gamma1[{_q_key(q)}]={g:.10f}" for q, g in sorted(entries.items())]
    Path(path).write_text("\n".join(lines) + "\n")


def lookup_gamma1(table: Optional[Dict[str, float]], q):
    if not table:
        return None
    return table.get(_q_key(q))
